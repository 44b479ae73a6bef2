// Copyright 2026 The Galactic Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "galactic/errors.h"
#include "galactic/langmodel.h"
#include "galactic/ordering_model.h"
#include "galactic/synthesis.h"
#include "galactic/train.h"
#include "galactic/treebank.h"

namespace galactic::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kExitCodeHelp =
    "Exit status:\n"
    "  0  success\n"
    "  1  other failure\n"
    "  2  usage error (unknown flag, bad value)\n"
    "  3  I/O error (missing or unwritable file)\n"
    "  4  parse error (malformed CoNLL-U, model or LM file)\n"
    "  5  model or spec error (missing model, class mismatch, bad language spec)\n"
    "  6  validation failure\n"
    "  7  undefined metric (e.g. R with no permutable node)\n"
    "\n"
    "GALACTIC_JOBS sets the default for --jobs.";

ParseMode parse_mode(const RunConfig& c) {
  return c.lenient ? ParseMode::kLenient : ParseMode::kStrict;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// "en-ud-train.conllu" -> "en".
std::string language_from_file(const fs::path& file) {
  const std::string name = file.filename().string();
  const std::size_t at = name.find("-ud-");
  return at == std::string::npos ? std::string() : name.substr(0, at);
}

fs::path without_trailing_slash(const fs::path& p) {
  fs::path out = p.lexically_normal();
  if (out.filename().empty()) out = out.parent_path();
  return out;
}

// ---------------------------------------------------------------- train

int do_train(const RunConfig& c, std::ostream& out) {
  std::string lang = c.lang;
  fs::path file;
  if (fs::is_directory(c.treebank)) {
    if (lang.empty()) lang = without_trailing_slash(c.treebank).filename().string();
    file = find_split_file(c.treebank, lang, "train");
  } else if (fs::is_regular_file(c.treebank)) {
    file = c.treebank;
    if (lang.empty()) lang = language_from_file(file);
  } else {
    throw IoError("no treebank at " + c.treebank.string());
  }
  if (lang.empty()) {
    throw std::invalid_argument("cannot infer the language of " + file.string() +
                                "; pass --lang");
  }
  const std::vector<DepTree> trees = read_conllu_file(file, parse_mode(c));
  fs::create_directories(c.output);

  TrainOptions options;
  options.max_iterations = c.max_iterations;
  options.tolerance = c.tolerance;
  options.threads = c.jobs;
  out << "language\tclass\tconfigs\titerations\tobjective\tconverged\tmodel\n";
  for (PosClass cls : {PosClass::kNoun, PosClass::kVerb}) {
    const std::vector<LocalConfig> configs = training_configs(trees, cls);
    if (configs.empty()) {
      throw UndefinedError("no " + std::string(1, pos_class_code(cls)) +
                           " configurations in " + file.string());
    }
    const OrderingModel model =
        train(lang, cls, configs, build_h_whitelist(configs), options);
    const fs::path path = ModelStore::model_path(c.output, lang, cls);
    save_model(path, model);
    out << lang << '\t' << pos_class_code(cls) << '\t' << configs.size() << '\t'
        << model.meta.iterations << '\t' << format_double(model.meta.objective) << '\t'
        << (model.meta.converged ? "yes" : "no") << '\t' << path.string() << '\n';
  }
  return kExitOk;
}

// ----------------------------------------------------- permute and batch

LanguageSpec spec_from(const RunConfig& c, std::string_view name) {
  LanguageSpec spec = parse_language_spec(name);
  spec.seed = c.seed;
  spec.lambda = c.lambda;
  return spec;
}

int do_permute(const RunConfig& c, std::ostream& out) {
  ModelStore models(c.models);
  SynthesisOptions options;
  options.mode = parse_mode(c);
  options.threads = c.jobs;
  const fs::path dir =
      synthesize_language(spec_from(c, c.spec), c.treebanks, models, c.output, options);
  out << dir.string() << '\n';
  return kExitOk;
}

int exit_code_of(std::exception_ptr error, std::string& message);

std::string trim(const std::string& s) {
  const std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Specs are pulled one line at a time by the workers; result lines are
// printed in input order as soon as every earlier spec has finished.
int do_batch(const RunConfig& c, std::ostream& out, std::ostream& err) {
  std::ifstream specs(c.specs_file);
  if (!specs) throw IoError("cannot read spec list " + c.specs_file.string());
  ModelStore models(c.models);
  SynthesisOptions options;
  options.mode = parse_mode(c);

  std::mutex mutex;
  std::size_t next_ordinal = 0;
  std::size_t next_to_print = 0;
  std::map<std::size_t, std::string> pending;
  int status = kExitOk;

  auto take = [&](std::string& name) -> std::optional<std::size_t> {
    std::string line;
    while (std::getline(specs, line)) {
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      name = line;
      return next_ordinal++;
    }
    return std::nullopt;
  };
  auto worker = [&] {
    while (true) {
      std::string name;
      std::optional<std::size_t> ordinal;
      {
        std::lock_guard lock(mutex);
        ordinal = take(name);
      }
      if (!ordinal) return;
      std::string line;
      int code = kExitOk;
      try {
        const fs::path dir =
            synthesize_language(spec_from(c, name), c.treebanks, models, c.output, options);
        line = name + "\tok\t" + dir.string();
      } catch (...) {
        std::string message;
        code = exit_code_of(std::current_exception(), message);
        line = name + "\terror\t" + message;
      }
      std::lock_guard lock(mutex);
      if (code != kExitOk && status == kExitOk) status = code;
      pending.emplace(*ordinal, std::move(line));
      while (!pending.empty() && pending.begin()->first == next_to_print) {
        out << pending.begin()->second << '\n';
        pending.erase(pending.begin());
        ++next_to_print;
      }
    }
  };
  out << "spec\tstatus\tdetail\n";
  std::vector<std::thread> pool;
  for (int w = 1; w < c.jobs; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  if (status != kExitOk) err << "error: some specs failed\n";
  return status;
}

// ---------------------------------------------------------------- stats

int do_stats(const RunConfig& c, std::ostream& out) {
  ModelStore models(c.models);
  out << "language\tsents_kept\tsents_total\ttokens_kept\ttokens_total\tT\tR\n";
  for (const std::string& lang : c.languages) {
    std::vector<DepTree> train_trees =
        read_conllu_file(find_split_file(c.treebanks, lang, "train"), parse_mode(c));
    const std::size_t sents_total = train_trees.size();
    std::size_t tokens_total = 0;
    for (const DepTree& t : train_trees) tokens_total += t.size();
    const FilterResult kept = filter_for_generation(std::move(train_trees));
    const TouchedCount touched = touched_tokens(kept.kept);

    const std::vector<DepTree> dev = filter_for_generation(
        read_conllu_file(find_split_file(c.treebanks, lang, "dev"), parse_mode(c))).kept;
    const OrderingModel& n = models.get(lang, PosClass::kNoun);
    const OrderingModel& v = models.get(lang, PosClass::kVerb);
    const double r = freeness(&n, &v, dev);

    out << lang << '\t' << kept.kept.size() << '\t' << sents_total << '\t'
        << touched.total << '\t' << tokens_total << '\t'
        << format_double(touched.fraction()) << '\t' << format_double(r) << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------ perplexity, select

std::vector<SymbolSequence> sequences_for(const fs::path& file, LmMode mode,
                                          ParseMode parse) {
  const std::vector<DepTree> trees = read_conllu_file(file, parse);
  return mode == LmMode::kTag ? tag_sequences(trees) : word_sequences(trees);
}

bool is_lm_file(const fs::path& path) { return path.extension() == ".lm"; }

int do_perplexity(const RunConfig& c, std::ostream& out) {
  if (c.lm_eval.empty() && c.lm_save.empty()) {
    throw std::invalid_argument("perplexity needs --eval, --save, or both");
  }
  std::optional<TrigramLM> lm;
  if (is_lm_file(c.lm_train)) {
    lm.emplace(TrigramLM::load(c.lm_train));
  } else {
    const LmMode mode = parse_lm_mode(c.lm_mode);
    lm.emplace(TrigramLM::train(sequences_for(c.lm_train, mode, parse_mode(c)), mode,
                                c.oov_threshold));
  }
  if (!c.lm_save.empty()) lm->save(c.lm_save);
  if (c.lm_eval.empty()) return kExitOk;

  const std::vector<SymbolSequence> eval = sequences_for(c.lm_eval, lm->mode(), parse_mode(c));
  double bits = 0;
  std::size_t predictions = 0;
  for (const SymbolSequence& s : eval) {
    bits += lm->log2_probability(s);
    predictions += TrigramLM::predictions(s);
  }
  out << "mode\tvocab_size\tsentences\tpredictions\tlog2prob\tperplexity\n";
  out << lm_mode_name(lm->mode()) << '\t' << lm->vocab_size() << '\t' << eval.size() << '\t'
      << predictions << '\t' << format_double(bits) << '\t'
      << format_double(perplexity(*lm, eval)) << '\n';
  return kExitOk;
}

int do_select(const RunConfig& c, std::ostream& out) {
  std::vector<std::pair<std::string, TrigramLM>> lms;
  std::set<std::string> ids;
  for (const std::string& entry : c.candidates) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw std::invalid_argument("--candidate wants <id>=<path>, got '" + entry + "'");
    }
    const std::string id = entry.substr(0, eq);
    const fs::path path = entry.substr(eq + 1);
    if (!ids.insert(id).second) throw std::invalid_argument("duplicate candidate " + id);
    if (is_lm_file(path)) {
      TrigramLM lm = TrigramLM::load(path);
      if (lm.mode() != LmMode::kTag) {
        throw ModelError(path.string() + " is a word LM; selection uses tag LMs");
      }
      lms.emplace_back(id, std::move(lm));
    } else {
      lms.emplace_back(id, TrigramLM::train(sequences_for(path, LmMode::kTag, parse_mode(c)),
                                            LmMode::kTag));
    }
  }
  std::vector<std::pair<std::string, const TrigramLM*>> candidates;
  for (const auto& [id, lm] : lms) candidates.emplace_back(id, &lm);
  const Selection s =
      select_source(candidates, sequences_for(c.target, LmMode::kTag, parse_mode(c)));
  out << "language\tlog2prob\trank\n";
  for (const SelectionRow& row : s.table) {
    out << row.language << '\t' << format_double(row.log2_probability) << '\t' << row.rank
        << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------- validate

int orig_idx(const Token& t) {
  std::size_t at = t.misc.find("OrigIdx=");
  if (at == std::string::npos) return -1;
  at += 8;
  int value = 0;
  const std::size_t end = t.misc.find('|', at);
  try {
    value = std::stoi(t.misc.substr(at, end == std::string::npos ? end : end - at));
  } catch (const std::exception&) {
    return -1;
  }
  return value;
}

// Empty when the tree carries a valid OrigIdx bijection.
std::string origidx_problem(const DepTree& tree) {
  std::vector<bool> seen(tree.size() + 1, false);
  for (const Token& t : tree.tokens) {
    const int o = orig_idx(t);
    if (o < 1 || o > static_cast<int>(tree.size())) {
      return "token " + std::to_string(t.index) + " lacks a valid OrigIdx";
    }
    if (seen[o]) return "OrigIdx=" + std::to_string(o) + " appears twice";
    seen[o] = true;
  }
  return {};
}

// Empty when `syn` is a re-linearization of `src`.
std::string source_problem(const DepTree& src, const DepTree& syn) {
  if (src.size() != syn.size()) return "token count differs from the source";
  for (const Token& t : syn.tokens) {
    const Token& s = src.token(orig_idx(t));
    if (t.form != s.form || t.upos != s.upos || t.deprel != s.deprel) {
      return "token " + std::to_string(t.index) + " does not match its source";
    }
    const int head = t.head == 0 ? 0 : orig_idx(syn.token(t.head));
    if (head != s.head) return "token " + std::to_string(t.index) + " changed its head";
  }
  return {};
}

int do_validate(const RunConfig& c, std::ostream& out) {
  const fs::path dir = without_trailing_slash(c.dir);
  if (!fs::is_directory(dir)) throw IoError("no directory " + dir.string());
  const std::string name = dir.filename().string();
  const LanguageSpec spec = parse_language_spec(name);
  bool ok = true;
  out << "split\tcheck\tresult\n";
  auto report = [&](std::string_view split, std::string_view check,
                    const std::string& problem) {
    out << split << '\t' << check << '\t' << (problem.empty() ? "ok" : "FAIL: " + problem)
        << '\n';
    ok = ok && problem.empty();
  };

  const fs::path manifest = dir / "manifest.tsv";
  std::string manifest_problem;
  if (!fs::is_regular_file(manifest)) {
    manifest_problem = "missing";
  } else if (slurp(manifest).find("spec\t" + name + "\n") == std::string::npos) {
    manifest_problem = "spec line does not match the directory name";
  }
  report("-", "manifest", manifest_problem);

  for (std::string_view split : kSplits) {
    const fs::path file = dir / (name + "-ud-" + std::string(split) + ".conllu");
    const std::string text = slurp(file);
    std::vector<DepTree> trees;
    try {
      trees = parse_conllu(text);
    } catch (const ParseError& e) {
      report(split, "parse", e.what());
      continue;
    }
    report(split, "parse", "");
    report(split, "round_trip",
           serialize_conllu(trees) == text ? "" : "re-serialization differs from the file");

    std::string problem;
    for (const DepTree& t : trees) {
      if (!is_projective(t)) {
        problem = "tree " + t.source_id + " is not projective";
        break;
      }
    }
    report(split, "projective", problem);

    problem.clear();
    for (const DepTree& t : trees) {
      if (std::string p = origidx_problem(t); !p.empty()) {
        problem = "tree " + t.source_id + ": " + p;
        break;
      }
    }
    report(split, "orig_idx", problem);
    if (!problem.empty() || c.treebanks.empty()) continue;

    const std::vector<DepTree> source = filter_for_generation(
        read_conllu_file(find_split_file(c.treebanks, spec.substrate, split),
                         parse_mode(c))).kept;
    problem.clear();
    if (source.size() != trees.size()) {
      problem = std::to_string(trees.size()) + " trees, source keeps " +
                std::to_string(source.size());
    }
    for (std::size_t i = 0; problem.empty() && i < trees.size(); ++i) {
      if (std::string p = source_problem(source[i], trees[i]); !p.empty()) {
        problem = "tree " + trees[i].source_id + ": " + p;
      }
    }
    report(split, "matches_source", problem);
  }
  return ok ? kExitOk : kExitValidation;
}

int exit_code_of(std::exception_ptr error, std::string& message) {
  try {
    std::rethrow_exception(error);
  } catch (const IoError& e) {
    message = e.what();
    return kExitIo;
  } catch (const ParseError& e) {
    message = e.what();
    return kExitParse;
  } catch (const ModelError& e) {
    message = e.what();
    return kExitModel;
  } catch (const UndefinedError& e) {
    message = e.what();
    return kExitUndefined;
  } catch (const std::invalid_argument& e) {
    message = e.what();
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    // A symbol outside a closed LM vocabulary.
    message = e.what();
    return kExitModel;
  } catch (const fs::filesystem_error& e) {
    message = e.what();
    return kExitIo;
  } catch (const std::exception& e) {
    message = e.what();
    return kExitFailure;
  }
}

}  // namespace

std::unique_ptr<CLI::App> make_app(RunConfig& c) {
  auto app = std::make_unique<CLI::App>(
      "Learns dependent-ordering models from UD treebanks and synthesizes "
      "permuted treebanks.",
      "galactic");
  app->footer(kExitCodeHelp);
  app->require_subcommand(1);
  app->set_version_flag("--version", std::string(tool_version()), "Print the version");

  auto add_jobs = [&c](CLI::App* sub, const std::string& what) {
    sub->add_option("--jobs", c.jobs, what)
        ->envname("GALACTIC_JOBS")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_lenient = [&c](CLI::App* sub) {
    sub->add_flag("--lenient", c.lenient,
                  "Map unknown tags to X and relations to dep, and skip malformed "
                  "sentences, instead of failing");
  };
  auto add_synthesis = [&c](CLI::App* sub) {
    sub->add_option("--treebanks", c.treebanks,
                    "Root holding <lang>-ud-<split>.conllu or <lang>/<lang>-ud-<split>.conllu")
        ->required();
    sub->add_option("--models", c.models, "Directory of <lang>.N.model / <lang>.V.model")
        ->required();
    sub->add_option("--out", c.output, "Output root; one directory per spec")->required();
    sub->add_option("--seed", c.seed, "Random seed")->capture_default_str();
    sub->add_option("--lambda", c.lambda, "Substrate interpolation weight")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
  };

  CLI::App* train = app->add_subcommand(
      "train", "Train the N and V ordering models of one language");
  train->add_option("--treebank", c.treebank,
                    "A training .conllu file, or a directory holding <lang>-ud-train.conllu")
      ->required();
  train->add_option("--out", c.output, "Directory for <lang>.N.model and <lang>.V.model")
      ->required();
  train->add_option("--lang", c.lang,
                    "Language id (default: inferred from the file or directory name)");
  train->add_option("--max-iterations", c.max_iterations, "Optimizer iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  train->add_option("--tolerance", c.tolerance,
                    "Stop when the gradient infinity norm falls to this")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_jobs(train, "Threads for the gradient computation");
  add_lenient(train);

  CLI::App* permute = app->add_subcommand(
      "permute", "Synthesize one language directory, e.g. en~fr@N~hi@V");
  permute->add_option("--spec", c.spec, "Language spec: <sub>[~<rN>@N][~<rV>@V]")
      ->required();
  add_synthesis(permute);
  add_jobs(permute, "Threads for permuting sentences");
  add_lenient(permute);

  CLI::App* batch = app->add_subcommand(
      "batch", "Synthesize every spec listed in a file, one per line");
  batch->add_option("--specs", c.specs_file, "File of specs; blank lines and # comments skipped")
      ->required();
  add_synthesis(batch);
  add_jobs(batch, "Specs synthesized in parallel");
  add_lenient(batch);

  CLI::App* stats = app->add_subcommand(
      "stats", "Sentence and token counts, touched fraction T and freeness R");
  stats->add_option("--treebanks", c.treebanks, "Root holding the real treebanks")
      ->required();
  stats->add_option("--models", c.models, "Directory of trained models")->required();
  stats->add_option("--lang", c.languages, "Language id (repeatable)")->required();
  add_lenient(stats);

  CLI::App* ppl = app->add_subcommand(
      "perplexity", "Train (or load) a trigram LM and report held-out perplexity");
  ppl->add_option("--train", c.lm_train, "Training .conllu file, or a saved .lm file")
      ->required();
  ppl->add_option("--eval", c.lm_eval, "Evaluation .conllu file");
  ppl->add_option("--save", c.lm_save, "Write the trained LM here");
  ppl->add_option("--mode", c.lm_mode, "Symbols to model")
      ->check(CLI::IsMember({"tag", "word"}))
      ->capture_default_str();
  ppl->add_option("--oov-threshold", c.oov_threshold,
                  "Word mode: types seen fewer times become <unk>; 0 disables")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  add_lenient(ppl);

  CLI::App* select = app->add_subcommand(
      "select", "Rank candidate source languages by tag LM likelihood of a target");
  select->add_option("--candidate", c.candidates,
                     "<id>=<path> with path a tag-mode .lm or a .conllu to train on "
                     "(repeatable)")
      ->required();
  select->add_option("--target", c.target, "Target .conllu file (tags only are used)")
      ->required();
  add_lenient(select);

  CLI::App* validate = app->add_subcommand(
      "validate", "Check a synthetic language directory");
  validate->add_option("--dir", c.dir, "Directory written by permute or batch")->required();
  validate->add_option("--treebanks", c.treebanks,
                       "Real treebank root; enables the comparison with the substrate");
  add_lenient(validate);

  for (CLI::App* sub : app->get_subcommands({})) {
    sub->footer(kExitCodeHelp);
    sub->callback([&c, sub] { c.subcommand = sub->get_name(); });
  }
  return app;
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.subcommand == "train") return do_train(c, out);
    if (c.subcommand == "permute") return do_permute(c, out);
    if (c.subcommand == "batch") return do_batch(c, out, err);
    if (c.subcommand == "stats") return do_stats(c, out);
    if (c.subcommand == "perplexity") return do_perplexity(c, out);
    if (c.subcommand == "select") return do_select(c, out);
    if (c.subcommand == "validate") return do_validate(c, out);
    err << "error: unknown subcommand '" << c.subcommand << "'\n";
    return kExitUsage;
  } catch (...) {
    std::string message;
    const int code = exit_code_of(std::current_exception(), message);
    err << "error: " << message << '\n';
    return code;
  }
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig config;
  std::unique_ptr<CLI::App> app = make_app(config);
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app->parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app->exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  return run(config, out, err);
}

}  // namespace galactic::cli
