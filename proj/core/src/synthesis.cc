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

#include "galactic/synthesis.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "galactic/errors.h"
#include "galactic/sjt.h"

#ifndef GALACTIC_VERSION_STRING
#define GALACTIC_VERSION_STRING "0.0.0"
#endif

namespace galactic {

namespace {

bool valid_language_id(std::string_view id) {
  return !id.empty() && id.find_first_of("~@/ \t") == std::string_view::npos;
}

// Remaps "h:rel|h:rel" heads; returns false if any head is not an integer.
bool remap_deps(std::string& deps, const std::vector<int>& new_index) {
  if (deps == "_") return true;
  std::string out;
  std::size_t start = 0;
  while (start <= deps.size()) {
    std::size_t end = deps.find('|', start);
    if (end == std::string::npos) end = deps.size();
    const std::string_view entry = std::string_view(deps).substr(start, end - start);
    const std::size_t colon = entry.find(':');
    if (colon == std::string_view::npos) return false;
    int head = 0;
    const auto [ptr, ec] = std::from_chars(entry.data(), entry.data() + colon, head);
    if (ec != std::errc() || ptr != entry.data() + colon || head < 0 ||
        head >= static_cast<int>(new_index.size())) {
      return false;
    }
    if (!out.empty()) out += '|';
    out += std::to_string(head == 0 ? 0 : new_index[head]);
    out += entry.substr(colon);
    start = end + 1;
  }
  deps = std::move(out);
  return true;
}

}  // namespace

std::string_view tool_version() { return "galactic " GALACTIC_VERSION_STRING; }

std::string LanguageSpec::directory_name() const {
  std::string name = substrate;
  if (superstrate_n) name += "~" + *superstrate_n + "@N";
  if (superstrate_v) name += "~" + *superstrate_v + "@V";
  return name;
}

LanguageSpec parse_language_spec(std::string_view name) {
  auto fail = [&](const std::string& why) -> ModelError {
    return ModelError("bad language spec '" + std::string(name) + "': " + why);
  };
  LanguageSpec spec;
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = name.find('~', start);
    parts.push_back(name.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (!valid_language_id(parts[0])) throw fail("missing or malformed substrate");
  spec.substrate = parts[0];
  if (parts.size() > 3) throw fail("too many components");
  for (std::size_t k = 1; k < parts.size(); ++k) {
    const std::string_view part = parts[k];
    const std::size_t at = part.rfind('@');
    if (at == std::string_view::npos) throw fail("component without @N or @V");
    const std::string_view lang = part.substr(0, at);
    const std::string_view cls = part.substr(at + 1);
    if (!valid_language_id(lang)) throw fail("malformed superstrate");
    if (cls == "N") {
      if (spec.superstrate_n || spec.superstrate_v) throw fail("@N must come first and once");
      spec.superstrate_n = std::string(lang);
    } else if (cls == "V") {
      if (spec.superstrate_v) throw fail("@V given twice");
      spec.superstrate_v = std::string(lang);
    } else {
      throw fail("unknown class '@" + std::string(cls) + "'");
    }
  }
  return spec;
}

std::vector<LanguageSpec> enumerate_language_specs(
    std::span<const std::string> languages) {
  std::vector<std::optional<std::string>> choices = {std::nullopt};
  for (const std::string& l : languages) choices.emplace_back(l);
  std::vector<LanguageSpec> out;
  out.reserve(languages.size() * choices.size() * choices.size());
  for (const std::string& s : languages) {
    for (const auto& rn : choices) {
      for (const auto& rv : choices) {
        LanguageSpec spec;
        spec.substrate = s;
        spec.superstrate_n = rn;
        spec.superstrate_v = rv;
        out.push_back(std::move(spec));
      }
    }
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream RngStream::derive(std::uint64_t seed, std::string_view spec,
                            std::string_view split, std::uint64_t ordinal) {
  std::string key = std::to_string(seed);
  key += '|';
  key += spec;
  key += '|';
  key += split;
  key += '|';
  key += std::to_string(ordinal);
  return RngStream(fnv1a64(key));
}

double RngStream::uniform() {
  ++draws_;
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

Permutation sample_ordering(const CompiledModel& model, const LocalConfig& config,
                            RngStream& rng) {
  if (config.n() > kMaxEnumerable) {
    throw std::invalid_argument("cannot sample an ordering of n = " +
                                std::to_string(config.n()) + " > 7 elements");
  }
  if (config.n() <= 1) return identity_permutation(config.n());
  const CompiledConfig compiled = model.compile(config);
  return sample_compiled(compiled, model.theta(), rng.uniform());
}

Permutation sample_ordering(const OrderingModel& model, const LocalConfig& config,
                            RngStream& rng) {
  return sample_ordering(CompiledModel(model), config, rng);
}

DepTree permute_tree(const DepTree& tree, const CompiledModel* model_n,
                     const CompiledModel* model_v, RngStream& rng,
                     PermuteNotes* notes) {
  if (!is_projective(tree)) {
    throw std::invalid_argument("tree " + tree.source_id + " is not projective");
  }
  if (max_fanout(tree) > kMaxGenerationFanout) {
    throw std::invalid_argument("tree " + tree.source_id +
                                " has a node with n >= 8");
  }
  const int size = static_cast<int>(tree.size());
  const auto children = tree.children();

  // arrangement[v]: v and its dependents in output order.
  std::vector<std::vector<int>> arrangement(size + 1);
  std::vector<int> stack = {tree.root()};
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    const LocalConfig config = local_config_at(tree, v);
    const std::string& tag = tree.token(v).upos;
    const CompiledModel* model = nullptr;
    if (in_pos_class(tag, PosClass::kNoun)) model = model_n;
    if (in_pos_class(tag, PosClass::kVerb)) model = model_v;
    const Permutation order = model ? sample_ordering(*model, config, rng)
                                    : identity_permutation(config.n());
    for (int k : order) arrangement[v].push_back(config.elements[k].token);
    for (auto it = children[v].rbegin(); it != children[v].rend(); ++it) {
      stack.push_back(*it);
    }
  }

  std::vector<int> linear;
  linear.reserve(size);
  // (node, next position in its arrangement)
  std::vector<std::pair<int, std::size_t>> walk = {{tree.root(), 0}};
  while (!walk.empty()) {
    auto& [v, next] = walk.back();
    if (next == arrangement[v].size()) {
      walk.pop_back();
      continue;
    }
    const int t = arrangement[v][next++];
    if (t == v) {
      linear.push_back(v);
    } else {
      walk.emplace_back(t, 0);
    }
  }

  std::vector<int> new_index(size + 1, 0);
  for (int k = 0; k < size; ++k) new_index[linear[k]] = k + 1;

  DepTree out;
  out.comments = tree.comments;
  out.source_id = tree.source_id;
  out.tokens.reserve(size);
  PermuteNotes local;
  local.dropped_range_lines = tree.ranges.size();
  for (int k = 0; k < size; ++k) {
    Token t = tree.token(linear[k]);
    t.index = k + 1;
    t.head = t.head == 0 ? 0 : new_index[t.head];
    const std::string orig = "OrigIdx=" + std::to_string(linear[k]);
    t.misc = t.misc == "_" || t.misc.empty() ? orig : t.misc + "|" + orig;
    if (!remap_deps(t.deps, new_index)) {
      t.deps = "_";
      ++local.cleared_deps;
    }
    out.tokens.push_back(std::move(t));
  }
  if (notes) {
    notes->dropped_range_lines += local.dropped_range_lines;
    notes->cleared_deps += local.cleared_deps;
  }
  return out;
}

std::filesystem::path ModelStore::model_path(const std::filesystem::path& dir,
                                             std::string_view language,
                                             PosClass pos_class) {
  return dir / (std::string(language) + "." + pos_class_code(pos_class) + ".model");
}

const OrderingModel& ModelStore::get(const std::string& language,
                                     PosClass pos_class) {
  std::lock_guard lock(mutex_);
  const auto key = std::make_pair(language, pos_class_code(pos_class));
  if (const auto it = cache_.find(key); it != cache_.end()) return it->second;
  const std::filesystem::path path = model_path(dir_, language, pos_class);
  if (!std::filesystem::exists(path)) {
    throw ModelError("missing model " + path.string());
  }
  OrderingModel model = load_model(path);
  if (model.pos_class != pos_class) {
    throw ModelError(path.string() + " holds a " +
                     std::string(1, pos_class_code(model.pos_class)) + " model");
  }
  return cache_.emplace(key, std::move(model)).first->second;
}

std::filesystem::path find_split_file(const std::filesystem::path& root,
                                      std::string_view language,
                                      std::string_view split) {
  const std::string file = std::string(language) + "-ud-" + std::string(split) + ".conllu";
  for (const auto& candidate : {root / file, root / std::string(language) / file}) {
    if (std::filesystem::is_regular_file(candidate)) return candidate;
  }
  throw IoError("no " + std::string(split) + " split for '" + std::string(language) +
                "' under " + root.string());
}

std::filesystem::path synthesize_language(const LanguageSpec& spec,
                                          const std::filesystem::path& treebank_root,
                                          ModelStore& models,
                                          const std::filesystem::path& output_root,
                                          const SynthesisOptions& options) {
  if (!(spec.lambda >= 0.0 && spec.lambda <= 1.0)) {
    throw std::invalid_argument("lambda must lie in [0, 1]");
  }
  const std::string name = spec.directory_name();

  std::optional<CompiledModel> model_n;
  std::optional<CompiledModel> model_v;
  if (spec.superstrate_n) {
    model_n.emplace(interpolate(models.get(*spec.superstrate_n, PosClass::kNoun),
                                models.get(spec.substrate, PosClass::kNoun),
                                spec.lambda));
  }
  if (spec.superstrate_v) {
    model_v.emplace(interpolate(models.get(*spec.superstrate_v, PosClass::kVerb),
                                models.get(spec.substrate, PosClass::kVerb),
                                spec.lambda));
  }

  // Read everything before creating the output directory.
  std::vector<std::vector<DepTree>> inputs;
  for (std::string_view split : kSplits) {
    inputs.push_back(read_conllu_file(find_split_file(treebank_root, spec.substrate, split),
                                      options.mode));
  }

  const std::filesystem::path dir = output_root / name;
  std::filesystem::create_directories(dir);

  std::string manifest;
  auto put = [&manifest](std::string_view key, std::string_view value) {
    manifest += key;
    manifest += '\t';
    manifest += value;
    manifest += '\n';
  };
  put("spec", name);
  put("substrate", spec.substrate);
  put("superstrate_N", spec.superstrate_n.value_or("none"));
  put("superstrate_V", spec.superstrate_v.value_or("none"));
  put("lambda", format_double(spec.lambda));
  put("seed", std::to_string(spec.seed));
  put("rng", RngStream::kName);
  put("rng_derivation", "fnv1a64(\"<seed>|<spec>|<split>|<kept-sentence-ordinal>\")");
  put("visit_order", "depth-first from root, children in original surface order");
  put("tool_version", tool_version());

  std::vector<std::string> dropped_lines;
  for (std::size_t s = 0; s < kSplits.size(); ++s) {
    const std::string split(kSplits[s]);
    const std::size_t total = inputs[s].size();
    FilterResult filtered = filter_for_generation(std::move(inputs[s]));
    const std::vector<DepTree>& kept = filtered.kept;

    std::vector<DepTree> out(kept.size());
    std::vector<PermuteNotes> notes(kept.size());
    auto work = [&](std::size_t i) {
      RngStream rng = RngStream::derive(spec.seed, name, split, i);
      out[i] = permute_tree(kept[i], model_n ? &*model_n : nullptr,
                            model_v ? &*model_v : nullptr, rng, &notes[i]);
    };
    const int workers = std::max(1, std::min<int>(options.threads, static_cast<int>(kept.size())));
    if (workers <= 1) {
      for (std::size_t i = 0; i < kept.size(); ++i) work(i);
    } else {
      std::vector<std::thread> pool;
      for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t i = w; i < kept.size(); i += workers) work(i);
        });
      }
      for (std::thread& t : pool) t.join();
    }

    PermuteNotes sum;
    for (const PermuteNotes& n : notes) {
      sum.dropped_range_lines += n.dropped_range_lines;
      sum.cleared_deps += n.cleared_deps;
    }
    write_conllu_file(dir / (name + "-ud-" + split + ".conllu"), out);

    put(split + ".sentences", std::to_string(total));
    put(split + ".kept", std::to_string(filtered.report.kept));
    put(split + ".dropped_nonprojective", std::to_string(filtered.report.nonprojective));
    put(split + ".dropped_fanout", std::to_string(filtered.report.high_fanout));
    put(split + ".multiword_lines_dropped", std::to_string(sum.dropped_range_lines));
    put(split + ".deps_cleared", std::to_string(sum.cleared_deps));
    for (const auto& [id, reason] : filtered.report.dropped) {
      dropped_lines.push_back(split + ":" + id + ":" + reason);
    }
  }
  for (const std::string& line : dropped_lines) put("dropped", line);

  std::ofstream mf(dir / "manifest.tsv", std::ios::binary | std::ios::trunc);
  if (!mf) throw IoError("cannot write manifest in " + dir.string());
  mf << manifest;
  return dir;
}

}  // namespace galactic
