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

#include <gtest/gtest.h>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "test_support.h"

namespace galactic {
namespace {

namespace fs = std::filesystem;
using testing::data_dir;
using testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result galactic_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "galactic");
  std::ostringstream out, err;
  const int code = cli::main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    files[e.path().filename().string()] = slurp(e.path());
  }
  return files;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

TEST(CliHelp, EveryRegisteredFlagIsDocumented) {
  cli::RunConfig config;
  const auto app = cli::make_app(config);
  const auto subs = app->get_subcommands({});
  ASSERT_EQ(subs.size(), 7u);
  for (const CLI::App* sub : subs) {
    const Result help = galactic_cli({sub->get_name(), "--help"});
    EXPECT_EQ(help.code, 0) << sub->get_name();
    for (const CLI::Option* opt : sub->get_options()) {
      for (const std::string& name : opt->get_lnames()) {
        EXPECT_NE(help.out.find("--" + name), std::string::npos)
            << sub->get_name() << " --" << name;
      }
      EXPECT_FALSE(opt->get_description().empty()) << sub->get_name() << " " << opt->get_name();
    }
    for (const char* code : {"  2  usage", "  3  I/O", "  4  parse", "  5  model",
                             "  6  validation", "  7  undefined"}) {
      EXPECT_NE(help.out.find(code), std::string::npos) << sub->get_name();
    }
  }
  const Result top = galactic_cli({"--help"});
  EXPECT_EQ(top.code, 0);
  for (const CLI::App* sub : subs) {
    EXPECT_NE(top.out.find(sub->get_name()), std::string::npos);
  }
}

TEST(CliHelp, UsageErrors) {
  EXPECT_EQ(galactic_cli({}).code, cli::kExitUsage);
  EXPECT_EQ(galactic_cli({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(galactic_cli({"train", "--out", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(galactic_cli({"train", "--treebank", "x", "--out", "y", "--bogus"}).code,
            cli::kExitUsage);
  EXPECT_EQ(galactic_cli({"permute", "--spec", "en", "--treebanks", "t", "--models", "m",
                          "--out", "o", "--lambda", "1.5"}).code,
            cli::kExitUsage);
}

TEST(CliHelp, DefaultsAndEnvironment) {
  cli::RunConfig config;
  auto app = cli::make_app(config);
  app->parse("permute --spec en --treebanks t --models m --out o", false);
  EXPECT_EQ(config.subcommand, "permute");
  EXPECT_EQ(config.seed, 0u);
  EXPECT_EQ(config.lambda, 0.05);
  EXPECT_EQ(config.oov_threshold, 10);
  EXPECT_FALSE(config.lenient);
  EXPECT_EQ(config.jobs, 1);

  ::setenv("GALACTIC_JOBS", "3", 1);
  cli::RunConfig with_env;
  auto app2 = cli::make_app(with_env);
  app2->parse("permute --spec en --treebanks t --models m --out o", false);
  ::unsetenv("GALACTIC_JOBS");
  EXPECT_EQ(with_env.jobs, 3);
}

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    models_ = new TempDir("cli-models");
    for (const char* lang : {"en", "fr", "hi"}) {
      const Result r = galactic_cli({"train", "--treebank", (data_dir() / lang).string(),
                                     "--out", models_->path().string(),
                                     "--max-iterations", "60"});
      ASSERT_EQ(r.code, 0) << r.err;
    }
  }
  static void TearDownTestSuite() {
    delete models_;
    models_ = nullptr;
  }
  static std::string models() { return models_->path().string(); }
  static TempDir* models_;
};
TempDir* Cli::models_ = nullptr;

TEST_F(Cli, TrainWritesBothModels) {
  EXPECT_EQ(lines(slurp(fs::path(models()) / "en.N.model"))[1], "#pos N");
  EXPECT_EQ(lines(slurp(fs::path(models()) / "en.V.model"))[1], "#pos V");
  EXPECT_EQ(lines(slurp(fs::path(models()) / "hi.V.model"))[0], "#lang hi");

  TempDir out("train-file");
  const Result r = galactic_cli({"train", "--treebank",
                                 (data_dir() / "fr" / "fr-ud-train.conllu").string(), "--out",
                                 out.path().string(), "--max-iterations", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out.path() / "fr.N.model"));
  EXPECT_TRUE(fs::exists(out.path() / "fr.V.model"));
  EXPECT_EQ(lines(r.out).size(), 3u);
}

TEST_F(Cli, TrainErrors) {
  TempDir out("train-errors");
  EXPECT_EQ(galactic_cli({"train", "--treebank", "/nonexistent", "--out",
                          out.path().string()}).code,
            cli::kExitIo);
  const fs::path bad = out.path() / "xx-ud-train.conllu";
  std::ofstream(bad) << "1\ta\ta\tNOPE\t_\t_\t0\troot\t_\t_\n";
  EXPECT_EQ(galactic_cli({"train", "--treebank", bad.string(), "--out",
                          out.path().string()}).code,
            cli::kExitParse);
}

TEST_F(Cli, PermuteIsByteIdenticalAcrossRuns) {
  TempDir a("perm-a"), b("perm-b");
  for (const TempDir* out : {&a, &b}) {
    const Result r = galactic_cli({"permute", "--spec", "en~fr@N~hi@V", "--seed", "0",
                                   "--treebanks", data_dir().string(), "--models", models(),
                                   "--out", out->path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  const auto first = directory_bytes(a.path() / "en~fr@N~hi@V");
  EXPECT_EQ(first.size(), 4u);
  EXPECT_EQ(first, directory_bytes(b.path() / "en~fr@N~hi@V"));
}

TEST_F(Cli, PermuteErrors) {
  TempDir out("perm-errors");
  auto permute = [&](const std::string& spec, const std::string& root) {
    return galactic_cli({"permute", "--spec", spec, "--treebanks", root, "--models",
                         models(), "--out", out.path().string()})
        .code;
  };
  EXPECT_EQ(permute("en~de@N", data_dir().string()), cli::kExitModel);
  EXPECT_EQ(permute("en~hi@V~fr@N", data_dir().string()), cli::kExitModel);
  EXPECT_EQ(permute("xx~hi@V", data_dir().string()), cli::kExitModel);
  EXPECT_EQ(permute("en~hi@V", "/nonexistent"), cli::kExitIo);
}

TEST_F(Cli, BatchMatchesPermuteAndKeepsOrder) {
  TempDir work("batch");
  const fs::path specs = work.path() / "specs.txt";
  std::ofstream(specs) << "# three specs\nen~hi@V\n\nfr~en@N~hi@V\nen\nen~zz@N\n";
  const fs::path out = work.path() / "out";
  const Result r = galactic_cli({"batch", "--specs", specs.string(), "--treebanks",
                                 data_dir().string(), "--models", models(), "--out",
                                 out.string(), "--jobs", "3"});
  EXPECT_EQ(r.code, cli::kExitModel);
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[1].substr(0, 11), "en~hi@V\tok\t");
  EXPECT_EQ(rows[2].substr(0, 16), "fr~en@N~hi@V\tok\t");
  EXPECT_EQ(rows[3].substr(0, 6), "en\tok\t");
  EXPECT_EQ(rows[4].substr(0, 14), "en~zz@N\terror\t");

  TempDir single("batch-single");
  ASSERT_EQ(galactic_cli({"permute", "--spec", "fr~en@N~hi@V", "--treebanks",
                          data_dir().string(), "--models", models(), "--out",
                          single.path().string()}).code,
            0);
  EXPECT_EQ(directory_bytes(out / "fr~en@N~hi@V"),
            directory_bytes(single.path() / "fr~en@N~hi@V"));
}

TEST_F(Cli, ValidateAcceptsOutputAndCatchesDamage) {
  TempDir out("validate");
  ASSERT_EQ(galactic_cli({"permute", "--spec", "en~hi@N~hi@V", "--treebanks",
                          data_dir().string(), "--models", models(), "--out",
                          out.path().string()}).code,
            0);
  const fs::path dir = out.path() / "en~hi@N~hi@V";
  const Result good = galactic_cli({"validate", "--dir", dir.string(), "--treebanks",
                                    data_dir().string()});
  EXPECT_EQ(good.code, 0) << good.out;
  EXPECT_EQ(good.out.find("FAIL"), std::string::npos);
  EXPECT_NE(good.out.find("train\tmatches_source\tok"), std::string::npos);

  const fs::path dev = dir / "en~hi@N~hi@V-ud-dev.conllu";
  std::string text = slurp(dev);
  const std::size_t at = text.find("OrigIdx=1\n");
  ASSERT_NE(at, std::string::npos);
  text.replace(at, 10, "OrigIdx=2\n");
  std::ofstream(dev, std::ios::binary | std::ios::trunc) << text;
  const Result bad = galactic_cli({"validate", "--dir", dir.string()});
  EXPECT_EQ(bad.code, cli::kExitValidation);
  EXPECT_NE(bad.out.find("dev\torig_idx\tFAIL"), std::string::npos);
}

TEST_F(Cli, StatsTable) {
  const Result r = galactic_cli({"stats", "--treebanks", data_dir().string(), "--models",
                                 models(), "--lang", "en", "--lang", "hi"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "language\tsents_kept\tsents_total\ttokens_kept\ttokens_total\tT\tR");
  EXPECT_EQ(rows[1].substr(0, 9), "en\t47\t50\t");
  std::istringstream hi(rows[2]);
  std::string lang;
  double kept, total, tok_kept, tok_total, t, rr;
  hi >> lang >> kept >> total >> tok_kept >> tok_total >> t >> rr;
  EXPECT_EQ(lang, "hi");
  EXPECT_GT(t, 0.8);
  EXPECT_LE(t, 1.0);
  EXPECT_GT(rr, 0.0);
  EXPECT_LT(rr, 1.0);
  EXPECT_EQ(galactic_cli({"stats", "--treebanks", data_dir().string(), "--models", models(),
                          "--lang", "de"}).code,
            cli::kExitIo);
}

TEST_F(Cli, PerplexityTrainSaveAndReload) {
  TempDir work("ppl");
  const fs::path lm = work.path() / "en.lm";
  const std::string train = (data_dir() / "en" / "en-ud-train.conllu").string();
  const std::string dev = (data_dir() / "en" / "en-ud-dev.conllu").string();
  const Result a = galactic_cli({"perplexity", "--train", train, "--eval", dev, "--save",
                                 lm.string()});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(fs::exists(lm));
  const Result b = galactic_cli({"perplexity", "--train", lm.string(), "--eval", dev});
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(lines(a.out)[1].substr(0, 7), "tag\t18\t");

  // French words are unseen by an English closed-vocabulary LM.
  const std::string fr_dev = (data_dir() / "fr" / "fr-ud-dev.conllu").string();
  const Result closed = galactic_cli({"perplexity", "--train", train, "--eval", fr_dev,
                                      "--mode", "word", "--oov-threshold", "0"});
  EXPECT_EQ(closed.code, cli::kExitModel);
  EXPECT_EQ(galactic_cli({"perplexity", "--train", train}).code, cli::kExitUsage);
}

TEST_F(Cli, SelectRanksCandidates) {
  TempDir work("select");
  const fs::path hi_lm = work.path() / "hi.lm";
  ASSERT_EQ(galactic_cli({"perplexity", "--train",
                          (data_dir() / "hi" / "hi-ud-train.conllu").string(), "--save",
                          hi_lm.string()}).code,
            0);
  const Result r = galactic_cli(
      {"select", "--candidate", "fr=" + (data_dir() / "fr" / "fr-ud-train.conllu").string(),
       "--candidate", "hi=" + hi_lm.string(), "--target",
       (data_dir() / "hi" / "hi-ud-test.conllu").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], "language\tlog2prob\trank");
  EXPECT_EQ(rows[1].substr(0, 3), "hi\t");
  EXPECT_EQ(rows[1].substr(rows[1].size() - 2), "\t1");
  EXPECT_EQ(galactic_cli({"select", "--candidate", "broken", "--target", "x"}).code,
            cli::kExitUsage);
}

}  // namespace
}  // namespace galactic
