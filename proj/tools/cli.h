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

#ifndef GALACTIC_TOOLS_CLI_H_
#define GALACTIC_TOOLS_CLI_H_

// The `galactic` command-line tool: train, permute, batch, stats,
// perplexity, select and validate.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace CLI {
class App;
}

namespace galactic::cli {

// Process exit statuses, listed in --help.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // anything not covered below
  kExitUsage = 2,       // bad flags or arguments
  kExitIo = 3,          // missing or unwritable file
  kExitParse = 4,       // malformed CoNLL-U, model or LM file
  kExitModel = 5,       // missing model, class mismatch, bad spec
  kExitValidation = 6,  // validate found a broken invariant
  kExitUndefined = 7,   // metric undefined on the input
};

struct RunConfig {
  std::string subcommand;

  std::filesystem::path treebank;       // train
  std::filesystem::path treebanks;      // permute, batch, stats, validate
  std::filesystem::path models;         // permute, batch, stats
  std::filesystem::path output;         // train, permute, batch
  std::filesystem::path dir;            // validate
  std::string lang;                     // train
  std::vector<std::string> languages;   // stats
  std::string spec;                     // permute
  std::filesystem::path specs_file;     // batch

  std::filesystem::path lm_train;       // perplexity
  std::filesystem::path lm_eval;        // perplexity
  std::filesystem::path lm_save;        // perplexity
  std::string lm_mode = "tag";          // perplexity
  std::vector<std::string> candidates;  // select: id=path
  std::filesystem::path target;         // select

  std::uint64_t seed = 0;
  double lambda = 0.05;
  int oov_threshold = 10;
  bool lenient = false;
  int jobs = 1;
  int max_iterations = 200;
  double tolerance = 1e-5;
};

// The flag parser. Parsed values are written into `config`.
std::unique_ptr<CLI::App> make_app(RunConfig& config);

// Executes a parsed configuration; reports go to `out`, diagnostics to
// `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv (program name first) and runs it.
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace galactic::cli

#endif  // GALACTIC_TOOLS_CLI_H_
