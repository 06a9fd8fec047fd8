// Copyright 2026 The SWAF Authors.
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

// Command-line driver: ingest, train, predict, score, vote-sweep, synth.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 incompatible model.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swaf/io.h"
#include "swaf/model.h"
#include "swaf/pipeline.h"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kIncompatible = 3 };

struct Flags {
  std::string task;
  std::vector<std::string> inputs;
  std::string gold;
  std::string docs;
  std::string model;
  std::string out;
  std::optional<uint64_t> seed;
  std::string config;
};

void AddFlags(CLI::App *cmd, Flags &flags) {
  cmd->add_option("--task", flags.task, "slotfill | entitylink | detection");
  cmd->add_option("--inputs", flags.inputs, "system output files")
      ->delimiter(',');
  cmd->add_option("--gold", flags.gold, "gold standard file");
  cmd->add_option("--docs", flags.docs, "document store file");
  cmd->add_option("--model", flags.model, "model file");
  cmd->add_option("--out", flags.out, "output file or directory");
  cmd->add_option("--seed", flags.seed, "random seed");
  cmd->add_option("--config", flags.config, "key = value config file");
}

swaf::RunConfig Resolve(const Flags &flags) {
  swaf::RunConfig run;
  if (!flags.config.empty()) swaf::ApplyConfig(swaf::ReadConfig(flags.config), run);
  if (!flags.task.empty()) {
    try {
      run.task = swaf::ParseTaskKind(flags.task);
    } catch (const swaf::Error &e) {
      throw swaf::Error(swaf::ErrorCode::kInvalidSpec, e.message());
    }
    run.task_set = true;
  }
  if (!flags.inputs.empty()) run.inputs = flags.inputs;
  if (!flags.gold.empty()) run.gold = flags.gold;
  if (!flags.docs.empty()) run.docs = flags.docs;
  if (!flags.model.empty()) run.model = flags.model;
  if (!flags.out.empty()) run.out = flags.out;
  if (flags.seed) run.seed = *flags.seed;
  if (run.categories && run.categories->task() != run.task) {
    throw swaf::Error(swaf::ErrorCode::kInvalidSpec,
                      "category inventory does not match the task");
  }
  return run;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Stacking with auxiliary features for multi-system fusion"};
  app.require_subcommand(1);
  Flags flags;

  struct Mode {
    const char *name;
    const char *help;
    void (*run)(const swaf::RunConfig &);
    bool needs_task;
  };
  const Mode modes[] = {
      {"ingest", "validate and normalize system outputs", swaf::RunIngest, true},
      {"train", "train the stacker against gold", swaf::RunTrain, true},
      {"predict", "fuse system outputs with a trained model",
       swaf::RunPredict, false},
      {"score", "score each system against gold", swaf::RunScore, true},
      {"vote-sweep", "oracle voting threshold sweep", swaf::RunVoteSweep, true},
      {"synth", "generate a synthetic train/test ensemble", swaf::RunSynth,
       true},
  };
  std::vector<std::pair<CLI::App *, const Mode *>> commands;
  for (const auto &mode : modes) {
    CLI::App *cmd = app.add_subcommand(mode.name, mode.help);
    AddFlags(cmd, flags);
    commands.emplace_back(cmd, &mode);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  for (const auto &[cmd, mode] : commands) {
    if (!cmd->parsed()) continue;
    try {
      swaf::RunConfig run = Resolve(flags);
      if (mode->needs_task && !run.task_set) {
        std::cerr << "swaf " << mode->name << ": --task is required\n";
        return kUsage;
      }
      mode->run(run);
      return kOk;
    } catch (const swaf::Error &e) {
      std::cerr << "swaf " << mode->name << ": " << e.what() << '\n';
      switch (e.code()) {
        case swaf::ErrorCode::kIncompatibleModel:
          return kIncompatible;
        case swaf::ErrorCode::kInvalidSpec:
          return kUsage;
        default:
          return kDataError;
      }
    } catch (const std::exception &e) {
      std::cerr << "swaf " << mode->name << ": " << e.what() << '\n';
      return kDataError;
    }
  }
  return kUsage;
}
