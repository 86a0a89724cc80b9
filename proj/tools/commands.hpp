// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli.hpp"

namespace nbcav::cli {

using Action = std::function<int()>;

/// Output options shared by every command.
struct CommonArgs {
  std::string output = "-";
  std::string format = "json";
  std::vector<std::string> sets;
};

void addCommonOptions(CLI::App* sub, CommonArgs& args, bool withSet);

void addResonatorCommands(CLI::App& app, Action& action);
void addSpectroscopyCommands(CLI::App& app, Action& action);
void addXpsCommands(CLI::App& app, Action& action);
void addSynthCommands(CLI::App& app, Action& action);

}  // namespace nbcav::cli
