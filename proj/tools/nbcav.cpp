// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <iostream>

#include "commands.hpp"

namespace nbcav::cli {

void addCommonOptions(CLI::App* sub, CommonArgs& args, bool withSet) {
  sub->add_option("-o,--output", args.output, "output file ('-' for stdout)");
  sub->add_option("--format", args.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  if (withSet) {
    sub->add_option("--set", args.sets, "parameter override key=value (repeatable)")
        ->allow_extra_args(false);
  }
}

}  // namespace nbcav::cli

int main(int argc, char** argv) {
  using namespace nbcav::cli;
  CLI::App app{"Characterization toolkit for superconducting cavities and Nb surface chemistry", "nbcav"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  Action action;
  addResonatorCommands(app, action);
  addSpectroscopyCommands(app, action);
  addXpsCommands(app, action);
  addSynthCommands(app, action);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << errorJson(kExitFormat, "usage_error", e.what(), "").dump() << '\n';
    return kExitFormat;
  }
  if (!action) {
    std::cerr << errorJson(kExitFormat, "usage_error", "no command given", "").dump() << '\n';
    return kExitFormat;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    auto [code, kind] = classifyCurrentException();
    std::cerr << errorJson(code, kind, e.what(), "").dump() << '\n';
    return code;
  }
}
