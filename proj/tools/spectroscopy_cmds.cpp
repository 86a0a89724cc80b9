// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <cmath>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "nbcav/dispersive.hpp"

namespace nbcav::cli {

namespace {

struct NumberSplitArgs {
  CommonArgs common;
  std::string input;
  std::string kappa = "0";
};

struct T1Args {
  CommonArgs common;
  std::string input;
};

}  // namespace

void addSpectroscopyCommands(CLI::App& app, Action& action) {
  {
    auto args = std::make_shared<NumberSplitArgs>();
    auto* sub = app.add_subcommand("fit-numbersplit",
                                   "fit a photon-number-split qubit spectrum (detuning_hz,population)");
    sub->add_option("input", args->input, "spectrum file, directory or '-'")->required();
    sub->add_option("--kappa", args->kappa, "cavity linewidth added per photon, held fixed (Hz)");
    addCommonOptions(sub, args->common, true);
    sub->callback([args, &action] {
      action = [args] {
        const Overrides overrides(args->common.sets, {"chi", "nbar", "qubitT2", "amplitude"});
        const double kappa = parseFrequency(args->kappa, "--kappa");
        RunSpec spec{"fit-numbersplit", args->input, {".csv"}, true, args->common.output,
                     args->common.format, ""};
        spec.options = {{"kappa_hz", io::number(kappa)}, {"set", overrides.toJson()}};
        return run(spec, [&](const std::string& path) {
          std::istringstream in(readInput(path));
          const QubitSpectrum spectrum = io::readQubitSpectrum(in, sourceName(path));
          spectrum.validate();
          DispersiveParams g = estimateNumberSplitGuess(spectrum);
          g.cavityKappa = kappa;
          g.chi = overrides.get("chi", g.chi);
          g.nbar = overrides.get("nbar", g.nbar);
          g.qubitT2 = overrides.get("qubitT2", g.qubitT2);
          g.amplitude = overrides.get("amplitude", g.amplitude);
          NumberSplitFitOptions opts;
          opts.guess = g;
          FitResult fit = fitNumberSplit(spectrum, opts);
          const DispersiveParams p = dispersiveParamsFrom(fit, kappa);
          Json d;
          d["chi_khz"] = io::number(p.chi * 1e-3);
          d["qubit_t2_us"] = io::number(p.qubitT2 * 1e6);
          d["vacuum_linewidth_hz"] = io::number(peakLinewidth(p, 0));
          d["chi_t2_pi"] = io::number(p.chi * p.qubitT2 * std::numbers::pi);
          d["resolved"] = isResolved(p);
          Outcome o;
          o.result["fit"] = io::fitResultToJson(fit);
          o.result["derived"] = std::move(d);
          o.exitCode = fit.converged ? kExitOk : kExitNotConverged;
          return o;
        });
      };
    });
  }
  {
    auto args = std::make_shared<T1Args>();
    auto* sub = app.add_subcommand("fit-t1", "fit the vacuum-peak revival (delay_s,vacuum_weight)");
    sub->add_option("input", args->input, "points file, directory or '-'")->required();
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        RunSpec spec{"fit-t1", args->input, {".csv"}, true, args->common.output, args->common.format, ""};
        return run(spec, [&](const std::string& path) {
          std::istringstream in(readInput(path));
          const VacuumRevival points = io::readVacuumRevival(in, sourceName(path));
          const FitResult fit = fitCavityT1(points);
          Json d;
          d["t1_ms"] = io::number(fit.value("t1") * 1e3);
          d["t1_sigma_ms"] = io::number(fit.sigma("t1") * 1e3);
          Outcome o;
          o.result["fit"] = io::fitResultToJson(fit);
          o.result["derived"] = std::move(d);
          o.exitCode = fit.converged ? kExitOk : kExitNotConverged;
          return o;
        });
      };
    });
  }
}

}  // namespace nbcav::cli
