// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <sstream>

#include "commands.hpp"
#include "nbcav/etchcalc.hpp"
#include "nbcav/xps.hpp"

namespace nbcav::cli {

namespace {

struct XpsFitArgs {
  CommonArgs common;
  std::string input;
  std::string doublets;
  std::optional<double> c1s;
  std::optional<double> windowLo, windowHi;
  double positionWindow = 0.5;
  bool fixedPositions = false;
  bool fixedWidths = false;
};

struct ThicknessArgs {
  CommonArgs common;
  std::string input;
  std::string mode;
  std::optional<double> nmPerCycle;
  double band = 0.05;
  int tail = 3;
  std::string prefactor = "oxide";
};

struct SputterArgs {
  CommonArgs common;
  double filmNm = 0.0;
  int cycles = 0;
  double dwellS = 0.0;
};

struct FileArgs {
  CommonArgs common;
  std::string input;
};

Outcome xpsFitJob(const std::string& path, const XpsFitArgs& a, const std::vector<DoubletSpec>& doublets) {
  std::istringstream in(readInput(path));
  XpsSpectrum spectrum = io::readXpsSpectrum(in, sourceName(path));
  if (path != "-" && fileExists(io::sidecarPath(path))) {
    io::applyXpsSidecar(spectrum, io::readJsonFile(io::sidecarPath(path)));
  }
  spectrum.validate();
  double shift = 0.0;
  if (a.c1s) {
    spectrum = chargeCorrect(spectrum, *a.c1s);
    shift = kAdventitiousCarbonEv - *a.c1s;
  }
  const auto [eMin, eMax] = std::minmax_element(spectrum.bindingEnergy.begin(), spectrum.bindingEnergy.end());
  const double lo = a.windowLo.value_or(*eMin);
  const double hi = a.windowHi.value_or(*eMax);
  const ShirleyBackground bg = shirleyBackground(spectrum, lo, hi);

  Nb3dFitOptions opts;
  opts.positionWindow = a.positionWindow;
  opts.fitPositions = !a.fixedPositions;
  opts.fitWidths = !a.fixedWidths;
  Nb3dFit fit = fitNb3d(bg.subtracted(), doublets, opts);
  if (!bg.converged) fit.fit.addWarning("Shirley background did not converge");

  Json species = Json::array();
  for (std::size_t i = 0; i < fit.doublets.size(); ++i) {
    const auto& d = fit.doublets[i];
    const std::string name(speciesName(d.species));
    Json s;
    s["species"] = name;
    s["area"] = io::number(d.area);
    s["area_sigma"] = io::number(fit.fit.sigma("area_" + name));
    s["fraction"] = io::number(fit.fractions[i]);
    s["position_52_ev"] = io::number(d.position52);
    s["position_32_ev"] = io::number(d.position52 + kNb3dSplitting);
    s["fwhm_ev"] = io::number(d.fwhm);
    species.push_back(std::move(s));
  }
  Outcome o;
  o.result["sputter_cycle"] = spectrum.sputterCycle;
  o.result["dwell_s"] = io::number(spectrum.dwellPerCycle);
  o.result["charge_shift_ev"] = io::number(shift);
  o.result["shirley"] = {{"window_ev", {io::number(lo), io::number(hi)}},
                         {"level_lo", io::number(bg.levelLo)},
                         {"level_hi", io::number(bg.levelHi)},
                         {"iterations", bg.iterations},
                         {"residual", io::number(bg.residual)},
                         {"converged", bg.converged}};
  o.result["species"] = std::move(species);
  o.result["fit"] = io::fitResultToJson(fit.fit);
  o.exitCode = (fit.fit.converged && bg.converged) ? kExitOk : kExitNotConverged;
  return o;
}

Outcome directThicknessJob(const std::string& path, const ThicknessArgs& a) {
  if (!a.nmPerCycle) throw DomainError("--mode direct needs --nm-per-cycle");
  std::istringstream in(readInput(path));
  const auto profile = io::readDepthProfile(in, sourceName(path));
  DirectThicknessOptions opts;
  opts.relativeBand = a.band;
  opts.tailPoints = a.tail;
  const DirectThickness t = oxideThicknessDirect(profile, *a.nmPerCycle, opts);
  Outcome o;
  o.result["mode"] = "direct";
  o.result["thickness_nm"] = io::number(t.nm);
  o.result["fractional_cycle"] = io::number(t.fractionalCycle);
  o.result["plateau"] = io::number(t.plateau);
  o.result["resolved"] = t.resolved;
  o.result["nm_per_cycle"] = io::number(*a.nmPerCycle);
  return o;
}

Outcome indirectThicknessJob(const std::string& path, const ThicknessArgs& a) {
  std::istringstream in(readInput(path));
  const Json j = io::readJson(in, sourceName(path));
  const ImfpPrefactor prefactor = a.prefactor == "metal" ? ImfpPrefactor::Metal : ImfpPrefactor::Oxide;
  std::vector<Json> records;
  if (j.is_array()) {
    for (const auto& r : j) records.push_back(r);
  } else {
    records.push_back(j);
  }
  if (records.empty()) throw FormatError("thickness inputs are empty");
  std::vector<ThicknessInputs> inputs;
  Json species = Json::array();
  for (const auto& r : records) {
    inputs.push_back(io::thicknessInputsFromJson(r));
    const IndirectThickness t = oxideThicknessIndirect(inputs.back(), prefactor);
    Json s;
    s["species"] = r.contains("species") ? r.at("species") : Json(nullptr);
    s["thickness_nm"] = t.infinite ? Json(nullptr) : io::number(t.nm);
    s["infinite"] = t.infinite;
    species.push_back(std::move(s));
  }
  const IndirectThickness total = totalOxideThicknessIndirect(inputs, prefactor);
  Outcome o;
  o.result["mode"] = "indirect";
  o.result["prefactor"] = a.prefactor;
  o.result["species"] = std::move(species);
  o.result["thickness_nm"] = total.infinite ? Json(nullptr) : io::number(total.nm);
  o.result["infinite"] = total.infinite;
  return o;
}

HeightMap readHeightMapFile(const std::string& path) {
  std::istringstream in(readInput(path));
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") {
    return io::readHeightMapBinary(in, sourceName(path));
  }
  return io::readHeightMapCsv(in, sourceName(path));
}

}  // namespace

void addXpsCommands(CLI::App& app, Action& action) {
  auto* xps = app.add_subcommand("xps", "Nb 3d spectra and oxide thickness");
  xps->require_subcommand(1);
  {
    auto args = std::make_shared<XpsFitArgs>();
    auto* sub = xps->add_subcommand("fit", "Shirley background and constrained doublet fit (be_ev,counts)");
    sub->add_option("input", args->input, "spectrum file, directory or '-'")->required();
    sub->add_option("--doublets", args->doublets, "doublet configuration JSON (default: shipped table)");
    sub->add_option("--c1s", args->c1s, "measured adventitious C 1s position (eV) for charge correction");
    sub->add_option("--window-lo", args->windowLo, "Shirley window low end (eV)");
    sub->add_option("--window-hi", args->windowHi, "Shirley window high end (eV)");
    sub->add_option("--position-window", args->positionWindow, "allowed shift of each doublet (eV)");
    sub->add_flag("--fixed-positions", args->fixedPositions, "hold positions at the configured values");
    sub->add_flag("--fixed-widths", args->fixedWidths, "hold widths at the configured values");
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        const std::string table = args->doublets.empty() ? defaultDoubletPath() : args->doublets;
        const auto doublets = io::readDoublets(table);
        RunSpec spec{"xps fit", args->input, {".csv"}, true, args->common.output, args->common.format, ""};
        spec.options = {{"doublets", args->doublets.empty() ? Json("default") : Json(args->doublets)},
                        {"c1s_ev", args->c1s ? io::number(*args->c1s) : Json(nullptr)},
                        {"position_window_ev", io::number(args->positionWindow)},
                        {"fixed_positions", args->fixedPositions},
                        {"fixed_widths", args->fixedWidths}};
        return run(spec, [&](const std::string& path) { return xpsFitJob(path, *args, doublets); });
      };
    });
  }
  {
    auto args = std::make_shared<ThicknessArgs>();
    auto* sub = xps->add_subcommand("thickness", "oxide thickness from a depth profile or intensity ratios");
    sub->add_option("input", args->input,
                    "direct: profile CSV (cycle,oxygen_fraction); indirect: inputs JSON")
        ->required();
    sub->add_option("--mode", args->mode, "direct or indirect")
        ->required()
        ->check(CLI::IsMember({"direct", "indirect"}));
    sub->add_option("--nm-per-cycle", args->nmPerCycle, "sputter depth per cycle (direct)");
    sub->add_option("--band", args->band, "relative band around the plateau (direct)");
    sub->add_option("--tail", args->tail, "points averaged for the plateau (direct)");
    sub->add_option("--prefactor", args->prefactor, "IMFP prefactor: oxide or metal (indirect)")
        ->check(CLI::IsMember({"oxide", "metal"}));
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        const bool direct = args->mode == "direct";
        RunSpec spec{"xps thickness", args->input, {direct ? ".csv" : ".json"}, true, args->common.output,
                     args->common.format, ""};
        if (direct) {
          spec.options = {{"mode", "direct"},
                          {"nm_per_cycle", args->nmPerCycle ? io::number(*args->nmPerCycle) : Json(nullptr)},
                          {"band", io::number(args->band)},
                          {"tail", args->tail}};
          return run(spec, [&](const std::string& path) { return directThicknessJob(path, *args); });
        }
        spec.options = {{"mode", "indirect"}, {"prefactor", args->prefactor}};
        return run(spec, [&](const std::string& path) { return indirectThicknessJob(path, *args); });
      };
    });
  }
  {
    auto args = std::make_shared<SputterArgs>();
    auto* sub = xps->add_subcommand("sputter-cal", "sputter rate from a film of known thickness");
    sub->add_option("--film-nm", args->filmNm, "film thickness (nm)")->required();
    sub->add_option("--cycles", args->cycles, "sputter cycles to reach the substrate")->required();
    sub->add_option("--dwell-s", args->dwellS, "sputter time per cycle (s)")->required();
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        RunSpec spec{"xps sputter-cal", "", {}, false, args->common.output, args->common.format, ""};
        spec.options = {{"film_nm", io::number(args->filmNm)},
                        {"cycles", args->cycles},
                        {"dwell_s", io::number(args->dwellS)}};
        return run(spec, [&](const std::string&) {
          const SputterRate r = sputterRateCalibration(args->filmNm, args->cycles, args->dwellS);
          Outcome o;
          o.result["angstrom_per_second"] = io::number(r.angstromPerSecond);
          o.result["angstrom_per_second_lo"] = io::number(r.lo);
          o.result["angstrom_per_second_hi"] = io::number(r.hi);
          o.result["nm_per_cycle"] = io::number(args->filmNm / args->cycles);
          return o;
        });
      };
    });
  }
  {
    auto args = std::make_shared<FileArgs>();
    auto* sub = app.add_subcommand("roughness", "Ra and RMS of a height map (CSV grid or .bin raster)");
    sub->add_option("input", args->input, "height map, directory or '-' (CSV)")->required();
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        RunSpec spec{"roughness", args->input, {".csv", ".bin"}, true, args->common.output, args->common.format, ""};
        return run(spec, [&](const std::string& path) {
          const HeightMap map = readHeightMapFile(path);
          const Roughness r = roughnessStats(map);
          Outcome o;
          o.result["ra_m"] = io::number(r.ra);
          o.result["rms_m"] = io::number(r.rms);
          o.result["ra_nm"] = io::number(r.ra * 1e9);
          o.result["rms_nm"] = io::number(r.rms * 1e9);
          o.result["rows"] = map.rows;
          o.result["cols"] = map.cols;
          o.result["pixel_pitch_m"] = io::number(map.pixelPitch);
          return o;
        });
      };
    });
  }
  {
    auto* etch = app.add_subcommand("etch", "etch-bath budgeting");
    etch->require_subcommand(1);
    auto args = std::make_shared<FileArgs>();
    auto* sub = etch->add_subcommand("budget", "dissolved Nb and dissipated power for an etch plan");
    sub->add_option("input", args->input, "plan JSON, directory or '-'")->required();
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        RunSpec spec{"etch budget", args->input, {".json"}, true, args->common.output, args->common.format, ""};
        return run(spec, [&](const std::string& path) {
          std::istringstream in(readInput(path));
          const EtchPlan plan = io::etchPlanFromJson(io::readJson(in, sourceName(path)));
          const DissolvedNb nb = dissolvedConcentration(plan);
          const DissipatedPower p = dissipatedPower(plan);
          Outcome o;
          o.result["plan"] = io::etchPlanToJson(plan);
          o.result["dissolved_nb"] = {{"grams", io::number(nb.grams)},
                                      {"grams_per_liter", io::number(nb.gramsPerLiter)},
                                      {"below_limit", nb.belowLimit},
                                      {"below_design", nb.belowDesign},
                                      {"limit_g_per_l", io::number(kDissolvedNbLimit)},
                                      {"design_g_per_l", io::number(kDissolvedNbDesign)}};
          o.result["dissipated_power_w"] = {{"lo", io::number(p.lo)}, {"hi", io::number(p.hi)}};
          return o;
        });
      };
    });
  }
}

}  // namespace nbcav::cli
