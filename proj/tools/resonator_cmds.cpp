// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>
#include <filesystem>
#include <future>
#include <sstream>

#include "commands.hpp"
#include "nbcav/tls.hpp"

namespace nbcav::cli {

namespace {

namespace fs = std::filesystem;

const std::vector<std::string> kS11Keys{"f0",        "qInt",           "qCoupling",      "asymmetryPhase",
                                        "amplitude", "electricalDelay", "backgroundPhase"};

DelayMode parseDelayMode(const std::string& s) {
  if (s == "free") return DelayMode::Free;
  if (s == "frozen") return DelayMode::Frozen;
  return DelayMode::Auto;
}

int exitFor(const FitResult& fit) { return fit.converged ? kExitOk : kExitNotConverged; }

// Photon-number calibration for trace.csv lives in trace.attenuation.json.
std::string attenuationPath(const std::string& csvPath) {
  return (fs::path(csvPath).replace_extension("").string()) + ".attenuation.json";
}

struct S11Run {
  ComplexTrace trace;
  FitResult fit;
  ResonatorParams params;
  std::optional<io::AttenuationChain> chain;
};

S11Run fitS11File(const std::string& path, DelayMode delay, const Overrides& overrides) {
  S11Run r;
  std::istringstream in(readInput(path));
  r.trace = io::readComplexTrace(in, sourceName(path));
  if (path != "-" && fileExists(attenuationPath(path))) {
    r.chain = io::attenuationFromJson(io::readJsonFile(attenuationPath(path)));
  }
  S11FitOptions opts;
  opts.delay = delay;
  if (!overrides.empty()) {
    r.trace.validate();
    ResonatorParams g = estimateS11Guess(r.trace);
    g.f0 = overrides.get("f0", g.f0);
    g.qInt = overrides.get("qInt", g.qInt);
    g.qCoupling = overrides.get("qCoupling", g.qCoupling);
    g.asymmetryPhase = overrides.get("asymmetryPhase", g.asymmetryPhase);
    g.amplitude = overrides.get("amplitude", g.amplitude);
    g.electricalDelay = overrides.get("electricalDelay", g.electricalDelay);
    g.backgroundPhase = overrides.get("backgroundPhase", g.backgroundPhase);
    opts.guess = g;
  }
  r.fit = fitS11(r.trace, opts);
  r.params = resonatorParamsFrom(r.fit);
  return r;
}

Json s11Derived(const S11Run& r) {
  const auto& p = r.params;
  const double qL = p.qLoaded();
  Json d;
  d["f0_ghz"] = io::number(p.f0 * 1e-9);
  d["q_loaded"] = io::number(qL);
  d["linewidth_hz"] = io::number(p.f0 / qL);
  d["energy_decay_time_ms"] = io::number(qToEnergyDecayTime(qL, p.f0) * 1e3);
  d["over_coupled"] = p.qCoupling < p.qInt;
  if (r.chain) {
    const double power = deliveredPower(r.chain->sourceDbm, r.chain->attenuationDb);
    d["input_power_w"] = io::number(power);
    d["mean_photon_number"] = io::number(meanPhotonNumber(power, p));
  }
  return d;
}

struct S11Args {
  CommonArgs common;
  std::string input;
  std::string delay = "auto";
  std::string plot;
};

struct RingdownArgs {
  CommonArgs common;
  std::string input;
  std::string domain = "auto";
  std::optional<double> noiseFloor;
  std::string f0;
};

struct TlsArgs {
  CommonArgs common;
  std::string input;
  std::string f0;
  std::string geometry;
  bool freezeAlpha = false;
};

struct SurveyArgs {
  CommonArgs common;
  std::string input;
  std::string delay = "auto";
};

double sampleStd(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

Outcome surveyJob(const std::string& dir, DelayMode delay) {
  if (!isDirectory(dir)) throw FormatError("survey expects a directory, got '" + dir + "'");
  struct Item {
    std::string group, path;
  };
  std::vector<Item> items;
  for (const auto& f : listFiles(dir, {".csv"})) items.push_back({".", f});
  std::vector<std::string> subdirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) subdirs.push_back(e.path().string());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& s : subdirs) {
    for (const auto& f : listFiles(s, {".csv"})) items.push_back({fs::path(s).filename().string(), f});
  }
  if (items.empty()) throw FormatError("no .csv traces under '" + dir + "'");

  struct Row {
    std::optional<S11Run> run;
    int code = kExitOk;
    std::string kind, message;
  };
  std::vector<std::future<Row>> pending;
  for (const auto& it : items) {
    pending.push_back(std::async(std::launch::async, [path = it.path, delay] {
      Row row;
      try {
        row.run = fitS11File(path, delay, {});
        row.code = exitFor(row.run->fit);
      } catch (const std::exception& e) {
        std::tie(row.code, row.kind) = classifyCurrentException();
        row.message = e.what();
      }
      return row;
    }));
  }

  Outcome out;
  Json files = Json::array();
  std::map<std::string, std::vector<std::pair<double, double>>> byGroup;
  std::vector<std::string> groupOrder;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Row row = pending[i].get();
    Json f;
    f["input"] = items[i].path;
    f["group"] = items[i].group;
    f["status"] = row.code;
    if (row.run) {
      const auto& fit = row.run->fit;
      f["q_int"] = io::number(fit.value("qInt"));
      f["q_int_sigma"] = io::number(fit.sigma("qInt"));
      f["q_coupling"] = io::number(fit.value("qCoupling"));
      f["f0_hz"] = io::number(fit.value("f0"));
      f["converged"] = fit.converged;
      if (fit.converged) {
        if (!byGroup.count(items[i].group)) groupOrder.push_back(items[i].group);
        byGroup[items[i].group].emplace_back(fit.value("qInt"), fit.value("qCoupling"));
      }
    } else {
      f["error"] = errorJson(row.code, row.kind, row.message, items[i].path)["error"];
    }
    out.exitCode = std::max(out.exitCode, row.code);
    files.push_back(std::move(f));
  }

  Json groups = Json::array();
  std::string csv = "group,files,q_int_mean,q_int_std,q_coupling_mean,q_coupling_std\n";
  for (const auto& name : groupOrder) {
    const auto& v = byGroup[name];
    std::vector<double> qi, qc;
    for (const auto& [a, b] : v) {
      qi.push_back(a);
      qc.push_back(b);
    }
    const double mi = std::accumulate(qi.begin(), qi.end(), 0.0) / double(qi.size());
    const double mc = std::accumulate(qc.begin(), qc.end(), 0.0) / double(qc.size());
    const double si = qi.size() > 1 ? sampleStd(qi, mi) : kInf;
    const double sc = qc.size() > 1 ? sampleStd(qc, mc) : kInf;
    Json g;
    g["group"] = name;
    g["files"] = qi.size();
    g["q_int_mean"] = io::number(mi);
    g["q_int_std"] = io::number(si);
    g["q_coupling_mean"] = io::number(mc);
    g["q_coupling_std"] = io::number(sc);
    groups.push_back(std::move(g));
    auto cell = [](double x) { return std::isfinite(x) ? io::formatDouble(x) : std::string(); };
    csv += name + "," + std::to_string(qi.size()) + "," + cell(mi) + "," + cell(si) + "," + cell(mc) + "," +
           cell(sc) + "\n";
  }
  out.result["groups"] = std::move(groups);
  out.result["files"] = std::move(files);
  out.csv = csv;
  return out;
}

}  // namespace

void addResonatorCommands(CLI::App& app, Action& action) {
  {
    auto args = std::make_shared<S11Args>();
    auto* sub = app.add_subcommand("fit-s11", "fit a complex reflection trace (freq_hz,re,im)");
    sub->add_option("input", args->input, "trace file, directory or '-'")->required();
    sub->add_option("--delay", args->delay, "cable delay handling: auto, free or frozen")
        ->check(CLI::IsMember({"auto", "free", "frozen"}));
    sub->add_option("--plot", args->plot, "write an SVG of data and fit (a directory in batch mode)");
    addCommonOptions(sub, args->common, true);
    sub->callback([args, &action] {
      action = [args] {
        const Overrides overrides(args->common.sets, kS11Keys);
        RunSpec spec{"fit-s11", args->input, {".csv"}, true, args->common.output, args->common.format,
                     args->plot};
        spec.options = {{"delay", args->delay}, {"set", overrides.toJson()}};
        const DelayMode mode = parseDelayMode(args->delay);
        return run(spec, [&](const std::string& path) {
          S11Run r = fitS11File(path, mode, overrides);
          Outcome o;
          o.result["fit"] = io::fitResultToJson(r.fit);
          o.result["derived"] = s11Derived(r);
          o.exitCode = exitFor(r.fit);
          if (!args->plot.empty()) o.svg = s11Svg(r.trace, r.params);
          return o;
        });
      };
    });
  }
  {
    auto args = std::make_shared<RingdownArgs>();
    auto* sub = app.add_subcommand("fit-ringdown", "fit an energy ringdown (delay_s,power)");
    sub->add_option("input", args->input, "trace file, directory or '-'")->required();
    sub->add_option("--domain", args->domain, "auto, linear or log")
        ->check(CLI::IsMember({"auto", "linear", "log"}));
    sub->add_option("--noise-floor", args->noiseFloor, "detection noise floor in power units");
    sub->add_option("--f0", args->f0, "resonance frequency for the loaded Q, e.g. 6.5GHz");
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        RingdownFitOptions opts;
        opts.domain = args->domain == "linear" ? RingdownDomain::Linear
                      : args->domain == "log"  ? RingdownDomain::Log
                                               : RingdownDomain::Auto;
        opts.noiseFloor = args->noiseFloor;
        std::optional<double> f0;
        if (!args->f0.empty()) f0 = parseFrequency(args->f0, "--f0");
        RunSpec spec{"fit-ringdown", args->input, {".csv"}, true, args->common.output, args->common.format, ""};
        spec.options = {{"domain", args->domain},
                        {"noise_floor", args->noiseFloor ? io::number(*args->noiseFloor) : Json(nullptr)},
                        {"f0_hz", f0 ? io::number(*f0) : Json(nullptr)}};
        return run(spec, [&](const std::string& path) {
          std::istringstream in(readInput(path));
          const RingdownTrace trace = io::readRingdown(in, sourceName(path));
          const FitResult fit = fitRingdown(trace, opts);
          Outcome o;
          o.result["fit"] = io::fitResultToJson(fit);
          Json d;
          d["tau_ms"] = io::number(fit.value("tau") * 1e3);
          d["domain"] = fit.hasFlag("log_domain") ? "log" : "linear";
          if (f0) d["q_loaded"] = io::number(loadedQFromRingdown(fit.value("tau"), *f0));
          o.result["derived"] = std::move(d);
          o.exitCode = exitFor(fit);
          return o;
        });
      };
    });
  }
  {
    auto args = std::make_shared<TlsArgs>();
    auto* sub = app.add_subcommand("fit-tls", "fit Q_int against temperature (temp_k,q_int[,q_sigma])");
    sub->add_option("input", args->input, "series file, directory or '-'")->required();
    sub->add_option("--f0", args->f0, "resonance frequency, e.g. 6.5GHz")->required();
    sub->add_option("--geometry", args->geometry, "geometry JSON {s_e, s_m, t_ox_m, eps_r}");
    sub->add_flag("--freeze-alpha", args->freezeAlpha, "hold the exponent at 1");
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        const double f0 = parseFrequency(args->f0, "--f0");
        std::optional<CavityGeometry> geom;
        if (!args->geometry.empty()) geom = io::geometryFromJson(io::readJsonFile(args->geometry));
        TlsFitOptions opts;
        opts.freezeAlpha = args->freezeAlpha;
        RunSpec spec{"fit-tls", args->input, {".csv"}, true, args->common.output, args->common.format, ""};
        spec.options = {{"f0_hz", io::number(f0)},
                        {"geometry", args->geometry.empty() ? Json(nullptr) : Json(args->geometry)},
                        {"freeze_alpha", args->freezeAlpha}};
        return run(spec, [&](const std::string& path) {
          std::istringstream in(readInput(path));
          const TemperatureSeries series = io::readTemperatureSeries(in, sourceName(path));
          FitResult fit = fitTls(series, f0, opts);
          Json d;
          d["q_low_temperature_limit"] =
              io::number(1.0 / (1.0 / fit.value("q0") + fit.value("lossTangentProduct")));
          if (geom) {
            const double tanDelta = deriveLossTangent(fit.value("lossTangentProduct"), *geom);
            d["filling_factor"] = io::number(fillingFactor(*geom));
            d["loss_tangent"] = io::number(tanDelta);
            d["residual_resistance_ohm"] = io::number(deriveResidualResistance(fit.value("q0"), f0, geom->sM));
            if (tanDelta > kLossTangentSanityLimit) {
              fit.addWarning("derived loss tangent exceeds 0.1; check the geometry factors");
            }
          }
          Outcome o;
          o.result["fit"] = io::fitResultToJson(fit);
          o.result["derived"] = std::move(d);
          o.exitCode = exitFor(fit);
          return o;
        });
      };
    });
  }
  {
    auto args = std::make_shared<SurveyArgs>();
    auto* sub = app.add_subcommand(
        "survey", "fit every trace under a directory and summarise Q per subdirectory group");
    sub->add_option("input", args->input, "directory; each subdirectory is a group")->required();
    sub->add_option("--delay", args->delay, "cable delay handling: auto, free or frozen")
        ->check(CLI::IsMember({"auto", "free", "frozen"}));
    addCommonOptions(sub, args->common, false);
    sub->callback([args, &action] {
      action = [args] {
        RunSpec spec{"survey", args->input, {}, false, args->common.output, args->common.format, ""};
        spec.options = {{"delay", args->delay}};
        const DelayMode mode = parseDelayMode(args->delay);
        return run(spec, [&](const std::string& dir) { return surveyJob(dir, mode); });
      };
    });
  }
}

}  // namespace nbcav::cli
