// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <fstream>
#include <iostream>
#include <sstream>

#include "commands.hpp"
#include "nbcav/synth.hpp"

namespace nbcav::cli {

namespace {

using Defaults = std::vector<std::pair<std::string, double>>;

struct SynthArgs {
  std::string output = "-";
  std::uint64_t seed = 0;
  double sigma = 0.0;
  std::string noise;  // empty: the generator's natural kind
  std::vector<std::string> sets;
  std::string doublets;
};

class Params {
 public:
  Params(const Defaults& defaults, const std::vector<std::string>& sets) : defaults_(defaults) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : defaults) keys.push_back(k);
    overrides_ = Overrides(sets, keys);
  }
  double operator[](std::string_view key) const {
    for (const auto& [k, v] : defaults_) {
      if (k == key) return overrides_.get(key, v);
    }
    throw std::logic_error("unknown synth parameter");
  }
  std::size_t count(std::string_view key) const {
    const double v = (*this)[key];
    if (!(v >= 2.0) || v != std::floor(v) || v > 1e8) {
      throw DomainError(std::string(key) + " must be an integer >= 2");
    }
    return static_cast<std::size_t>(v);
  }

 private:
  Defaults defaults_;
  Overrides overrides_;
};

synth::NoiseSpec noiseSpec(const SynthArgs& a, synth::NoiseKind natural) {
  synth::NoiseSpec n;
  n.kind = a.noise.empty()        ? natural
           : a.noise == "additive" ? synth::NoiseKind::Additive
                                   : synth::NoiseKind::Multiplicative;
  n.sigma = a.sigma;
  n.seed = a.seed;
  return n;
}

void emit(const SynthArgs& a, const std::string& generator, const std::string& body) {
  std::string text = "# nbcav " + std::string(kVersion) + " synth " + generator +
                     " seed=" + std::to_string(a.seed) + " sigma=" + io::formatDouble(a.sigma) + "\n" + body;
  if (a.output.empty() || a.output == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(a.output, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write '" + a.output + "'");
  f << text;
}

std::string s11(const SynthArgs& a) {
  const Params p({{"f0", 6.5e9},
                  {"qInt", 1.4e9},
                  {"qCoupling", 1.4e9},
                  {"asymmetryPhase", 0.0},
                  {"amplitude", 1.0},
                  {"electricalDelay", 0.0},
                  {"backgroundPhase", 0.0},
                  {"span_linewidths", 10.0},
                  {"points", 201}},
                 a.sets);
  ResonatorParams r{p["f0"], p["qInt"], p["qCoupling"], p["asymmetryPhase"],
                    p["amplitude"], p["electricalDelay"], p["backgroundPhase"]};
  r.validate();
  const double half = 0.5 * p["span_linewidths"] * r.f0 / r.qLoaded();
  const auto f = synth::linspace(r.f0 - half, r.f0 + half, p.count("points"));
  std::ostringstream out;
  io::writeComplexTrace(out, synth::genS11(r, f, noiseSpec(a, synth::NoiseKind::Additive)));
  return out.str();
}

std::string ringdown(const SynthArgs& a) {
  const Params p({{"tau", 0.012}, {"amplitude", 1.0}, {"offset", 0.0}, {"span_taus", 3.0}, {"points", 60}},
                 a.sets);
  const auto t = synth::linspace(0.0, p["span_taus"] * p["tau"], p.count("points"));
  std::ostringstream out;
  io::writeRingdown(out, synth::genDecay(p["tau"], p["amplitude"], p["offset"], t,
                                         noiseSpec(a, synth::NoiseKind::Multiplicative)));
  return out.str();
}

std::string tls(const SynthArgs& a) {
  const Params p({{"q0", 4e9},
                  {"lossTangentProduct", 5e-10},
                  {"alpha", 1.0},
                  {"f0", 6.5e9},
                  {"t_min_k", 0.01},
                  {"t_max_k", 1.0},
                  {"points", 30}},
                 a.sets);
  const TlsParams t{p["q0"], p["lossTangentProduct"], p["alpha"], p["f0"]};
  const auto temps = synth::linspace(p["t_min_k"], p["t_max_k"], p.count("points"));
  std::ostringstream out;
  io::writeTemperatureSeries(
      out, synth::genTemperatureSeries(t, temps, noiseSpec(a, synth::NoiseKind::Multiplicative)));
  return out.str();
}

std::string numbersplit(const SynthArgs& a) {
  const Params p({{"chi", 28e3},
                  {"nbar", 1.0},
                  {"qubitT2", 29e-6},
                  {"cavityKappa", 0.0},
                  {"amplitude", 1.0},
                  {"det_min_hz", -150e3},
                  {"det_max_hz", 30e3},
                  {"points", 361}},
                 a.sets);
  DispersiveParams d;
  d.chi = p["chi"];
  d.nbar = p["nbar"];
  d.qubitT2 = p["qubitT2"];
  d.cavityKappa = p["cavityKappa"];
  d.amplitude = p["amplitude"];
  const auto det = synth::linspace(p["det_min_hz"], p["det_max_hz"], p.count("points"));
  std::ostringstream out;
  io::writeQubitSpectrum(out, synth::genQubitSpectrum(d, det, noiseSpec(a, synth::NoiseKind::Additive)));
  return out.str();
}

std::string t1(const SynthArgs& a) {
  const Params p({{"nbar0", 1.0}, {"t1", 0.0113}, {"t_max_s", 0.04}, {"points", 25}}, a.sets);
  const auto t = synth::linspace(0.0, p["t_max_s"], p.count("points"));
  std::ostringstream out;
  io::writeVacuumRevival(out,
                         synth::genVacuumRevival(p["nbar0"], p["t1"], t, noiseSpec(a, synth::NoiseKind::Additive)));
  return out.str();
}

std::string nb3d(const SynthArgs& a) {
  auto doublets = io::readDoublets(a.doublets.empty() ? defaultDoubletPath() : a.doublets);
  Defaults defaults{{"e_min_ev", 190.0}, {"e_max_ev", 225.0}, {"points", 701},
                    {"level_lo", 100.0}, {"level_hi", 400.0}};
  for (const auto& d : doublets) {
    const double fallback = d.area > 0.0                          ? d.area
                            : d.species == NbSpecies::NbMetal   ? 1000.0
                            : d.species == NbSpecies::Nb2O5     ? 2000.0
                                                                : 300.0;
    defaults.emplace_back("area_" + std::string(speciesName(d.species)), fallback);
  }
  const Params p(defaults, a.sets);
  for (auto& d : doublets) d.area = p["area_" + std::string(speciesName(d.species))];
  const auto e = synth::linspace(p["e_min_ev"], p["e_max_ev"], p.count("points"));
  std::ostringstream out;
  io::writeXpsSpectrum(out, synth::genNb3d(doublets, e, {p["level_lo"], p["level_hi"]},
                                           noiseSpec(a, synth::NoiseKind::Additive)));
  return out.str();
}

}  // namespace

void addSynthCommands(CLI::App& app, Action& action) {
  auto* synthCmd = app.add_subcommand("synth", "seeded synthetic data from the forward models");
  synthCmd->require_subcommand(1);
  const std::vector<std::pair<std::string, std::string (*)(const SynthArgs&)>> generators{
      {"s11", s11}, {"ringdown", ringdown}, {"tls", tls}, {"numbersplit", numbersplit}, {"t1", t1}, {"nb3d", nb3d}};
  for (const auto& [name, gen] : generators) {
    auto args = std::make_shared<SynthArgs>();
    auto* sub = synthCmd->add_subcommand(name, "generate " + name + " data");
    sub->add_option("-o,--output", args->output, "output file ('-' for stdout)");
    sub->add_option("--seed", args->seed, "RNG seed");
    sub->add_option("--sigma", args->sigma, "noise level (data units, or relative when multiplicative)");
    sub->add_option("--noise", args->noise, "additive or multiplicative")
        ->check(CLI::IsMember({"additive", "multiplicative"}));
    sub->add_option("--set", args->sets, "model or grid parameter key=value (repeatable)")
        ->allow_extra_args(false);
    if (name == "nb3d") sub->add_option("--doublets", args->doublets, "doublet configuration JSON");
    sub->callback([args, &action, name = name, gen = gen] {
      action = [args, name, gen] {
        if (!(args->sigma >= 0.0)) throw DomainError("--sigma must be >= 0");
        emit(*args, name, gen(*args));
        return int(kExitOk);
      };
    });
  }
}

}  // namespace nbcav::cli
