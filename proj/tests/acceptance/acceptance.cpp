// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

// Prints one PASS/FAIL line per acceptance criterion and exits non-zero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "nbcav/dispersive.hpp"
#include "nbcav/etchcalc.hpp"
#include "nbcav/io.hpp"
#include "nbcav/resonator.hpp"
#include "nbcav/synth.hpp"
#include "nbcav/tls.hpp"
#include "nbcav/xps.hpp"

using namespace nbcav;
using synth::XpsBackground;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void fail(const std::string& why) {
    v_.pass = false;
    note(why);
  }
  void require(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
  void note(const std::string& s) { v_.detail += (v_.detail.empty() ? "" : "; ") + s; }
  Verdict verdict() const { return v_; }

 private:
  Verdict v_;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double relErr(double got, double want) { return std::abs(got - want) / std::abs(want); }

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Largest relative error over the free parameters of a fit.
double worstFreeError(const FitResult& fit, const std::map<std::string, double>& truth, std::string& worst) {
  double m = 0.0;
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    if (fit.frozen[i]) continue;
    const double e = relErr(fit.values[i], truth.at(fit.names[i]));
    if (!(e <= m)) {
      m = e;
      worst = fit.names[i];
    }
  }
  return m;
}

std::map<std::string, double> s11Truth(const ResonatorParams& p) {
  return {{"f0", p.f0},
          {"qInt", p.qInt},
          {"qCoupling", p.qCoupling},
          {"asymmetryPhase", p.asymmetryPhase},
          {"amplitude", p.amplitude},
          {"electricalDelay", p.electricalDelay},
          {"backgroundPhase", p.backgroundPhase}};
}

std::vector<double> gridAround(const ResonatorParams& p, double linewidths, std::size_t n) {
  const double lw = p.f0 / p.qLoaded();
  return synth::linspace(p.f0 - 0.5 * linewidths * lw, p.f0 + 0.5 * linewidths * lw, n);
}

DispersiveParams paperDispersive(double t2 = 29e-6) {
  DispersiveParams p;
  p.chi = 28e3;
  p.nbar = 1.0;
  p.qubitT2 = t2;
  p.amplitude = 1.0;
  return p;
}

std::vector<DoubletSpec> sixDoublets() {
  auto ds = defaultDoublets();
  const double areas[6] = {1000, 300, 400, 500, 600, 2000};
  for (std::size_t i = 0; i < ds.size(); ++i) ds[i].area = areas[i];
  return ds;
}

// Oxygen fraction decaying onto a 0.02 plateau whose linear interpolation
// crosses the upper edge of the 5% band at `crossing`.
std::vector<ProfilePoint> profileCrossingAt(double crossing, int cycles = 20) {
  const double plateau = 0.02, band = 0.05 * plateau, edge = plateau + band;
  const int m = static_cast<int>(std::floor(crossing));
  const double t = crossing - m;
  const double a = edge + 0.2 * band;
  std::vector<ProfilePoint> p;
  for (int c = 0; c <= cycles; ++c) {
    double f = plateau;
    if (c <= m) f = plateau + (a - plateau) * std::exp(-(c - m) / 3.0);
    else if (c == m + 1) f = a + (edge - a) / t;
    p.push_back({static_cast<double>(c), f});
  }
  return p;
}

Verdict roundTrips() {
  Report r;
  const auto t0 = std::chrono::steady_clock::now();
  auto check = [&](const std::string& label, const FitResult& fit, const std::map<std::string, double>& truth) {
    std::string worst;
    const double e = worstFreeError(fit, truth, worst);
    r.require(fit.converged, label + " not converged");
    r.require(e < 1e-6, label + " " + worst + " off by " + sci(e));
    return e;
  };
  double worstAll = 0.0;

  for (const ResonatorParams& p : {ResonatorParams{6.5e9, 1.4e9, 1.4e9, 0.1, 0.8, 0.0, 0.3},
                                   ResonatorParams{6.5e9, 3.0e9, 6.0e8, 0.3, 1.2, 0.0, 2.5},
                                   ResonatorParams{5.0e9, 2.0e4, 1.0e4, 0.15, 0.9, 4e-8, 0.7}}) {
    worstAll = std::max(worstAll, check("s11", fitS11(synth::genS11(p, gridAround(p, 10, 401))), s11Truth(p)));
  }

  const TlsParams tls{4e9, 3e-10, 1.0, 6.5e9};
  worstAll = std::max(
      worstAll, check("tls", fitTls(synth::genTemperatureSeries(tls, synth::linspace(0.02, 0.4, 25)), tls.f0),
                      {{"q0", tls.q0}, {"lossTangentProduct", tls.lossTangentProduct}, {"alpha", tls.alpha}}));

  const DispersiveParams d = paperDispersive();
  worstAll = std::max(
      worstAll, check("numbersplit", fitNumberSplit(synth::genQubitSpectrum(d, synth::linspace(-200e3, 50e3, 401))),
                      {{"chi", d.chi}, {"nbar", d.nbar}, {"qubitT2", d.qubitT2}, {"amplitude", d.amplitude}}));

  const auto delays = synth::linspace(0.0, 3 * 11.3e-3, 20);
  worstAll = std::max(worstAll, check("t1", fitCavityT1(synth::genVacuumRevival(1.0, 11.3e-3, delays)),
                                      {{"t1", 11.3e-3}, {"nbar0", 1.0}}));

  worstAll = std::max(worstAll, check("ringdown",
                                      fitRingdown(synth::genDecay(0.012, 1.0, 0.05, synth::linspace(0, 0.04, 60))),
                                      {{"tau", 0.012}, {"amplitude", 1.0}, {"offset", 0.05}}));

  const auto truth = sixDoublets();
  auto start = truth;
  for (auto& s : start) {
    s.position52 += 0.1;
    s.fwhm *= 1.1;
    s.area = 0.0;
  }
  const auto nb = fitNb3d(synth::genNb3d(truth, synth::linspace(195, 215, 401)), start);
  std::map<std::string, double> nbTruth;
  for (const auto& s : truth) {
    const std::string n(speciesName(s.species));
    nbTruth["area_" + n] = s.area;
    nbTruth["position_" + n] = s.position52;
    nbTruth["fwhm_" + n] = s.fwhm;
  }
  worstAll = std::max(worstAll, check("nb3d", nb.fit, nbTruth));

  const double elapsed = seconds(t0);
  r.require(elapsed < 60.0, "suite took " + sci(elapsed) + " s");
  r.note("worst free-parameter error " + sci(worstAll) + ", " + sci(elapsed) + " s");
  return r.verdict();
}

Verdict noisyRecovery() {
  Report r;
  const ResonatorParams p{6.5e9, 1.47e9, 1.4e9, 0.05, 1.0, 0.0, 0.4};
  const auto s11 = fitS11(synth::genS11(p, gridAround(p, 10, 201), {synth::NoiseKind::Additive, 0.01, 40}));
  const double eqi = relErr(s11.value("qInt"), p.qInt), eqc = relErr(s11.value("qCoupling"), p.qCoupling);
  r.require(eqi < 0.02 && eqc < 0.02, "Q_int/Q_c");

  const TlsParams tls{4e9, 3e-10, 1.0, 6.5e9};
  const auto tf = fitTls(synth::genTemperatureSeries(tls, synth::linspace(0.02, 0.4, 25),
                                                     {synth::NoiseKind::Multiplicative, 0.03, 3}),
                         tls.f0);
  const double et = relErr(tf.value("lossTangentProduct"), tls.lossTangentProduct);
  r.require(et < 0.10, "F tan(delta)");

  const DispersiveParams d = paperDispersive();
  const auto nf = fitNumberSplit(
      synth::genQubitSpectrum(d, synth::linspace(-200e3, 50e3, 401), {synth::NoiseKind::Additive, 0.01, 28}));
  const double ec = relErr(nf.value("chi"), d.chi);
  r.require(ec < 0.05, "chi");

  const auto t1 = fitCavityT1(synth::genVacuumRevival(1.0, 11.3e-3, synth::linspace(0.0, 3 * 11.3e-3, 20),
                                                      {synth::NoiseKind::Additive, 0.02, 113}));
  const double e1 = relErr(t1.value("t1"), 11.3e-3);
  r.require(e1 < 0.04, "T1");
  r.note("Q_int " + sci(eqi) + ", Q_c " + sci(eqc) + ", F tan " + sci(et) + ", chi " + sci(ec) + ", T1 " + sci(e1));
  return r.verdict();
}

Verdict temperatureLimits() {
  Report r;
  const TlsParams p{1e10, 5.3e-10, 1.0, 6.5e9};
  const double cold = relErr(tlsModel(p, 1e-6), 1.0 / (1.0 / p.q0 + p.lossTangentProduct));
  const double hot = relErr(tlsModel(p, 1e6), p.q0);
  const double x = singlePhotonEnergy(p.f0) / (2.0 * constants::kB * 1e6);
  const double tail = p.q0 * p.lossTangentProduct * x;
  r.require(cold < 1e-9, "T->0 off by " + sci(cold));
  r.require(hot < 1e-9, "T->inf at 1e6 K off by " + sci(hot) + " (analytic first-order tail q0*F*tan*hf/2kT = " +
                            sci(tail) + ", so < 1e-9 is unreachable here)");
  r.note("T->0 " + sci(cold) + ", T->inf " + sci(hot) + ", q0=1e10, F tan=5.3e-10");
  return r.verdict();
}

Verdict purcell() {
  Report r;
  const double t = purcellLimit({0.01414, 1.0 / 100e-6});
  r.require(std::abs(t - 0.5) <= 0.5 * 0.005, "T_p = " + sci(t) + " s");
  r.note("T_p = " + std::to_string(t * 1e3) + " ms");
  return r.verdict();
}

Verdict resolvability() {
  Report r;
  const DispersiveParams p = paperDispersive();
  const double width = peakLinewidth(p, 0);
  r.require(std::abs(width - 10.98e3) < 5.0, "vacuum linewidth " + sci(width));
  r.require(p.chi * p.qubitT2 * std::numbers::pi > 1.0, "chi T2 pi <= 1");
  r.require(isResolved(p), "paper values not resolved");
  r.require(!isResolved(paperDispersive(3e-6)), "T2 = 3 us resolved");
  const auto grid = synth::linspace(-200e3, 50e3, 401);
  const auto broad = fitNumberSplit(synth::genQubitSpectrum(paperDispersive(3e-6), grid));
  const auto sharp = fitNumberSplit(synth::genQubitSpectrum(p, grid));
  r.require(broad.hasFlag("unresolved"), "fit at T2 = 3 us not flagged");
  r.require(!sharp.hasFlag("unresolved"), "fit at T2 = 29 us flagged");
  r.note("linewidth " + std::to_string(width) + " Hz, chi T2 pi " + std::to_string(p.chi * p.qubitT2 * std::numbers::pi));
  return r.verdict();
}

Verdict directThickness() {
  Report r;
  const auto a = oxideThicknessDirect(profileCrossingAt(8.123), 0.47);
  const auto b = oxideThicknessDirect(profileCrossingAt(11.17), 0.47);
  r.require(a.resolved && b.resolved, "profile not resolved");
  r.require(std::abs(a.nm - 3.818) < 0.01, "8.123 cycles -> " + sci(a.nm));
  r.require(std::abs(b.nm - 5.249) < 0.01, "11.17 cycles -> " + sci(b.nm));
  r.note(std::to_string(a.nm) + " nm, " + std::to_string(b.nm) + " nm");
  return r.verdict();
}

Verdict oxideGrowth() {
  Report r;
  const auto j = io::readJsonFile(std::string(NBCAV_FIXTURE_DIR) + "/oxide_intensity_ratios.json");
  auto rows = [&](const char* key) {
    std::vector<ThicknessInputs> v;
    for (const auto& row : j.at(key)) v.push_back(io::thicknessInputsFromJson(row));
    return v;
  };
  const auto early = rows("30min"), late = rows("3week");
  const double a = totalOxideThicknessIndirect(early).nm, b = totalOxideThicknessIndirect(late).nm;
  r.require(std::abs(a - 3.589) < 1e-3, "30 min total " + sci(a));
  r.require(std::abs(b - 4.974) < 1e-3, "3 week total " + sci(b));
  const double growth = b / a - 1.0;
  r.require(std::abs(growth - 0.38) <= 0.01, "growth " + sci(growth));

  double worst = 0.0;
  for (const auto& in : early) {
    const double base = oxideThicknessIndirect(in).nm;
    for (double k : {1e-6, 1e-3, 0.37, 3.0, 1e4, 1e9}) {
      ThicknessInputs s = in;
      s.iOxide *= k;
      s.iMetal *= k;
      worst = std::max(worst, relErr(oxideThicknessIndirect(s).nm, base));
    }
  }
  r.require(worst <= 4.0 * std::numeric_limits<double>::epsilon(), "scale invariance off by " + sci(worst));
  r.note(std::to_string(a) + " nm -> " + std::to_string(b) + " nm, +" + std::to_string(100.0 * growth) +
         "%, scale invariance " + sci(worst));
  return r.verdict();
}

Verdict sputterRate() {
  Report r;
  const auto s = sputterRateCalibration(73.0, 11, 180.0);
  r.require(std::abs(s.angstromPerSecond - 0.369) < 5e-4, "rate " + sci(s.angstromPerSecond));
  r.require(s.angstromPerSecond > 0.3 && s.angstromPerSecond < 0.4, "outside 0.3-0.4");
  r.note(std::to_string(s.angstromPerSecond) + " A/s");
  return r.verdict();
}

Verdict loadedLifetime() {
  Report r;
  double lo = kInf, hi = 0.0;
  for (int i = 0; i <= 20; ++i) {
    const double qInt = 1.3e9 + 0.2e9 * i / 20.0;
    const double tau = qToEnergyDecayTime(parallelQ(qInt, qInt), 6.5e9);
    lo = std::min(lo, tau);
    hi = std::max(hi, tau);
  }
  r.require(lo >= 15.9e-3 && hi <= 18.4e-3, "range " + sci(lo) + "-" + sci(hi) + " s");
  r.require(lo <= 16e-3, "no overlap with 12-16 ms");
  r.note(std::to_string(lo * 1e3) + "-" + std::to_string(hi * 1e3) + " ms");
  return r.verdict();
}

Verdict xpsConstraints() {
  Report r;
  const auto e = synth::linspace(195, 215, 401);
  const auto truth = sixDoublets();
  std::vector<Nb3dFit> fits;
  fits.push_back(fitNb3d(synth::genNb3d(truth, e), truth));
  Nb3dFitOptions fixedWidths;
  fixedWidths.fitWidths = false;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    fits.push_back(fitNb3d(synth::genNb3d(truth, e, {}, {synth::NoiseKind::Additive, 5.0, seed}), truth, fixedWidths));
  }
  for (const auto& f : fits) {
    for (const auto& d : f.doublets) {
      const auto c = doubletComponents(d);
      r.require(c[1].center - c[0].center == kNb3dSplitting || std::abs(c[1].center - c[0].center - kNb3dSplitting) <=
                                                                   4 * std::numeric_limits<double>::epsilon() * c[1].center,
                "splitting " + sci(c[1].center - c[0].center));
      r.require(std::abs(c[0].area - 1.5 * c[1].area) <= 4 * std::numeric_limits<double>::epsilon() * c[0].area,
                "area ratio");
    }
  }

  // Endpoint steps up to the peak height. Far larger steps make the Shirley map
  // expansive and are reported as non-converged by design.
  int fixtures = 0;
  double worst = 0.0;
  const std::vector<std::pair<std::vector<double>, XpsBackground>> cases{
      {e, {100.0, 400.0}}, {e, {400.0, 100.0}}, {e, {0.0, 50.0}}, {e, {1000.0, 1500.0}},
      {synth::linspace(190, 225, 701), {100.0, 400.0}}};
  for (const auto& [grid, levels] : cases) {
    for (double scale : {1.0, 10.0}) {
      auto ds = truth;
      for (auto& d : ds) d.area *= scale;
      const auto bg = shirleyBackground(synth::genNb3d(ds, grid, {levels.levelLo, levels.levelHi}), grid.front(),
                                        grid.back());
      const double step = std::abs(bg.levelHi - bg.levelLo);
      r.require(bg.converged, "Shirley did not converge");
      worst = std::max(worst, bg.residual / step);
      ++fixtures;
    }
  }
  r.require(worst < 1e-6, "Shirley residual " + sci(worst) + " of the step");
  r.note(std::to_string(fits.size()) + " fits exact; " + std::to_string(fixtures) +
         " Shirley fixtures, worst residual/step " + sci(worst));
  return r.verdict();
}

Verdict etchBudget() {
  Report r;
  EtchPlan unit{1.0, 0.0, 1.0, 1.0};
  const auto density = dissipatedPower(unit);
  r.require(density.lo == 480.0 && density.hi == 900.0, "density band " + sci(density.lo) + "-" + sci(density.hi));
  double worst = 0.0;
  for (int i = 1; i <= 110; ++i) {
    EtchPlan p{0.011 * i / 110.0, 0.0, 1.0, 1.0};
    worst = std::max(worst, dissipatedPower(p).hi);
  }
  r.require(worst <= 10.0, "max power " + sci(worst) + " W");
  r.note("480-900 W/m^2, max " + std::to_string(worst) + " W at 0.011 m^2");
  return r.verdict();
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Verdict cliDeterminism(std::chrono::steady_clock::time_point suiteStart) {
  Report r;
  const std::string cli = NBCAV_CLI_PATH;
  const fs::path root = fs::temp_directory_path() / ("nbcav-acceptance-" + std::to_string(::getpid()));
  const std::vector<std::pair<std::string, std::string>> pipelines{
      {"synth s11 --seed 7 --sigma 0.01 -o s11.csv", "fit-s11 s11.csv -o s11.json --plot s11.svg"},
      {"synth ringdown --seed 7 --sigma 0.02 -o rd.csv", "fit-ringdown rd.csv --f0 6.5GHz -o rd.json"},
      {"synth tls --seed 7 --sigma 0.03 -o tls.csv", "fit-tls tls.csv --f0 6.5GHz -o tls.json"},
      {"synth numbersplit --seed 7 --sigma 0.01 -o ns.csv", "fit-numbersplit ns.csv -o ns.json"},
      {"synth t1 --seed 7 --sigma 0.02 -o t1.csv", "fit-t1 t1.csv -o t1.json"},
      {"synth nb3d --seed 7 --sigma 2 -o nb.csv", "xps fit nb.csv --fixed-widths -o nb.json"},
  };
  std::vector<std::map<std::string, std::string>> runs;
  for (int rep = 0; rep < 2; ++rep) {
    const fs::path dir = root / ("run" + std::to_string(rep));
    fs::create_directories(dir);
    for (const auto& [gen, fit] : pipelines) {
      for (const auto& cmd : {gen, fit}) {
        const std::string line = "cd '" + dir.string() + "' && '" + cli + "' " + cmd + " 2>/dev/null";
        const int rc = std::system(line.c_str());
        r.require(rc == 0, "'" + cmd + "' exited " + std::to_string(rc));
      }
    }
    std::map<std::string, std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) files[entry.path().filename().string()] = slurp(entry.path());
    runs.push_back(std::move(files));
  }
  fs::remove_all(root);
  r.require(runs[0].size() == 13, "expected 13 files, got " + std::to_string(runs[0].size()));
  r.require(runs[0] == runs[1], "outputs differ between runs");
  const double total = seconds(suiteStart);
  r.require(total < 300.0, "end-to-end suite took " + sci(total) + " s");
  r.note(std::to_string(runs[0].size()) + " files byte-identical; acceptance suite " + sci(total) + " s");
  return r.verdict();
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"round-trip law, all fitters", roundTrips},
      {"noisy recovery", noisyRecovery},
      {"TLS model temperature limits", temperatureLimits},
      {"Purcell arithmetic", purcell},
      {"number-splitting resolvability", resolvability},
      {"oxide thickness, direct method", directThickness},
      {"oxide growth consistency", oxideGrowth},
      {"sputter-rate calibration", sputterRate},
      {"loaded-lifetime consistency", loadedLifetime},
      {"XPS constraint laws", xpsConstraints},
      {"etch budget", etchBudget},
      {"CLI determinism", [&] { return cliDeterminism(start); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
