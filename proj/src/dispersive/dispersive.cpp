// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "nbcav/dispersive.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nbcav/kernels.hpp"

namespace nbcav {

namespace {
bool finite(double v) { return std::isfinite(v); }
}  // namespace

void DispersiveParams::validate() const {
  if (!(chi > 0.0) || !finite(chi)) throw DomainError("chi must be positive");
  if (!(nbar >= 0.0) || !finite(nbar)) throw DomainError("nbar must be >= 0");
  if (!(qubitT2 > 0.0) || !finite(qubitT2)) throw DomainError("qubit T2 must be positive");
  if (!(cavityKappa >= 0.0) || !finite(cavityKappa)) throw DomainError("cavity kappa must be >= 0");
  if (!finite(amplitude) || !finite(qubitF)) throw DomainError("non-finite dispersive parameter");
  if (nMax < 0) throw DomainError("nMax must be >= 0");
}

int DispersiveParams::truncation() const {
  if (nMax > 0) return nMax;
  // The closed-form rule leaves slightly more than the tail limit for some
  // small nbar; extend until the tail check is met.
  int n = requiredNMax(nbar);
  while (poissonTailMass(nbar, n) > kPoissonTailLimit) ++n;
  return n;
}

void QubitSpectrum::validate(std::size_t minPoints) const {
  if (detunings.size() != population.size()) throw DomainError("spectrum length mismatch");
  if (detunings.size() < minPoints) throw DomainError("spectrum has too few points");
  for (std::size_t i = 0; i < detunings.size(); ++i) {
    if (!finite(detunings[i]) || !finite(population[i])) {
      throw DomainError("spectrum contains non-finite values");
    }
    if (i > 0 && !(detunings[i] > detunings[i - 1])) {
      throw DomainError("detunings must be strictly increasing");
    }
  }
}

void PurcellInputs::validate() const {
  if (!(gOverDelta > 0.0 && gOverDelta < kDispersiveBound)) {
    throw DomainError("g/Delta must lie in (0, 0.3) for the dispersive approximation");
  }
  if (!(qubitGamma > 0.0) || !finite(qubitGamma)) throw DomainError("qubit Gamma must be positive");
}

int requiredNMax(double nbar) {
  if (!(nbar >= 0.0)) throw DomainError("nbar must be >= 0");
  return static_cast<int>(std::ceil(nbar + 5.0 * std::sqrt(nbar + 1.0)));
}

double poissonWeight(int n, double nbar) {
  if (n < 0) return 0.0;
  if (nbar == 0.0) return n == 0 ? 1.0 : 0.0;
  return std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0));
}

double poissonTailMass(double nbar, int nMax) {
  // Summing the tail directly avoids cancellation in 1 - sum(head).
  double tail = 0.0;
  const int stop = nMax + 1 + static_cast<int>(20.0 * std::sqrt(nbar + 1.0) + 50.0);
  for (int n = nMax + 1; n <= stop; ++n) tail += poissonWeight(n, nbar);
  return tail;
}

double peakLinewidth(const DispersiveParams& p, int n) {
  return 1.0 / (std::numbers::pi * p.qubitT2) + n * p.cavityKappa;
}

bool isResolved(const DispersiveParams& p) { return p.chi > peakLinewidth(p, 0); }

double numberSplitSpectrum(const DispersiveParams& p, double detuning) {
  p.validate();
  double sum = 0.0;
  const int nMax = p.truncation();
  for (int n = 0; n <= nMax; ++n) {
    const double hw = 0.5 * peakLinewidth(p, n);
    const double x = detuning + n * p.chi;
    sum += poissonWeight(n, p.nbar) * hw * hw / (x * x + hw * hw);
  }
  return p.amplitude * sum;
}

std::vector<double> numberSplitSpectrum(const DispersiveParams& p,
                                        std::span<const double> detunings) {
  p.validate();
  std::vector<double> out(detunings.size(), 0.0);
  const int nMax = p.truncation();
  for (int n = 0; n <= nMax; ++n) {
    const double w = p.amplitude * poissonWeight(n, p.nbar);
    if (w == 0.0) continue;
    kernels::accumulateLorentzian(detunings, -n * p.chi, 0.5 * peakLinewidth(p, n), w, out);
  }
  return out;
}

std::vector<std::string> spectrumWarnings(const DispersiveParams& p) {
  std::vector<std::string> out;
  const double tail = poissonTailMass(p.nbar, p.truncation());
  if (tail > kPoissonTailLimit) {
    out.push_back("Poisson tail beyond nMax is " + std::to_string(tail) +
                  "; raise nMax to at least " + std::to_string(requiredNMax(p.nbar)));
  }
  return out;
}

DispersiveParams estimateNumberSplitGuess(const QubitSpectrum& s) {
  s.validate();
  const auto& d = s.detunings;
  const auto& y = s.population;
  const std::size_t n = d.size();
  const double span = d.back() - d.front();

  // 3-point moving average damps single-point noise for peak picking.
  std::vector<double> sm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i == 0 ? 0 : i - 1, hi = std::min(n - 1, i + 1);
    double acc = 0.0;
    for (std::size_t k = lo; k <= hi; ++k) acc += y[k];
    sm[i] = acc / static_cast<double>(hi - lo + 1);
  }

  std::size_t i0 = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(d[i]) < std::abs(d[i0])) i0 = i;
  }
  std::size_t iPeak = i0;
  for (std::size_t k = (i0 >= 2 ? i0 - 2 : 0); k <= std::min(n - 1, i0 + 2); ++k) {
    if (sm[k] > sm[iPeak]) iPeak = k;
  }
  const double h0 = std::max(sm[iPeak], 1e-12);

  // The high-frequency side of the vacuum peak carries no other peaks.
  double halfWidth = 0.25 * span;
  for (std::size_t k = iPeak; k < n; ++k) {
    if (sm[k] < 0.5 * h0) {
      halfWidth = std::max(d[k] - d[iPeak], 1e-9 * span);
      break;
    }
  }
  const double width0 = 2.0 * halfWidth;

  DispersiveParams g;
  g.qubitT2 = 1.0 / (std::numbers::pi * width0);
  g.chi = width0;
  g.nbar = 1.0;
  double best = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (d[k] >= d[iPeak] - width0) break;
    if (sm[k] >= sm[k - 1] && sm[k] >= sm[k + 1] && sm[k] > best) {
      best = sm[k];
      g.chi = d[iPeak] - d[k];
    }
  }
  if (best > 0.05 * h0) g.nbar = std::clamp(best / h0, 0.05, 50.0);
  g.amplitude = h0 * std::exp(g.nbar);
  return g;
}

DispersiveParams dispersiveParamsFrom(const FitResult& fit, double cavityKappa) {
  DispersiveParams p;
  p.chi = fit.value("chi");
  p.nbar = fit.value("nbar");
  p.qubitT2 = fit.value("qubitT2");
  p.amplitude = fit.value("amplitude");
  p.cavityKappa = cavityKappa;
  return p;
}

FitResult fitNumberSplit(const QubitSpectrum& spectrum, const NumberSplitFitOptions& options) {
  spectrum.validate();
  const auto& d = spectrum.detunings;
  const std::size_t n = d.size();
  const double span = d.back() - d.front();
  double minSpacing = span;
  for (std::size_t i = 1; i < n; ++i) minSpacing = std::min(minSpacing, d[i] - d[i - 1]);

  DispersiveParams g = options.guess ? *options.guess : estimateNumberSplitGuess(spectrum);
  g.validate();
  const double kappa = g.cavityKappa;

  const double chiLo = 1e-3 * minSpacing, chiHi = 2.0 * span;
  const double t2Lo = 0.1 / (std::numbers::pi * span);
  const double t2Hi = 1e3 / (std::numbers::pi * minSpacing);
  const double nbarHi = std::max(10.0, 4.0 * g.nbar);
  // Fixed truncation so the model is smooth in nbar over its whole range.
  const int nMax = std::max(g.nMax, requiredNMax(nbarHi));

  const double yMax = *std::max_element(spectrum.population.begin(), spectrum.population.end());
  const double ampScale = std::max(std::abs(g.amplitude), std::abs(yMax));

  auto clampTo = [](double v, double lo, double hi) { return std::clamp(v, lo, hi); };
  std::vector<ParamSpec> specs{
      {"chi", clampTo(g.chi, chiLo, chiHi), chiLo, chiHi, false, g.chi},
      {"nbar", clampTo(g.nbar, 0.0, nbarHi), 0.0, nbarHi, false, std::max(g.nbar, 1.0)},
      {"qubitT2", clampTo(g.qubitT2, t2Lo, t2Hi), t2Lo, t2Hi, false, g.qubitT2},
      {"amplitude", g.amplitude, 0.0, kInf, false, ampScale},
  };

  const std::vector<double> grid = d;
  ResidualModel model(n, [grid, kappa, nMax](std::span<const double> p, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    const double base = 1.0 / (std::numbers::pi * p[2]);
    for (int k = 0; k <= nMax; ++k) {
      const double w = p[3] * poissonWeight(k, p[1]);
      if (w == 0.0) continue;
      kernels::accumulateLorentzian(grid, -k * p[0], 0.5 * (base + k * kappa), w, out);
    }
  });

  LeastSquaresOptions solver = options.solver;
  // The comb objective has aliases at half and double the true spacing.
  for (double f : {2.0, 0.5}) {
    const double c = specs[0].initial * f;
    if (c > chiLo && c < chiHi) {
      solver.extraStarts.push_back({c, specs[1].initial, specs[2].initial, specs[3].initial});
    }
  }
  FitResult fit = leastSquares(model, specs, spectrum.population, {}, solver);

  const DispersiveParams fitted = dispersiveParamsFrom(fit, kappa);
  if (!isResolved(fitted)) {
    fit.addFlag("unresolved");
    fit.addWarning("fitted chi is below the vacuum-peak linewidth; number splitting is not resolved");
  }
  if (d.front() > -3.0 * fitted.chi) {
    fit.addWarning("spectrum extends less than 3 chi below the vacuum peak");
  }
  return fit;
}

double vacuumPeakDecay(double nbar0, double t1, double t) {
  if (!(nbar0 >= 0.0) || !finite(nbar0)) throw DomainError("nbar0 must be >= 0");
  if (!(t1 > 0.0) || !finite(t1)) throw DomainError("t1 must be positive");
  if (!(t >= 0.0)) throw DomainError("delay must be >= 0");
  return std::exp(-nbar0 * std::exp(-t / t1));
}

void VacuumRevival::validate(std::size_t minPoints) const {
  if (delays.size() != weights.size()) throw DomainError("revival length mismatch");
  if (delays.size() < minPoints) throw DomainError("too few revival points");
  for (std::size_t i = 0; i < delays.size(); ++i) {
    if (!finite(delays[i]) || !finite(weights[i])) throw DomainError("non-finite revival point");
    if (delays[i] < 0.0) throw DomainError("delays must be >= 0");
    if (i > 0 && !(delays[i] > delays[i - 1])) throw DomainError("delays must be increasing");
  }
}

FitResult fitCavityT1(const VacuumRevival& pts, const LeastSquaresOptions& solver) {
  pts.validate();
  const auto& t = pts.delays;
  const auto& w = pts.weights;
  const std::size_t n = t.size();
  const double span = t.back() - t.front();
  double minSpacing = span;
  for (std::size_t i = 1; i < n; ++i) minSpacing = std::min(minSpacing, t[i] - t[i - 1]);

  // ln(-ln w) = ln nbar0 - t / t1 over points strictly inside (0, 1).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(w[i] > 0.0 && w[i] < 1.0)) continue;
    const double yy = std::log(-std::log(w[i]));
    sx += t[i]; sy += yy; sxx += t[i] * t[i]; sxy += t[i] * yy;
    ++m;
  }
  double t1Guess = span, nbarGuess = 1.0;
  if (m >= 2 && m * sxx - sx * sx > 0.0) {
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    if (slope < 0.0) {
      t1Guess = -1.0 / slope;
      nbarGuess = std::exp((sy - slope * sx) / m);
    }
  }
  const double t1Lo = 1e-3 * minSpacing, t1Hi = 1e4 * std::max(span, t.back());
  t1Guess = std::clamp(t1Guess, 10.0 * t1Lo, 0.1 * t1Hi);
  nbarGuess = std::clamp(nbarGuess, 1e-3, 1e3);

  auto model = ResidualModel::pointwise(t, [](std::span<const double> p, double x) {
    return std::exp(-p[1] * std::exp(-x / p[0]));
  });
  std::vector<ParamSpec> specs{
      {"t1", t1Guess, t1Lo, t1Hi, false, t1Guess},
      {"nbar0", nbarGuess, 0.0, kInf, false, std::max(nbarGuess, 1.0)},
  };
  FitResult fit = leastSquares(model, specs, w, {}, solver);

  // A decaying coherent state makes the vacuum weight rise with delay.
  const std::size_t third = std::max<std::size_t>(1, n / 3);
  double early = 0.0, late = 0.0;
  for (std::size_t i = 0; i < third; ++i) {
    early += w[i];
    late += w[n - 1 - i];
  }
  const bool rising = late > early;
  const double nbar0 = fit.value("nbar0");
  if (!rising || !(nbar0 > 3.0 * fit.sigma("nbar0")) || fit.hasFlag("at_bound:t1") ||
      fit.degenerate) {
    fit.addFlag("non_physical");
    fit.addWarning("vacuum weight does not rise toward 1; no cavity decay is resolved");
  }
  if (n < 5) fit.addWarning("fewer than 5 delay points");
  if (span < fit.value("t1")) fit.addWarning("delays span less than one t1");
  return fit;
}

double purcellLimit(const PurcellInputs& inputs) {
  inputs.validate();
  return 1.0 / (inputs.gOverDelta * inputs.gOverDelta * inputs.qubitGamma);
}

}  // namespace nbcav
