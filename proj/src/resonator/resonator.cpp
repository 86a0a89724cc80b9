// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "nbcav/resonator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "nbcav/kernels.hpp"

namespace nbcav {

namespace {

constexpr double kPi = std::numbers::pi;

double wrapPhase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

void requireFinitePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

// Indices of the outer `fraction` of points on each side (at least two per side).
std::vector<std::size_t> wingIndices(std::size_t n, double fraction) {
  const std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * n));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < std::min(k, n); ++i) idx.push_back(i);
  for (std::size_t i = n - std::min(k, n); i < n; ++i) {
    if (i >= k) idx.push_back(i);
  }
  return idx;
}

std::vector<double> unwrappedPhase(std::span<const std::complex<double>> v) {
  std::vector<double> ph(v.size());
  double offset = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    double a = std::arg(v[i]);
    if (i > 0) {
      double prev = ph[i - 1];
      double d = a + offset - prev;
      while (d > kPi) { offset -= 2.0 * kPi; d -= 2.0 * kPi; }
      while (d < -kPi) { offset += 2.0 * kPi; d += 2.0 * kPi; }
    }
    ph[i] = a + offset;
  }
  return ph;
}

// Slope with a separate intercept per wing. An over-coupled resonance adds
// a full turn of phase between the wings, which a single line would read as
// extra delay.
double wingSlope(std::span<const double> x, std::span<const double> y, std::size_t n, double fraction) {
  const std::size_t k = std::max<std::size_t>(2, static_cast<std::size_t>(fraction * n));
  std::vector<std::size_t> left, right;
  for (std::size_t i = 0; i < std::min(k, n); ++i) left.push_back(i);
  for (std::size_t i = n - std::min(k, n); i < n; ++i) {
    if (i >= k) right.push_back(i);
  }
  double sxy = 0.0, sxx = 0.0;
  for (const auto* idx : {&left, &right}) {
    if (idx->size() < 2) continue;
    double mx = 0.0, my = 0.0;
    for (auto i : *idx) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(idx->size());
    my /= static_cast<double>(idx->size());
    for (auto i : *idx) {
      sxy += (x[i] - mx) * (y[i] - my);
      sxx += (x[i] - mx) * (x[i] - mx);
    }
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

void ResonatorParams::validate() const {
  requireFinitePositive(f0, "f0");
  requireFinitePositive(qInt, "qInt");
  requireFinitePositive(qCoupling, "qCoupling");
  for (double v : {asymmetryPhase, amplitude, electricalDelay, backgroundPhase}) {
    if (!std::isfinite(v)) throw DomainError("resonator parameters must be finite");
  }
}

void ComplexTrace::validate(std::size_t minPoints) const {
  if (frequencies.size() != values.size()) throw DomainError("trace length mismatch");
  if (frequencies.size() < minPoints) throw DomainError("trace has too few points");
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (!std::isfinite(frequencies[i]) || !std::isfinite(values[i].real()) ||
        !std::isfinite(values[i].imag())) {
      throw DomainError("trace contains non-finite values");
    }
    if (i > 0 && !(frequencies[i] > frequencies[i - 1])) {
      throw DomainError("trace frequencies must be strictly increasing");
    }
  }
}

std::complex<double> s11Model(const ResonatorParams& p, double f) {
  const double freq[1] = {f};
  return s11Model(p, freq)[0];
}

std::vector<std::complex<double>> s11Model(const ResonatorParams& p,
                                           std::span<const double> frequencies) {
  p.validate();
  const std::size_t n = frequencies.size();
  const double qL = p.qLoaded();
  const double c = 2.0 * qL / p.qCoupling;
  std::vector<double> detuning(n), re(n), im(n);
  for (std::size_t i = 0; i < n; ++i) detuning[i] = frequencies[i] - p.f0;
  kernels::resonantBracket(detuning, 2.0 * qL / p.f0, c * std::cos(p.asymmetryPhase),
                           c * std::sin(p.asymmetryPhase), re, im);
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = p.backgroundPhase - constants::twoPi * frequencies[i] * p.electricalDelay;
    out[i] = p.amplitude * std::polar(1.0, phase) * std::complex<double>(re[i], im[i]);
  }
  return out;
}

ResonatorParams estimateS11Guess(const ComplexTrace& trace) {
  trace.validate();
  const auto& f = trace.frequencies;
  const auto& s = trace.values;
  const std::size_t n = f.size();
  const auto wings = wingIndices(n, 0.1);

  ResonatorParams g;
  double amp = 0.0;
  for (auto i : wings) amp += std::abs(s[i]);
  g.amplitude = amp / static_cast<double>(wings.size());
  if (!(g.amplitude > 0.0)) throw DomainError("trace has zero off-resonant level");

  const double span = f.back() - f.front();
  if (span >= kDelayResolvableSpanHz) {
    const auto ph = unwrappedPhase(s);
    g.electricalDelay = -wingSlope(f, ph, n, 0.1) / constants::twoPi;
  }
  std::vector<std::complex<double>> corrected(n);
  for (std::size_t i = 0; i < n; ++i) {
    corrected[i] = s[i] * std::polar(1.0, constants::twoPi * f[i] * g.electricalDelay);
  }
  std::complex<double> wingMean{0.0, 0.0};
  for (auto i : wings) wingMean += corrected[i];
  g.backgroundPhase = std::arg(wingMean);

  std::size_t iMin = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(s[i]) < std::abs(s[iMin])) iMin = i;
  }
  g.f0 = f[iMin];
  const double depth = std::abs(s[iMin]) / g.amplitude;

  // Half-depth width of the 1 - |S|^2 profile, interpolated on each side.
  std::vector<double> dip(n);
  for (std::size_t i = 0; i < n; ++i) dip[i] = 1.0 - std::norm(s[i]) / (g.amplitude * g.amplitude);
  const double half = 0.5 * dip[iMin];
  double left = f.front(), right = f.back();
  bool foundLeft = false, foundRight = false;
  for (std::size_t i = iMin; i > 0; --i) {
    if (dip[i - 1] < half) {
      const double t = (dip[i] - half) / (dip[i] - dip[i - 1]);
      left = f[i] - t * (f[i] - f[i - 1]);
      foundLeft = true;
      break;
    }
  }
  for (std::size_t i = iMin; i + 1 < n; ++i) {
    if (dip[i + 1] < half) {
      const double t = (dip[i] - half) / (dip[i] - dip[i + 1]);
      right = f[i] + t * (f[i + 1] - f[i]);
      foundRight = true;
      break;
    }
  }
  double fwhm = right - left;
  if (foundLeft != foundRight) fwhm = 2.0 * (foundLeft ? g.f0 - left : right - g.f0);
  if (!(fwhm > 0.0) || (!foundLeft && !foundRight)) fwhm = span / 10.0;
  const double qL = g.f0 / fwhm;

  // On resonance the bracket is 1 - 2qL/qC: same sign as the background when
  // under-coupled, opposite when over-coupled.
  const std::complex<double> onRes = corrected[iMin] * std::polar(1.0, -g.backgroundPhase);
  double r = onRes.real() >= 0.0 ? depth : -depth;
  r = std::clamp(r, -0.999, 0.999);
  g.qCoupling = 2.0 * qL / (1.0 - r);
  g.qInt = 1.0 / (1.0 / qL - 1.0 / g.qCoupling);
  g.asymmetryPhase = 0.0;
  return g;
}

FitResult fitS11(const ComplexTrace& trace, const S11FitOptions& options) {
  trace.validate();
  const ResonatorParams guess = options.guess ? *options.guess : estimateS11Guess(trace);
  guess.validate();

  const std::size_t n = trace.frequencies.size();
  const double span = trace.frequencies.back() - trace.frequencies.front();
  bool delayFree = false;
  switch (options.delay) {
    case DelayMode::Auto: delayFree = span >= kDelayResolvableSpanHz; break;
    case DelayMode::Free: delayFree = true; break;
    case DelayMode::Frozen: delayFree = false; break;
  }

  // Internal parametrisation: f0 as an offset from a grid-adjacent reference
  // so detunings are exact, and the background phase referenced to that
  // frequency so it decouples from the delay.
  const double fRef = guess.f0;
  std::vector<double> offsets(n);
  for (std::size_t i = 0; i < n; ++i) offsets[i] = trace.frequencies[i] - fRef;

  enum { kDf0, kQi, kQc, kTheta, kAmp, kDelay, kPhiRef, kCount };
  auto model = ResidualModel(2 * n, [offsets, fRef, n](std::span<const double> p,
                                                        std::span<double> out) {
    std::vector<double> detuning(n), re(n), im(n);
    for (std::size_t i = 0; i < n; ++i) detuning[i] = offsets[i] - p[kDf0];
    const double qL = parallelQ(p[kQi], p[kQc]);
    const double f0 = fRef + p[kDf0];
    const double c = 2.0 * qL / p[kQc];
    kernels::resonantBracket(detuning, 2.0 * qL / f0, c * std::cos(p[kTheta]),
                             c * std::sin(p[kTheta]), re, im);
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = p[kPhiRef] - constants::twoPi * offsets[i] * p[kDelay];
      const double cr = p[kAmp] * std::cos(phase), ci = p[kAmp] * std::sin(phase);
      out[i] = cr * re[i] - ci * im[i];
      out[n + i] = cr * im[i] + ci * re[i];
    }
  });

  std::vector<double> y(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = trace.values[i].real();
    y[n + i] = trace.values[i].imag();
  }

  const double phiRef = wrapPhase(guess.backgroundPhase - constants::twoPi * fRef * guess.electricalDelay);
  std::vector<ParamSpec> specs{
      {"f0", guess.f0 - fRef, -span, span, false, guess.f0 / guess.qLoaded()},
      {"qInt", guess.qInt, 1.0, kInf, false},
      {"qCoupling", guess.qCoupling, 1.0, kInf, false},
      {"asymmetryPhase", std::clamp(guess.asymmetryPhase, -kPi / 2, kPi / 2), -kPi / 2, kPi / 2, false},
      {"amplitude", guess.amplitude, 0.0, kInf, false},
      {"electricalDelay", guess.electricalDelay, -kInf, kInf, !delayFree, 1.0 / (constants::twoPi * span)},
      {"backgroundPhase", phiRef, -kInf, kInf, false},
  };

  FitResult internal = leastSquares(model, specs, y, {}, options.solver);

  // Back to the public parametrisation: f0 = fRef + df0 and
  // backgroundPhase = phiRef + 2 pi fRef tau. Linear, so the covariance maps
  // through the same matrix.
  FitResult out = internal;
  const double k = constants::twoPi * fRef;
  out.values[kDf0] = fRef + internal.values[kDf0];
  out.values[kPhiRef] = wrapPhase(internal.values[kPhiRef] + k * internal.values[kDelay]);
  const Matrix& c = internal.covariance;
  bool finite = true;
  for (double v : c.data()) finite = finite && std::isfinite(v);
  if (finite) {
    Matrix t(kCount, kCount, 0.0);
    for (std::size_t i = 0; i < kCount; ++i) t(i, i) = 1.0;
    t(kPhiRef, kDelay) = k;
    Matrix mapped(kCount, kCount, 0.0);
    for (std::size_t i = 0; i < kCount; ++i) {
      for (std::size_t j = 0; j < kCount; ++j) {
        double acc = 0.0;
        for (std::size_t a = 0; a < kCount; ++a) {
          if (t(i, a) == 0.0) continue;
          for (std::size_t b = 0; b < kCount; ++b) acc += t(i, a) * c(a, b) * t(j, b);
        }
        mapped(i, j) = acc;
      }
    }
    out.covariance = mapped;
    for (std::size_t i = 0; i < kCount; ++i) out.sigmas[i] = std::sqrt(std::max(mapped(i, i), 0.0));
  } else if (!std::isfinite(internal.sigmas[kDelay])) {
    out.sigmas[kPhiRef] = kInf;
  }

  const ResonatorParams fitted = resonatorParamsFrom(out);
  const double qL = fitted.qLoaded();
  if (span < 3.0 * fitted.f0 / qL) {
    out.addWarning("trace spans fewer than 3 linewidths; Q estimates are weakly constrained");
  }
  const double relQi = out.sigmas[kQi] / out.values[kQi];
  const double relQc = out.sigmas[kQc] / out.values[kQc];
  if (out.degenerate || !(relQi < 0.5) || !(relQc < 0.5)) {
    out.degenerate = true;
    out.addFlag("degenerate");
    out.addWarning("qInt and qCoupling are strongly correlated: the resonance dip is too shallow "
                   "to separate internal and coupling loss");
  }
  return out;
}

ResonatorParams resonatorParamsFrom(const FitResult& fit) {
  ResonatorParams p;
  p.f0 = fit.value("f0");
  p.qInt = fit.value("qInt");
  p.qCoupling = fit.value("qCoupling");
  p.asymmetryPhase = fit.value("asymmetryPhase");
  p.amplitude = fit.value("amplitude");
  p.electricalDelay = fit.value("electricalDelay");
  p.backgroundPhase = fit.value("backgroundPhase");
  return p;
}

double meanPhotonNumber(double pInput, const ResonatorParams& params) {
  params.validate();
  if (!(pInput >= 0.0) || !std::isfinite(pInput)) throw DomainError("input power must be >= 0");
  const double w0 = constants::twoPi * params.f0;
  const double kc = w0 / params.qCoupling;
  const double ki = w0 / params.qInt;
  const double k = ki + kc;
  return 4.0 * kc * pInput / (constants::hbar * w0 * k * k);
}

double inputPowerForPhotons(double nbar, const ResonatorParams& params) {
  params.validate();
  if (!(nbar >= 0.0) || !std::isfinite(nbar)) throw DomainError("photon number must be >= 0");
  const double w0 = constants::twoPi * params.f0;
  const double kc = w0 / params.qCoupling;
  const double k = w0 / params.qInt + kc;
  return nbar * constants::hbar * w0 * k * k / (4.0 * kc);
}

double deliveredPower(double sourcePowerDbm, std::span<const double> attenuationDb) {
  const double totalDb = std::accumulate(attenuationDb.begin(), attenuationDb.end(), 0.0);
  return 1e-3 * std::pow(10.0, (sourcePowerDbm - totalDb) / 10.0);
}

std::vector<PowerSweepRow> powerSweep(std::span<const PowerSweepPoint> points,
                                      const S11FitOptions& options) {
  std::vector<PowerSweepRow> rows;
  rows.reserve(points.size());
  for (const auto& pt : points) {
    const FitResult fit = fitS11(pt.trace, options);
    const ResonatorParams p = resonatorParamsFrom(fit);
    PowerSweepRow row;
    row.inputPower = pt.inputPower;
    row.meanPhotons = meanPhotonNumber(pt.inputPower, p);
    row.qInt = p.qInt;
    row.qIntSigma = fit.sigma("qInt");
    row.qCoupling = p.qCoupling;
    row.qCouplingSigma = fit.sigma("qCoupling");
    row.f0 = p.f0;
    row.converged = fit.converged;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace nbcav
