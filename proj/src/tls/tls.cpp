// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include "nbcav/tls.hpp"

#include <algorithm>
#include <cmath>

namespace nbcav {

namespace {
void requirePositive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) throw DomainError(std::string(what) + " must be positive");
}

double tanhArgument(double alpha, double f0, double temperature) {
  return alpha * constants::hbar * constants::twoPi * f0 / (2.0 * constants::kB * temperature);
}
}  // namespace

void TlsParams::validate() const {
  requirePositive(q0, "q0");
  requirePositive(f0, "f0");
  if (!(lossTangentProduct >= 0.0) || !std::isfinite(lossTangentProduct)) {
    throw DomainError("loss tangent product must be >= 0");
  }
  if (!(alpha >= kTlsAlphaMin && alpha <= kTlsAlphaMax)) {
    throw DomainError("alpha must lie in [0.1, 3]");
  }
}

void CavityGeometry::validate() const {
  requirePositive(sE, "s_e");
  requirePositive(sM, "s_m");
  requirePositive(tOx, "t_ox");
  requirePositive(epsR, "eps_r");
}

void TemperatureSeries::validate() const {
  if (temperatures.size() != qInt.size()) throw DomainError("temperature series length mismatch");
  if (!qSigma.empty() && qSigma.size() != qInt.size()) {
    throw DomainError("q_sigma length mismatch");
  }
  for (std::size_t i = 0; i < temperatures.size(); ++i) {
    requirePositive(temperatures[i], "temperature");
    requirePositive(qInt[i], "q_int");
    if (!qSigma.empty()) requirePositive(qSigma[i], "q_sigma");
    if (i > 0 && !(temperatures[i] > temperatures[i - 1])) {
      throw DomainError("temperatures must be strictly increasing");
    }
  }
}

double tlsLoss(const TlsParams& p, double temperature) {
  p.validate();
  requirePositive(temperature, "temperature");
  return p.lossTangentProduct * std::tanh(tanhArgument(p.alpha, p.f0, temperature));
}

double tlsModel(const TlsParams& p, double temperature) {
  return 1.0 / (1.0 / p.q0 + tlsLoss(p, temperature));
}

FitResult fitTls(const TemperatureSeries& series, double f0, const TlsFitOptions& options) {
  series.validate();
  requirePositive(f0, "f0");
  const std::size_t n = series.temperatures.size();
  const std::size_t nFree = options.freezeAlpha ? 2 : 3;
  if (n < nFree + 1) throw DomainError("temperature series too short for the TLS fit");

  // Scale 1/Q by a typical Q so residuals are of order one.
  std::vector<double> sortedQ = series.qInt;
  std::nth_element(sortedQ.begin(), sortedQ.begin() + n / 2, sortedQ.end());
  const double qRef = sortedQ[n / 2];

  std::vector<double> y(n), w;
  for (std::size_t i = 0; i < n; ++i) y[i] = qRef / series.qInt[i];
  if (!series.qSigma.empty()) {
    w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double s = qRef * series.qSigma[i] / (series.qInt[i] * series.qInt[i]);
      w[i] = 1.0 / (s * s);
    }
  }

  // Linear regression of 1/Q on tanh(hbar w0 / 2 kB T) gives exact starting
  // values when alpha = 1.
  std::vector<double> th(n);
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < n; ++i) {
    th[i] = std::tanh(tanhArgument(1.0, f0, series.temperatures[i]));
    st += th[i]; sy += y[i]; stt += th[i] * th[i]; sty += th[i] * y[i];
  }
  const double den = n * stt - st * st;
  double slope = den > 0.0 ? (n * sty - st * sy) / den : 0.0;
  double intercept = (sy - slope * st) / static_cast<double>(n);
  const double yMin = *std::min_element(y.begin(), y.end());
  if (!(intercept > 0.0)) intercept = 0.5 * yMin;
  if (!(slope > 0.0)) slope = 0.1 * yMin;

  const std::vector<double> temps = series.temperatures;
  auto model = ResidualModel::pointwise(temps, [f0, qRef](std::span<const double> p, double temp) {
    return qRef * (1.0 / p[0] + p[1] * std::tanh(tanhArgument(p[2], f0, temp)));
  });

  const double q0Guess = qRef / intercept;
  const double productGuess = slope / qRef;
  std::vector<ParamSpec> specs{
      {"q0", q0Guess, 1.0, kInf, false, q0Guess},
      {"lossTangentProduct", productGuess, 0.0, kInf, false, productGuess},
      {"alpha", 1.0, kTlsAlphaMin, kTlsAlphaMax, options.freezeAlpha, 1.0},
  };
  FitResult fit = leastSquares(model, specs, y, w, options.solver);

  const double thLo = std::tanh(tanhArgument(fit.value("alpha"), f0, temps.back()));
  const double thHi = std::tanh(tanhArgument(fit.value("alpha"), f0, temps.front()));
  if (thHi - thLo < 0.2) {
    fit.addFlag("weakly_identifiable");
    fit.addWarning("tanh term varies by less than 0.2 over the temperature range; q0 and the "
                   "loss tangent product are weakly identifiable");
  }
  if (fit.degenerate) fit.addFlag("identifiability_failure");
  return fit;
}

TlsParams tlsParamsFrom(const FitResult& fit, double f0) {
  return TlsParams{fit.value("q0"), fit.value("lossTangentProduct"), fit.value("alpha"), f0};
}

double deriveResidualResistance(double q0, double f0, double sM) {
  requirePositive(q0, "q0");
  requirePositive(f0, "f0");
  requirePositive(sM, "s_m");
  return constants::mu0 * constants::twoPi * f0 / (q0 * sM);
}

double deriveQ0(double residualResistance, double f0, double sM) {
  requirePositive(residualResistance, "R_s");
  requirePositive(f0, "f0");
  requirePositive(sM, "s_m");
  return constants::mu0 * constants::twoPi * f0 / (residualResistance * sM);
}

double deriveLossTangent(double product, const CavityGeometry& geom) {
  geom.validate();
  if (!(product >= 0.0) || !std::isfinite(product)) throw DomainError("product must be >= 0");
  return product * geom.epsR / (geom.tOx * geom.sE);
}

double fillingFactor(const CavityGeometry& geom) {
  geom.validate();
  return geom.tOx * geom.sE / geom.epsR;
}

}  // namespace nbcav
