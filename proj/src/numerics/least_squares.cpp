// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <random>

#include "nbcav/kernels.hpp"
#include "nbcav/numerics.hpp"
#include "numerics/detail.hpp"

namespace nbcav {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void validateParamSpecs(std::span<const ParamSpec> specs) {
  for (const auto& s : specs) {
    if (s.name.empty()) throw DomainError("parameter without a name");
    if (std::isnan(s.lower) || std::isnan(s.upper) || !std::isfinite(s.initial)) {
      throw DomainError("parameter " + s.name + " has non-finite initial value or NaN bound");
    }
    if (!(s.lower <= s.initial && s.initial <= s.upper)) {
      throw DomainError("parameter " + s.name + " initial value outside [lower, upper]");
    }
  }
}

namespace {

// Maps a bounded external parameter onto an unconstrained internal coordinate
// of order one. Internal coordinates are what the damped step operates on.
class BoundTransform {
 public:
  BoundTransform(double initial, double lower, double upper) : lo_(lower), hi_(upper) {
    const bool hasLo = std::isfinite(lower);
    const bool hasHi = std::isfinite(upper);
    if (hasLo && hasHi) {
      kind_ = Kind::Both;
    } else if (hasLo) {
      kind_ = Kind::Lower;
      const double d = initial - lower;
      scale_ = d > 0.0 ? d : std::max(std::abs(lower), 1.0);
    } else if (hasHi) {
      kind_ = Kind::Upper;
      const double d = upper - initial;
      scale_ = d > 0.0 ? d : std::max(std::abs(upper), 1.0);
    } else {
      kind_ = Kind::None;
      base_ = initial;
      scale_ = initial != 0.0 ? std::abs(initial) : 1.0;
    }
  }

  double toExternal(double u) const {
    double p = 0.0;
    switch (kind_) {
      case Kind::None: return base_ + scale_ * u;
      case Kind::Lower: p = lo_ + scale_ * halfHyperbola(u); break;
      case Kind::Upper: p = hi_ - scale_ * halfHyperbola(u); break;
      case Kind::Both: p = lo_ + (hi_ - lo_) * 0.5 * (1.0 + std::sin(u)); break;
    }
    return std::clamp(p, lo_, hi_);
  }

  // Points sitting exactly on a bound are nudged inside; the transform has a
  // zero derivative there and the optimiser could never leave.
  double toInternal(double p) const {
    switch (kind_) {
      case Kind::None: return (p - base_) / scale_;
      case Kind::Lower: return inverseHalfHyperbola(std::max((p - lo_) / scale_, 5e-7));
      case Kind::Upper: return inverseHalfHyperbola(std::max((hi_ - p) / scale_, 5e-7));
      case Kind::Both: {
        const double s = std::clamp(2.0 * (p - lo_) / (hi_ - lo_) - 1.0, -1.0 + 1e-9, 1.0 - 1e-9);
        return std::asin(s);
      }
    }
    return 0.0;
  }

  // The transforms are even (or periodic) about the bound, so a step that
  // crosses it reflects back inside and can stall the damping loop. Such
  // steps are shortened to approach the bound instead.
  double limitStep(double u, double uTrial) const {
    constexpr double kHalfPi = 1.5707963267948966;
    switch (kind_) {
      case Kind::None: return uTrial;
      case Kind::Lower:
      case Kind::Upper:
        return (u > 0.0 && uTrial < 0.0) || (u < 0.0 && uTrial > 0.0) ? 1e-2 * u : uTrial;
      case Kind::Both:
        if (uTrial > kHalfPi && u <= kHalfPi) return kHalfPi - 1e-2 * (kHalfPi - u);
        if (uTrial < -kHalfPi && u >= -kHalfPi) return -kHalfPi + 1e-2 * (u + kHalfPi);
        return uTrial;
    }
    return uTrial;
  }

  double derivative(double u) const {
    switch (kind_) {
      case Kind::None: return scale_;
      case Kind::Lower: return scale_ * u / std::sqrt(1.0 + u * u);
      case Kind::Upper: return -scale_ * u / std::sqrt(1.0 + u * u);
      case Kind::Both: return (hi_ - lo_) * 0.5 * std::cos(u);
    }
    return 0.0;
  }

 private:
  enum class Kind { None, Lower, Upper, Both };
  // sqrt(1 + u^2) - 1 without cancellation.
  static double halfHyperbola(double u) { return u * u / (std::sqrt(1.0 + u * u) + 1.0); }
  static double inverseHalfHyperbola(double t) { return std::sqrt(t * (t + 2.0)); }

  Kind kind_ = Kind::None;
  double lo_, hi_;
  double base_ = 0.0;
  double scale_ = 1.0;
};

struct Problem {
  const ResidualModel& model;
  std::span<const ParamSpec> specs;
  std::span<const double> y;
  std::vector<double> w;  // empty = unit weights
  std::vector<std::size_t> free;
  std::vector<double> lower, upper, floorScale;
};

struct RunOutcome {
  std::vector<double> p;
  double chi2 = kInf;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

double weightedChi2(std::span<const double> r, std::span<const double> w) {
  return kernels::weightedDot(r, r, w);
}

void residuals(const Problem& prob, std::span<const double> f, std::span<double> r) {
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = prob.y[i] - f[i];
}

RunOutcome runLevenbergMarquardt(const Problem& prob, std::vector<double> start,
                                 const LeastSquaresOptions& opt) {
  const std::size_t n = prob.y.size();
  const std::size_t m = prob.free.size();

  std::vector<BoundTransform> transforms;
  transforms.reserve(m);
  Eigen::VectorXd u(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = prob.free[k];
    transforms.emplace_back(start[j], prob.lower[j], prob.upper[j]);
    u[k] = transforms[k].toInternal(start[j]);
    start[j] = transforms[k].toExternal(u[k]);
  }

  RunOutcome out;
  out.p = std::move(start);
  std::vector<double> f(n), r(n), fTrial(n), rTrial(n);
  prob.model.evaluate(out.p, f);
  residuals(prob, f, r);
  double chi2 = weightedChi2(r, prob.w);
  out.trace.push_back(chi2);

  if (m == 0 || chi2 == 0.0) {
    out.chi2 = chi2;
    out.converged = true;
    return out;
  }

  double lambda = 1e-3;
  std::vector<double> trial(out.p);
  Eigen::MatrixXd a(m, m);
  Eigen::VectorXd g(m), diag(m);

  int iter = 0;
  bool converged = false;
  while (iter < opt.maxIterations && !converged) {
    ++iter;
    auto cols = detail::jacobianColumns(prob.model, out.p, f, prob.free, prob.lower, prob.upper,
                                        prob.floorScale);
    for (std::size_t k = 0; k < m; ++k) {
      const double d = transforms[k].derivative(u[k]);
      for (double& v : cols[k]) v *= d;
    }
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t l = 0; l <= k; ++l) {
        a(k, l) = a(l, k) = kernels::weightedDot(cols[k], cols[l], prob.w);
      }
      g[k] = kernels::weightedDot(cols[k], r, prob.w);
      diag[k] = a(k, k) > 0.0 ? a(k, k) : 1.0;
    }

    bool accepted = false;
    while (!accepted) {
      Eigen::MatrixXd damped = a;
      for (std::size_t k = 0; k < m; ++k) damped(k, k) += lambda * diag[k];
      Eigen::LDLT<Eigen::MatrixXd> ldlt(damped);
      Eigen::VectorXd delta = ldlt.solve(g);
      if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
        lambda *= 10.0;
        if (lambda > 1e16) break;
        continue;
      }
      Eigen::VectorXd uTrial = u + delta;
      std::vector<Eigen::Index> held, moving;
      for (std::size_t k = 0; k < m; ++k) {
        const double limited = transforms[k].limitStep(u[k], uTrial[k]);
        const auto idx = static_cast<Eigen::Index>(k);
        if (limited != uTrial[k]) {
          uTrial[k] = limited;
          held.push_back(idx);
        } else {
          moving.push_back(idx);
        }
      }
      // Re-solve for the other coordinates with the limited ones fixed, so
      // their steps do not assume a move that was not taken.
      if (!held.empty() && !moving.empty()) {
        const auto nm = static_cast<Eigen::Index>(moving.size());
        Eigen::MatrixXd sub(nm, nm);
        Eigen::VectorXd rhs(nm);
        for (Eigen::Index i = 0; i < nm; ++i) {
          rhs[i] = g[moving[i]];
          for (Eigen::Index h : held) rhs[i] -= a(moving[i], h) * (uTrial[h] - u[h]);
          for (Eigen::Index j = 0; j < nm; ++j) sub(i, j) = damped(moving[i], moving[j]);
        }
        Eigen::LDLT<Eigen::MatrixXd> subLdlt(sub);
        const Eigen::VectorXd d2 = subLdlt.solve(rhs);
        if (subLdlt.info() == Eigen::Success && d2.allFinite()) {
          for (Eigen::Index i = 0; i < nm; ++i) {
            const auto k = static_cast<std::size_t>(moving[i]);
            uTrial[moving[i]] = transforms[k].limitStep(u[moving[i]], u[moving[i]] + d2[i]);
          }
        }
      }
      for (std::size_t k = 0; k < m; ++k) trial[prob.free[k]] = transforms[k].toExternal(uTrial[k]);
      prob.model.evaluate(trial, fTrial);
      residuals(prob, fTrial, rTrial);
      const double chi2Trial = weightedChi2(rTrial, prob.w);

      if (chi2Trial < chi2) {
        const double relDecrease = (chi2 - chi2Trial) / chi2;
        const double relStep = (uTrial - u).lpNorm<Eigen::Infinity>() /
                               std::max(1.0, u.lpNorm<Eigen::Infinity>());
        u = uTrial;
        out.p = trial;
        std::swap(f, fTrial);
        std::swap(r, rTrial);
        chi2 = chi2Trial;
        out.trace.push_back(chi2);
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
        if (chi2 == 0.0 || relDecrease < opt.objectiveTolerance || relStep < opt.stepTolerance) {
          converged = true;
        }
      } else {
        lambda *= 10.0;
        if (lambda > 1e16) break;
      }
    }
    // No downhill step exists at any damping: a minimum to working precision.
    if (!accepted) converged = true;
  }

  out.chi2 = chi2;
  out.iterations = iter;
  out.converged = converged;
  return out;
}

struct CovarianceOutcome {
  Matrix covariance;
  std::vector<double> sigmas;
  std::vector<std::size_t> unidentifiable;
  double maxCorrelation = 0.0;
};

CovarianceOutcome estimateCovariance(const Problem& prob, std::span<const double> p,
                                     double reducedChi2) {
  const std::size_t total = p.size();
  const std::size_t m = prob.free.size();
  CovarianceOutcome out;
  out.covariance = Matrix(total, total, 0.0);
  out.sigmas.assign(total, 0.0);
  if (m == 0) return out;

  const std::vector<double> base = prob.model.evaluate(p);
  const auto cols = detail::jacobianColumns(prob.model, p, base, prob.free, prob.lower,
                                            prob.upper, prob.floorScale);
  Eigen::MatrixXd a(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l <= k; ++l) {
      a(k, l) = a(l, k) = kernels::weightedDot(cols[k], cols[l], prob.w);
    }
  }

  // Work on the correlation-scaled normal matrix so the rank test does not
  // depend on parameter units.
  Eigen::VectorXd d(m);
  std::vector<bool> dead(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    d[k] = std::sqrt(std::max(a(k, k), 0.0));
    if (!(d[k] > 0.0)) dead[k] = true;
  }
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(m, m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      if (!dead[k] && !dead[l]) c(k, l) = a(k, l) / (d[k] * d[l]);
    }
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (dead[k]) c(k, k) = 0.0;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
  const Eigen::VectorXd& ev = eig.eigenvalues();
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  const double evMax = std::max(ev.maxCoeff(), 0.0);
  const double cutoff = 1e-14 * std::max(evMax, 1.0);

  Eigen::MatrixXd pinv = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index e = 0; e < ev.size(); ++e) {
    if (ev[e] > cutoff) {
      pinv += vecs.col(e) * vecs.col(e).transpose() / ev[e];
    } else {
      for (std::size_t k = 0; k < m; ++k) {
        if (std::abs(vecs(static_cast<Eigen::Index>(k), e)) > 0.05) dead[k] = true;
      }
    }
  }

  for (std::size_t k = 0; k < m; ++k) {
    if (dead[k]) out.unidentifiable.push_back(prob.free[k]);
  }
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t jk = prob.free[k];
    for (std::size_t l = 0; l < m; ++l) {
      const std::size_t jl = prob.free[l];
      if (dead[k] || dead[l]) {
        out.covariance(jk, jl) = (k == l) ? kInf : 0.0;
      } else {
        out.covariance(jk, jl) = reducedChi2 * pinv(k, l) / (d[k] * d[l]);
      }
    }
    out.sigmas[jk] = dead[k] ? kInf : std::sqrt(std::max(out.covariance(jk, jk), 0.0));
  }
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < k; ++l) {
      if (dead[k] || dead[l]) continue;
      const double denom = std::sqrt(pinv(k, k) * pinv(l, l));
      if (denom > 0.0) out.maxCorrelation = std::max(out.maxCorrelation, std::abs(pinv(k, l)) / denom);
    }
  }
  return out;
}

Problem makeProblem(const ResidualModel& model, std::span<const ParamSpec> specs,
                    std::span<const double> y, std::span<const double> weights) {
  validateParamSpecs(specs);
  if (model.outputs() != y.size()) {
    throw DomainError("model output length does not match data length");
  }
  if (!weights.empty() && weights.size() != y.size()) {
    throw DomainError("weights length does not match data length");
  }
  for (double wi : weights) {
    if (!(wi > 0.0) || !std::isfinite(wi)) throw DomainError("weights must be positive and finite");
  }
  for (double yi : y) {
    if (!std::isfinite(yi)) throw DomainError("data contain non-finite values");
  }
  Problem prob{model, specs, y, std::vector<double>(weights.begin(), weights.end()), {}, {}, {}, {}};
  for (std::size_t j = 0; j < specs.size(); ++j) {
    prob.lower.push_back(specs[j].lower);
    prob.upper.push_back(specs[j].upper);
    double floor = specs[j].scale;
    if (!(floor > 0.0)) floor = specs[j].initial != 0.0 ? std::abs(specs[j].initial) : 1.0;
    prob.floorScale.push_back(floor);
    if (!specs[j].frozen) prob.free.push_back(j);
  }
  if (!prob.free.empty() && y.size() < prob.free.size() + 1) {
    throw DomainError("need at least one more data point than free parameters");
  }
  return prob;
}

std::vector<double> perturbedStart(const Problem& prob, std::span<const double> initial,
                                   std::uint64_t seed, double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> p(initial.begin(), initial.end());
  for (std::size_t j : prob.free) {
    BoundTransform t(initial[j], prob.lower[j], prob.upper[j]);
    p[j] = t.toExternal(t.toInternal(initial[j]) + spread * normal(rng));
  }
  return p;
}

}  // namespace

FitResult leastSquares(const ResidualModel& model, std::span<const ParamSpec> specs,
                       std::span<const double> y, std::span<const double> weights,
                       const LeastSquaresOptions& options) {
  Problem prob = makeProblem(model, specs, y, weights);
  const std::size_t n = y.size();

  std::vector<double> initial;
  for (const auto& s : specs) initial.push_back(s.initial);

  std::vector<std::vector<double>> starts{initial};
  for (const auto& extra : options.extraStarts) {
    if (extra.size() != specs.size()) throw DomainError("extra start has wrong length");
    std::vector<double> p = initial;
    for (std::size_t j : prob.free) p[j] = std::clamp(extra[j], prob.lower[j], prob.upper[j]);
    starts.push_back(std::move(p));
  }
  for (int k = 0; k < options.multiStart; ++k) {
    const std::uint64_t s = splitmix64(options.seed ^ splitmix64(static_cast<std::uint64_t>(k) + 1));
    starts.push_back(perturbedStart(prob, initial, s, options.multiStartSpread));
  }

  std::vector<RunOutcome> runs(starts.size());
  // Replica 0 is the caller's guess; its evaluation errors propagate. Other
  // replicas explore and are dropped if they fail.
  runs[0] = runLevenbergMarquardt(prob, starts[0], options);
  if (starts.size() > 1) {
    auto runReplica = [&](std::size_t k) {
      try {
        return runLevenbergMarquardt(prob, starts[k], options);
      } catch (const EvaluationError&) {
        return RunOutcome{};
      }
    };
    if (options.parallel) {
      std::vector<std::future<RunOutcome>> futures;
      for (std::size_t k = 1; k < starts.size(); ++k) {
        futures.push_back(std::async(std::launch::async, runReplica, k));
      }
      for (std::size_t k = 1; k < starts.size(); ++k) runs[k] = futures[k - 1].get();
    } else {
      for (std::size_t k = 1; k < starts.size(); ++k) runs[k] = runReplica(k);
    }
  }
  std::size_t best = 0;
  for (std::size_t k = 1; k < runs.size(); ++k) {
    if (runs[k].chi2 < runs[best].chi2) best = k;
  }
  const RunOutcome& run = runs[best];

  FitResult result;
  for (const auto& s : specs) {
    result.names.push_back(s.name);
    result.frozen.push_back(s.frozen);
  }
  result.values = run.p;
  result.chiSquare = run.chi2;
  result.iterations = run.iterations;
  result.converged = run.converged;
  result.objectiveTrace = run.trace;
  result.dof = n - prob.free.size();

  double sumW = 0.0;
  if (prob.w.empty()) {
    sumW = static_cast<double>(n);
  } else {
    for (double wi : prob.w) sumW += wi;
  }
  result.residualRms = std::sqrt(run.chi2 / sumW);

  const double reduced = result.dof > 0 ? run.chi2 / static_cast<double>(result.dof) : 0.0;
  CovarianceOutcome cov = estimateCovariance(prob, result.values, reduced);
  result.covariance = std::move(cov.covariance);
  result.sigmas = std::move(cov.sigmas);
  if (!cov.unidentifiable.empty()) {
    result.degenerate = true;
    result.addFlag("degenerate");
    std::string names;
    for (std::size_t j : cov.unidentifiable) names += (names.empty() ? "" : ", ") + specs[j].name;
    result.addWarning("singular normal equations; unidentifiable parameters: " + names);
  }
  if (cov.maxCorrelation > 0.9999) {
    result.addWarning("parameters are strongly correlated (max |corr| > 0.9999)");
  }
  if (!result.converged) {
    result.addFlag("not_converged");
    result.addWarning("iteration cap reached before convergence");
  }
  for (std::size_t j : prob.free) {
    const double v = result.values[j];
    const double tol = 1e-9 * prob.floorScale[j];
    const auto near = [v, tol](double bound) {
      return std::isfinite(bound) && std::abs(v - bound) <= std::max(1e-9 * std::abs(bound), tol);
    };
    if (near(prob.lower[j]) || near(prob.upper[j])) result.addFlag("at_bound:" + specs[j].name);
  }
  return result;
}

std::vector<ParamSpec> specsAtSolution(std::span<const ParamSpec> specs, const FitResult& fit) {
  std::vector<ParamSpec> out(specs.begin(), specs.end());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j].initial = std::clamp(fit.values[j], out[j].lower, out[j].upper);
  }
  return out;
}

std::vector<double> parameterVector(const FitResult& fit) { return fit.values; }

FitResult bootstrapUncertainty(const ResidualModel& model, std::span<const ParamSpec> specs,
                               std::span<const double> y, std::span<const double> weights,
                               const FitResult& fit, const BootstrapOptions& options,
                               const LeastSquaresOptions& lsq) {
  if (options.resamples < 2) throw DomainError("bootstrap needs at least two resamples");
  const std::size_t n = y.size();
  const std::vector<double> fitted = model.evaluate(fit.values);
  std::vector<double> scaledResid(n), sqrtW(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (!weights.empty()) sqrtW[i] = std::sqrt(weights[i]);
    scaledResid[i] = (y[i] - fitted[i]) * sqrtW[i];
  }
  const auto start = specsAtSolution(specs, fit);
  LeastSquaresOptions inner = lsq;
  inner.multiStart = 0;
  inner.extraStarts.clear();

  std::mt19937_64 rng(splitmix64(options.seed ^ 0xb007u));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const std::size_t p = specs.size();
  std::vector<std::vector<double>> samples;
  std::vector<double> yStar(n);
  for (int b = 0; b < options.resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) yStar[i] = fitted[i] + scaledResid[pick(rng)] / sqrtW[i];
    try {
      samples.push_back(leastSquares(model, start, yStar, weights, inner).values);
    } catch (const EvaluationError&) {
      // A pathological resample; skip it.
    }
  }
  if (samples.size() < 2) throw EvaluationError("bootstrap refits failed");

  FitResult out = fit;
  std::vector<double> mean(p, 0.0);
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < p; ++j) mean[j] += s[j];
  }
  for (double& v : mean) v /= static_cast<double>(samples.size());
  out.covariance = Matrix(p, p, 0.0);
  for (const auto& s : samples) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t k = 0; k < p; ++k) out.covariance(j, k) += (s[j] - mean[j]) * (s[k] - mean[k]);
    }
  }
  const double denom = static_cast<double>(samples.size() - 1);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = 0; k < p; ++k) out.covariance(j, k) /= denom;
    out.sigmas[j] = std::sqrt(out.covariance(j, j));
  }
  out.addFlag("bootstrap");
  return out;
}

}  // namespace nbcav
