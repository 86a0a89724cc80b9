// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "nbcav/io.hpp"
#include "nbcav/xps.hpp"

namespace nbcav {

namespace {

constexpr std::array<std::pair<NbSpecies, std::string_view>, 6> kSpeciesNames{{
    {NbSpecies::NbMetal, "NbMetal"},
    {NbSpecies::Nb2O5, "Nb2O5"},
    {NbSpecies::NbO2, "NbO2"},
    {NbSpecies::NbO, "NbO"},
    {NbSpecies::NbOx, "NbOx"},
    {NbSpecies::NbHx, "NbHx"},
}};

// exp(-u^2 / 2 s^2) * erfcx(b), with erfcx(b) = exp(b^2) erfc(b).
double scaledErfc(double b, double gauss) {
  if (b < 20.0) return gauss * std::exp(b * b) * std::erfc(b);
  const double b2 = b * b;
  const double series = 1.0 - 0.5 / b2 + 0.75 / (b2 * b2) - 1.875 / (b2 * b2 * b2);
  return gauss * series / (b * std::sqrt(std::numbers::pi));
}

// Unit-area exponentially modified Gaussian with its tail toward +x.
double emg(double u, double sigma, double tau) {
  const double b = (sigma / tau - u / sigma) / std::numbers::sqrt2;
  if (b < 0.0) {
    const double a = sigma * sigma / (2.0 * tau * tau) - u / tau;
    return std::exp(a) * std::erfc(b) / (2.0 * tau);
  }
  return scaledErfc(b, std::exp(-u * u / (2.0 * sigma * sigma))) / (2.0 * tau);
}

}  // namespace

std::string_view speciesName(NbSpecies s) {
  for (const auto& [sp, name] : kSpeciesNames) {
    if (sp == s) return name;
  }
  return "unknown";
}

NbSpecies parseSpecies(std::string_view name) {
  for (const auto& [sp, n] : kSpeciesNames) {
    if (n == name) return sp;
  }
  throw DomainError("unknown Nb species '" + std::string(name) + "'");
}

void DoubletSpec::validate() const {
  if (!std::isfinite(position52)) throw DomainError("doublet position must be finite");
  if (!(fwhm > 0.0) || !std::isfinite(fwhm)) throw DomainError("doublet FWHM must be positive");
  if (!(glMix >= 0.0 && glMix <= 1.0)) throw DomainError("GL mix must lie in [0, 1]");
  if (!(asymmetry >= 0.0) || !std::isfinite(asymmetry)) throw DomainError("asymmetry must be >= 0");
  if (asymmetry != 0.0 && species != NbSpecies::NbMetal) {
    throw DomainError("only the metal doublet may be asymmetric");
  }
  if (!(area >= 0.0) || !std::isfinite(area)) throw DomainError("doublet area must be >= 0");
}

std::array<PeakComponent, 2> doubletComponents(const DoubletSpec& d) {
  return {PeakComponent{d.position52, kNb3dAreaFraction52 * d.area, d.fwhm, d.glMix, d.asymmetry},
          PeakComponent{d.position52 + kNb3dSplitting, kNb3dAreaFraction32 * d.area, d.fwhm,
                        d.glMix, d.asymmetry}};
}

double peakShape(double energy, double center, double fwhm, double glMix, double asymmetry) {
  const double u = energy - center;
  const double gamma = 0.5 * fwhm;
  const double lorentz = gamma / (std::numbers::pi * (u * u + gamma * gamma));
  const double fourLn2 = 4.0 * std::numbers::ln2;
  const double gauss = std::sqrt(fourLn2 / std::numbers::pi) / fwhm * std::exp(-fourLn2 * u * u / (fwhm * fwhm));
  const double pv = glMix * lorentz + (1.0 - glMix) * gauss;
  if (asymmetry == 0.0) return pv;
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  return (pv + asymmetry * emg(u, sigma, fwhm)) / (1.0 + asymmetry);
}

std::vector<double> nb3dModel(std::span<const DoubletSpec> doublets, std::span<const double> energies) {
  std::vector<double> out(energies.size(), 0.0);
  for (const auto& d : doublets) {
    for (const auto& c : doubletComponents(d)) {
      if (c.area == 0.0) continue;
      for (std::size_t i = 0; i < energies.size(); ++i) {
        out[i] += c.area * peakShape(energies[i], c.center, c.fwhm, c.glMix, c.asymmetry);
      }
    }
  }
  return out;
}

std::string defaultDoubletPath() { return std::string(NBCAV_DATA_DIR) + "/nb3d_doublets.json"; }

std::vector<DoubletSpec> defaultDoublets() { return io::readDoublets(defaultDoubletPath()); }

Nb3dFit fitNb3d(const XpsSpectrum& spectrum, std::span<const DoubletSpec> doublets,
                const Nb3dFitOptions& options) {
  spectrum.validate(32, false);
  if (doublets.empty() || doublets.size() > 6) throw DomainError("need 1 to 6 doublets");
  for (std::size_t i = 0; i < doublets.size(); ++i) {
    doublets[i].validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (doublets[i].species == doublets[j].species) throw DomainError("duplicate doublet species");
    }
  }
  const auto& e = spectrum.bindingEnergy;
  const std::size_t n = e.size(), m = doublets.size();

  // Areas enter linearly: solve for them with the supplied shapes as a start.
  Eigen::MatrixXd basis(n, m);
  for (std::size_t j = 0; j < m; ++j) {
    DoubletSpec unit = doublets[j];
    unit.area = 1.0;
    const auto col = nb3dModel(std::span(&unit, 1), e);
    for (std::size_t i = 0; i < n; ++i) basis(i, j) = col[i];
  }
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(spectrum.counts.data(), n);
  const Eigen::VectorXd areas0 = basis.colPivHouseholderQr().solve(y);
  const double totalGuess = std::max(areas0.cwiseMax(0.0).sum(), 1e-12);

  std::vector<ParamSpec> specs;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& d = doublets[j];
    const std::string tag(speciesName(d.species));
    const double a = std::max(areas0[j], 1e-3 * totalGuess / static_cast<double>(m));
    specs.push_back({"area_" + tag, a, 0.0, kInf, false, totalGuess / static_cast<double>(m)});
    specs.push_back({"position_" + tag, d.position52, d.position52 - options.positionWindow,
                     d.position52 + options.positionWindow, !options.fitPositions, 1.0});
    specs.push_back({"fwhm_" + tag, std::clamp(d.fwhm, options.fwhmLo, options.fwhmHi),
                     options.fwhmLo, options.fwhmHi, !options.fitWidths, 1.0});
  }

  const std::vector<DoubletSpec> shapes(doublets.begin(), doublets.end());
  const std::vector<double> grid = e;
  ResidualModel model(n, [shapes, grid](std::span<const double> p, std::span<double> out) {
    std::vector<DoubletSpec> ds = shapes;
    for (std::size_t j = 0; j < ds.size(); ++j) {
      ds[j].area = p[3 * j];
      ds[j].position52 = p[3 * j + 1];
      ds[j].fwhm = p[3 * j + 2];
    }
    const auto v = nb3dModel(ds, grid);
    std::copy(v.begin(), v.end(), out.begin());
  });

  Nb3dFit out;
  out.fit = leastSquares(model, specs, spectrum.counts, {}, options.solver);
  out.doublets = shapes;
  double total = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    out.doublets[j].area = out.fit.values[3 * j];
    out.doublets[j].position52 = out.fit.values[3 * j + 1];
    out.doublets[j].fwhm = out.fit.values[3 * j + 2];
    total += out.doublets[j].area;
  }
  for (std::size_t j = 0; j < m; ++j) {
    out.fractions.push_back(total > 0.0 ? out.doublets[j].area / total : 0.0);
  }

  const Matrix& cov = out.fit.covariance;
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < a; ++b) {
      const double va = cov(3 * a, 3 * a), vb = cov(3 * b, 3 * b);
      if (!(va > 0.0 && vb > 0.0) || !std::isfinite(va) || !std::isfinite(vb)) continue;
      const double corr = cov(3 * a, 3 * b) / std::sqrt(va * vb);
      if (std::abs(corr) > options.correlationWarning) {
        const std::string na(speciesName(shapes[a].species)), nb(speciesName(shapes[b].species));
        out.fit.addFlag("overlap:" + nb + "," + na);
        out.fit.addWarning("areas of " + nb + " and " + na + " are strongly correlated (|corr| = " +
                           std::to_string(std::abs(corr)) + ")");
      }
    }
  }
  return out;
}

}  // namespace nbcav
