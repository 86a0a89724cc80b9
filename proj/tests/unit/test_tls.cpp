// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "nbcav/synth.hpp"
#include "nbcav/tls.hpp"

using namespace nbcav;
using testing::relErr;

TEST_SUITE("tls") {

TEST_CASE("temperature limits") {
  TlsParams p{4e9, 3e-10, 1.0, 6.5e9};
  // First-order tail at high T: Q/q0 - 1 = -q0 product x with x = hbar w0 / 2 kB T.
  const double x = singlePhotonEnergy(p.f0) / (2.0 * constants::kB * 1e6);
  CHECK(relErr(1.0 - tlsModel(p, 1e6) / p.q0, p.q0 * p.lossTangentProduct * x) < 1e-6);
  CHECK(relErr(tlsModel(p, 1e15), p.q0) < 1e-9);
  CHECK(relErr(tlsModel(p, 1e-6), 1.0 / (1.0 / p.q0 + p.lossTangentProduct)) < 1e-9);
}

TEST_CASE("value at 10 mK") {
  TlsParams p{1e10, 5.3e-10, 1.0, 6.5e9};
  CHECK(relErr(tlsModel(p, 0.010), 1587301587.3016629) < 1e-9);
  CHECK(tlsModel(p, 0.010) == doctest::Approx(1.58e9).epsilon(0.005));
}

TEST_CASE("monotone in temperature and bounded TLS term") {
  TlsParams p{2e9, 8e-10, 1.7, 5.0e9};
  double last = 0.0;
  for (double t = 0.005; t < 5.0; t *= 1.3) {
    const double q = tlsModel(p, t);
    CHECK(q >= last);
    last = q;
    const double extra = 1.0 / q - 1.0 / p.q0;
    CHECK(extra >= -1e-25);
    CHECK(extra <= p.lossTangentProduct * (1 + 1e-12));
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(tlsModel(TlsParams{4e9, 3e-10, 5.0, 6.5e9}, 0.1), DomainError);
  CHECK_THROWS_AS(tlsModel(TlsParams{4e9, -1e-10, 1.0, 6.5e9}, 0.1), DomainError);
  CHECK_THROWS_AS(tlsModel(TlsParams{4e9, 1e-10, 1.0, 6.5e9}, 0.0), DomainError);
  TemperatureSeries bad{{0.1, 0.05}, {1e9, 1e9}, {}};
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("noiseless round trip") {
  TlsParams p{4e9, 3e-10, 1.0, 6.5e9};
  const auto temps = synth::linspace(0.020, 0.400, 25);
  const auto fit = fitTls(synth::genTemperatureSeries(p, temps), p.f0);
  CHECK(fit.converged);
  CHECK(relErr(fit.value("q0"), p.q0) < 1e-6);
  CHECK(relErr(fit.value("lossTangentProduct"), p.lossTangentProduct) < 1e-6);
  CHECK(relErr(fit.value("alpha"), p.alpha) < 1e-6);
}

TEST_CASE("round trip over a grid of q0 and loss tangent product") {
  const auto temps = synth::linspace(0.020, 0.400, 25);
  int failures = 0;
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      TlsParams p{std::pow(10.0, 8.0 + 2.0 * i / 9.0), std::pow(10.0, -11.0 + 3.0 * j / 9.0), 1.0, 6.5e9};
      const auto fit = fitTls(synth::genTemperatureSeries(p, temps), p.f0);
      const bool ok = relErr(fit.value("q0"), p.q0) < 1e-6 &&
                      relErr(fit.value("lossTangentProduct"), p.lossTangentProduct) < 1e-6 &&
                      relErr(fit.value("alpha"), p.alpha) < 1e-6;
      if (!ok) {
        ++failures;
        MESSAGE("q0=" << p.q0 << " product=" << p.lossTangentProduct << " -> " << fit.value("q0") << ", "
                      << fit.value("lossTangentProduct") << ", " << fit.value("alpha"));
      }
    }
  }
  CHECK(failures == 0);
}

TEST_CASE("3% Q noise recovers the product within 10%") {
  TlsParams p{4e9, 3e-10, 1.0, 6.5e9};
  const auto temps = synth::linspace(0.020, 0.400, 25);
  const synth::NoiseSpec noise{synth::NoiseKind::Multiplicative, 0.03, 3};
  const auto fit = fitTls(synth::genTemperatureSeries(p, temps, noise), p.f0);
  CHECK(relErr(fit.value("lossTangentProduct"), p.lossTangentProduct) < 0.10);
}

TEST_CASE("product ratio of 1.75 is recovered") {
  const auto temps = synth::linspace(0.020, 0.400, 25);
  TlsParams a{4e9, 2e-10, 1.0, 6.5e9}, b{4e9, 3.5e-10, 1.0, 6.5e9};
  const auto fa = fitTls(synth::genTemperatureSeries(a, temps, {synth::NoiseKind::Multiplicative, 0.01, 21}), a.f0);
  const auto fb = fitTls(synth::genTemperatureSeries(b, temps, {synth::NoiseKind::Multiplicative, 0.01, 22}), b.f0);
  const double ratio = fb.value("lossTangentProduct") / fa.value("lossTangentProduct");
  CHECK(std::abs(ratio - 1.75) < 0.1);
}

TEST_CASE("frozen alpha") {
  TlsParams p{4e9, 3e-10, 1.0, 6.5e9};
  TlsFitOptions opts;
  opts.freezeAlpha = true;
  const auto fit = fitTls(synth::genTemperatureSeries(p, synth::linspace(0.02, 0.4, 10)), p.f0, opts);
  CHECK(fit.value("alpha") == 1.0);
  CHECK(fit.frozen[2]);
  CHECK(relErr(fit.value("q0"), p.q0) < 1e-6);
}

TEST_CASE("narrow temperature range warns") {
  TlsParams p{4e9, 3e-10, 1.0, 6.5e9};
  const auto fit = fitTls(synth::genTemperatureSeries(p, synth::linspace(0.010, 0.030, 12)), p.f0);
  CHECK(fit.hasFlag("weakly_identifiable"));
}

TEST_CASE("residual resistance") {
  CHECK(relErr(deriveResidualResistance(4e9, 6.5e9, 3000.0), 4.2768285761335902e-09) < 1e-12);
  CHECK(relErr(deriveResidualResistance(8e9, 6.5e9, 3000.0), 0.5 * deriveResidualResistance(4e9, 6.5e9, 3000.0)) < 1e-15);
  for (double q0 : {1e8, 3.3e9, 2e11}) {
    CHECK(relErr(deriveQ0(deriveResidualResistance(q0, 6.5e9, 2500.0), 6.5e9, 2500.0), q0) < 1e-15);
  }
  CHECK_THROWS_AS(deriveResidualResistance(0.0, 6.5e9, 3000.0), DomainError);
}

TEST_CASE("loss tangent from the filling factor") {
  CavityGeometry g{3000.0, 3000.0, 3.59e-9, 33.0};
  CHECK(deriveLossTangent(0.0, g) == 0.0);
  CHECK(relErr(deriveLossTangent(3.59e-10, g), 1.1e-3) < 1e-12);
  CavityGeometry thin = g;
  thin.tOx *= 0.5;
  CHECK(relErr(deriveLossTangent(3.59e-10, thin), 2.0 * deriveLossTangent(3.59e-10, g)) < 1e-15);
  // An implausible geometry (S_e three orders too small) trips the sanity limit.
  CavityGeometry tiny = g;
  tiny.sE = 3.0;
  CHECK(deriveLossTangent(3.59e-10, tiny) > kLossTangentSanityLimit);
  CHECK(relErr(fillingFactor(g) * deriveLossTangent(3.59e-10, g), 3.59e-10) < 1e-15);
}

}  // TEST_SUITE
