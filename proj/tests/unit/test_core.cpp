// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <doctest.h>

#include <numbers>

#include "helpers.hpp"
#include "nbcav/core.hpp"

using namespace nbcav;
using testing::relErr;

TEST_SUITE("core") {

TEST_CASE("decay time from Q") {
  CHECK(qToEnergyDecayTime(constants::twoPi, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Critically coupled Q_int = 1.4e9 at 6.5 GHz.
  CHECK(relErr(qToEnergyDecayTime(7.0e8, 6.5e9), 0.017139763102204112) < 1e-12);
  CHECK(relErr(qToEnergyDecayTime(4.6e8, 6.5e9), 0.01126327289573413) < 1e-12);
  CHECK(qToEnergyDecayTime(4.6e8, 6.5e9) == doctest::Approx(11.3e-3).epsilon(0.005));
}

TEST_CASE("decay time and Q round trip") {
  for (double q : {1.0, 3.3e3, 7.0e8, 1.47e9, 2.5e11}) {
    for (double f0 : {1.0, 5.1e6, 6.5e9}) {
      CHECK(relErr(timeToQ(qToEnergyDecayTime(q, f0), f0), q) < 1e-12);
    }
  }
}

TEST_CASE("non-positive inputs are rejected") {
  CHECK_THROWS_AS(qToEnergyDecayTime(0.0, 6.5e9), DomainError);
  CHECK_THROWS_AS(qToEnergyDecayTime(1e9, -1.0), DomainError);
  CHECK_THROWS_AS(timeToQ(-1.0, 6.5e9), DomainError);
  CHECK_THROWS_AS(singlePhotonEnergy(0.0), DomainError);
  CHECK_THROWS_AS(FrequencyPoint(0.0), DomainError);
}

TEST_CASE("single photon energy") {
  CHECK(relErr(singlePhotonEnergy(6.5e9), 4.3069455948610518e-24) < 1e-12);
  CHECK(singlePhotonEnergy(13e9) == 2.0 * singlePhotonEnergy(6.5e9));
}

TEST_CASE("frequency point") {
  FrequencyPoint f(6.5e9);
  CHECK(f.hz() == 6.5e9);
  CHECK(f.angular() == constants::twoPi * 6.5e9);
}

TEST_CASE("fit result lookup and flags") {
  FitResult r;
  r.names = {"a", "b"};
  r.values = {1.0, 2.0};
  r.sigmas = {0.1, 0.2};
  CHECK(r.value("b") == 2.0);
  CHECK(r.sigma("a") == 0.1);
  CHECK_FALSE(r.index("c").has_value());
  CHECK_THROWS(r.value("c"));
  r.addFlag("x");
  r.addFlag("x");
  CHECK(r.flags.size() == 1);
  CHECK(r.hasFlag("x"));
}

}  // TEST_SUITE
