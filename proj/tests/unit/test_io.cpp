// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "helpers.hpp"
#include "nbcav/io.hpp"
#include "nbcav/synth.hpp"

using namespace nbcav;

TEST_SUITE("io") {

TEST_CASE("numbers round trip bit-exactly") {
  for (double v : {0.0, -0.0, 1.0 / 3.0, 6.5e9 + 0.123, 1e-300, 5e-324, std::numeric_limits<double>::max(), -2.718281828459045}) {
    const double back = io::parseDouble(io::formatDouble(v), "test");
    CHECK(std::signbit(back) == std::signbit(v));
    CHECK(back == v);
  }
  CHECK(io::parseDouble("+1.5", "test") == 1.5);
  CHECK_THROWS_AS(io::parseDouble("1.5x", "test"), FormatError);
  CHECK_THROWS_AS(io::parseDouble("", "test"), FormatError);
}

TEST_CASE("complex trace round trip") {
  const ResonatorParams p{6.5e9, 1.47e9, 1.4e9, 0.1, 0.8, 40e-9, 0.3};
  const auto tr = synth::genS11(p, synth::linspace(p.f0 - 20, p.f0 + 20, 64), {synth::NoiseKind::Additive, 0.01, 3});
  std::stringstream ss;
  io::writeComplexTrace(ss, tr);
  const auto back = io::readComplexTrace(ss);
  CHECK(back.frequencies == tr.frequencies);
  CHECK(back.values == tr.values);
}

TEST_CASE("other CSV formats round trip") {
  const auto t = synth::linspace(0.0, 0.03, 17);
  {
    const auto rd = synth::genDecay(12e-3, 1.0, 0.01, t, {synth::NoiseKind::Multiplicative, 0.05, 1});
    std::stringstream ss;
    io::writeRingdown(ss, rd);
    const auto back = io::readRingdown(ss);
    CHECK(back.delays == rd.delays);
    CHECK(back.power == rd.power);
  }
  {
    TemperatureSeries s = synth::genTemperatureSeries({4e9, 3e-10, 1.0, 6.5e9}, synth::linspace(0.02, 0.4, 9));
    std::stringstream a;
    io::writeTemperatureSeries(a, s);
    CHECK(a.str().rfind("temp_k,q_int\n", 0) == 0);
    CHECK(io::readTemperatureSeries(a).qInt == s.qInt);
    s.qSigma.assign(s.qInt.size(), 1e7);
    std::stringstream b;
    io::writeTemperatureSeries(b, s);
    CHECK(io::readTemperatureSeries(b).qSigma == s.qSigma);
  }
  {
    const auto v = synth::genVacuumRevival(1.0, 11.3e-3, t, {synth::NoiseKind::Additive, 0.02, 4});
    std::stringstream ss;
    io::writeVacuumRevival(ss, v);
    CHECK(io::readVacuumRevival(ss).weights == v.weights);
  }
  {
    std::vector<ProfilePoint> prof{{0, 0.6}, {1, 0.3}, {2, 0.05}, {3, 0.02}};
    std::stringstream ss;
    io::writeDepthProfile(ss, prof);
    const auto back = io::readDepthProfile(ss);
    REQUIRE(back.size() == 4);
    CHECK(back[1].oxygenFraction == 0.3);
  }
}

TEST_CASE("comments and blank lines are skipped") {
  std::stringstream ss("# exported\n\ndelay_s,power\n0,1\n# mid\n1e-3,0.5\n");
  const auto rd = io::readRingdown(ss);
  CHECK(rd.delays.size() == 2);
  CHECK(rd.power[1] == 0.5);
}

TEST_CASE("format errors name the source and line") {
  std::stringstream bad("frequency,re,im\n1,2,3\n");
  try {
    io::readComplexTrace(bad, "trace.csv");
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("trace.csv:1") != std::string::npos);
  }
  std::stringstream ragged("delay_s,power\n0,1\n1,2,3\n");
  CHECK_THROWS_AS(io::readRingdown(ragged), FormatError);
  std::stringstream junk("delay_s,power\n0,abc\n");
  CHECK_THROWS_AS(io::readRingdown(junk), FormatError);
  std::stringstream empty("# nothing\n");
  CHECK_THROWS_AS(io::readRingdown(empty), FormatError);
}

TEST_CASE("XPS spectrum and sidecar") {
  XpsSpectrum s{{210.0, 209.5, 209.0}, {10.0, 12.5, 11.0}, 4, 15.0};
  std::stringstream ss;
  io::writeXpsSpectrum(ss, s);
  auto back = io::readXpsSpectrum(ss);
  io::applyXpsSidecar(back, io::xpsSidecar(s));
  CHECK(back.bindingEnergy == s.bindingEnergy);
  CHECK(back.counts == s.counts);
  CHECK(back.sputterCycle == 4);
  CHECK(back.dwellPerCycle == 15.0);
  CHECK_THROWS_AS(io::applyXpsSidecar(back, io::Json{{"sputter_cycles", 3}}), FormatError);
  CHECK(io::sidecarPath("data/run.1/spec.csv") == "data/run.1/spec.json");
  CHECK(io::sidecarPath("data/run.1/spec") == "data/run.1/spec.json");
}

TEST_CASE("height maps") {
  HeightMap m{2, 3, 2.5e-6, {1e-6, 2e-6, 3e-6, -1e-6, 0.0, 1.0 / 3.0}};
  std::stringstream csv;
  io::writeHeightMapCsv(csv, m);
  const auto a = io::readHeightMapCsv(csv);
  CHECK(a.rows == 2);
  CHECK(a.cols == 3);
  CHECK(a.pixelPitch == m.pixelPitch);
  CHECK(a.heights == m.heights);

  std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
  io::writeHeightMapBinary(bin, m);
  CHECK(bin.str().size() == 4 + 4 + 8 + 6 * 8);
  CHECK(static_cast<unsigned char>(bin.str()[0]) == 2);  // little-endian rows
  const auto b = io::readHeightMapBinary(bin);
  CHECK(b.heights == m.heights);
  CHECK(b.pixelPitch == m.pixelPitch);

  std::stringstream truncated(bin.str().substr(0, 20));
  CHECK_THROWS_AS(io::readHeightMapBinary(truncated), FormatError);
  std::stringstream ragged("1,2,3\n4,5\n");
  CHECK_THROWS_AS(io::readHeightMapCsv(ragged), FormatError);
}

TEST_CASE("JSON configs") {
  const auto g = io::geometryFromJson(io::Json::parse(R"({"s_e": 3000, "s_m": 2500, "t_ox_m": 3.59e-9, "eps_r": 33})"));
  CHECK(g.sE == 3000.0);
  CHECK(g.tOx == 3.59e-9);
  CHECK_THROWS_AS(io::geometryFromJson(io::Json::parse(R"({"s_e": 3000, "s_m": 2500, "t_ox": 3.59e-9, "eps_r": 33})")), FormatError);

  EtchPlan plan;
  plan.surfaceArea = 0.007;
  plan.etchDepth = 100.0;
  plan.bathVolume = 0.6;
  plan.etchRate = 1.0;
  const auto back = io::etchPlanFromJson(io::etchPlanToJson(plan));
  CHECK(back.surfaceArea == plan.surfaceArea);
  CHECK(back.powerDensityHi == 900.0);

  const auto ds = defaultDoublets();
  REQUIRE(ds.size() == 6);
  const auto again = io::doubletsFromJson(io::doubletsToJson(ds));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    CHECK(again[i].species == ds[i].species);
    CHECK(again[i].position52 == ds[i].position52);
    CHECK(again[i].asymmetry == ds[i].asymmetry);
  }
  CHECK_THROWS(io::doubletsFromJson(io::Json::parse(R"([{"species": "Unobtainium", "position_ev": 1}])")));

  const auto att = io::attenuationFromJson(io::Json::parse(R"({"source_dbm": -20, "attenuation_db": [20, 30, 10]})"));
  CHECK(att.sourceDbm == -20.0);
  CHECK(att.attenuationDb.size() == 3);
}

TEST_CASE("fit results serialise with null for infinite sigma") {
  FitResult f;
  f.names = {"a", "b"};
  f.values = {1.5, 2.0};
  f.sigmas = {0.1, kInf};
  f.frozen = {false, false};
  f.covariance = Matrix(2, 2);
  f.covariance(1, 1) = kInf;
  f.converged = true;
  f.addFlag("degenerate");
  const auto j = io::fitResultToJson(f);
  CHECK(j["parameters"]["a"]["value"] == 1.5);
  CHECK(j["parameters"]["b"]["sigma"].is_null());
  CHECK(j["covariance"][1][1].is_null());
  CHECK(j["flags"][0] == "degenerate");
  const std::string dumped = j.dump();
  CHECK(dumped.find("inf") == std::string::npos);
}

}  // TEST_SUITE
