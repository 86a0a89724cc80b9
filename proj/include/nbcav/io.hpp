// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nbcav/core.hpp"
#include "nbcav/dispersive.hpp"
#include "nbcav/etchcalc.hpp"
#include "nbcav/resonator.hpp"
#include "nbcav/tls.hpp"
#include "nbcav/xps.hpp"

// File formats. Every reader throws FormatError on a wrong header, a ragged
// row or an unparsable number, naming the source and line. Numbers are
// written in shortest round-trip form, so write -> read is bit-exact.
namespace nbcav::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to the same double.
std::string formatDouble(double v);
/// Whole-string parse; throws FormatError mentioning `what` on failure.
double parseDouble(std::string_view text, std::string_view what);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> comments;  // '#' lines, without the marker
};

/// Reads a numeric CSV. `expected` lists acceptable headers; empty accepts any.
CsvTable readCsv(std::istream& in, std::string_view source,
                 const std::vector<std::vector<std::string>>& expected = {});
void writeCsv(std::ostream& out, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& columns);

ComplexTrace readComplexTrace(std::istream& in, std::string_view source = "<stream>");
void writeComplexTrace(std::ostream& out, const ComplexTrace& trace);

RingdownTrace readRingdown(std::istream& in, std::string_view source = "<stream>");
void writeRingdown(std::ostream& out, const RingdownTrace& trace);

TemperatureSeries readTemperatureSeries(std::istream& in, std::string_view source = "<stream>");
void writeTemperatureSeries(std::ostream& out, const TemperatureSeries& series);

QubitSpectrum readQubitSpectrum(std::istream& in, std::string_view source = "<stream>");
void writeQubitSpectrum(std::ostream& out, const QubitSpectrum& spectrum);

VacuumRevival readVacuumRevival(std::istream& in, std::string_view source = "<stream>");
void writeVacuumRevival(std::ostream& out, const VacuumRevival& points);

/// `be_ev,counts`; cycle and dwell come from the sidecar.
XpsSpectrum readXpsSpectrum(std::istream& in, std::string_view source = "<stream>");
void writeXpsSpectrum(std::ostream& out, const XpsSpectrum& spectrum);
/// Applies `{ "sputter_cycle": n, "dwell_s": s }`.
void applyXpsSidecar(XpsSpectrum& spectrum, const Json& sidecar);
Json xpsSidecar(const XpsSpectrum& spectrum);
/// Sidecar path for a spectrum file: same stem, .json extension.
std::string sidecarPath(const std::string& csvPath);

/// `cycle,oxygen_fraction`.
std::vector<ProfilePoint> readDepthProfile(std::istream& in, std::string_view source = "<stream>");
void writeDepthProfile(std::ostream& out, std::span<const ProfilePoint> profile);

/// CSV grid (one row per line, optional "# pitch_m=<v>" line) or the binary
/// raster: uint32 rows, uint32 cols, float64 pitch_m, row-major float64
/// heights, all little-endian.
HeightMap readHeightMapCsv(std::istream& in, std::string_view source = "<stream>");
void writeHeightMapCsv(std::ostream& out, const HeightMap& map);
HeightMap readHeightMapBinary(std::istream& in, std::string_view source = "<stream>");
void writeHeightMapBinary(std::ostream& out, const HeightMap& map);

Json readJson(std::istream& in, std::string_view source = "<stream>");
Json readJsonFile(const std::string& path);
std::string readTextFile(const std::string& path);

CavityGeometry geometryFromJson(const Json& j);
EtchPlan etchPlanFromJson(const Json& j);
Json etchPlanToJson(const EtchPlan& plan);
std::vector<DoubletSpec> doubletsFromJson(const Json& j);
Json doubletsToJson(std::span<const DoubletSpec> doublets);
std::vector<DoubletSpec> readDoublets(const std::string& path);
ThicknessInputs thicknessInputsFromJson(const Json& j);

struct AttenuationChain {
  double sourceDbm = 0.0;
  std::vector<double> attenuationDb;
};
AttenuationChain attenuationFromJson(const Json& j);

/// {"parameters": {name: {value, sigma, frozen}}, "covariance": ..., ...}.
/// Infinite sigmas are written as null.
Json fitResultToJson(const FitResult& fit);
/// Doubles as JSON numbers; non-finite values become null.
Json number(double v);

}  // namespace nbcav::io
