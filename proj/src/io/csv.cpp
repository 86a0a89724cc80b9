// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

#include "nbcav/io.hpp"

namespace nbcav::io {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
  while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string where(std::string_view source, std::size_t line) {
  return std::string(source) + ":" + std::to_string(line);
}

std::string joinHeader(const std::vector<std::string>& h) {
  std::string s;
  for (const auto& c : h) s += (s.empty() ? "" : ",") + c;
  return s;
}

std::vector<double> column(const CsvTable& t, std::size_t c) {
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back(r[c]);
  return out;
}

}  // namespace

std::string formatDouble(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parseDouble(std::string_view text, std::string_view what) {
  double v = 0.0;
  std::string_view t = text;
  if (!t.empty() && t.front() == '+') t.remove_prefix(1);
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    throw FormatError(std::string(what) + ": cannot parse number '" + std::string(text) + "'");
  }
  return v;
}

CsvTable readCsv(std::istream& in, std::string_view source,
                 const std::vector<std::vector<std::string>>& expected) {
  CsvTable t;
  std::string line;
  std::size_t lineNo = 0;
  bool haveHeader = false;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      t.comments.push_back(trim(std::string_view(s).substr(1)));
      continue;
    }
    if (!haveHeader) {
      t.header = split(s);
      haveHeader = true;
      if (!expected.empty()) {
        bool ok = false;
        for (const auto& e : expected) ok = ok || e == t.header;
        if (!ok) {
          std::string want;
          for (const auto& e : expected) want += (want.empty() ? "" : " or ") + joinHeader(e);
          throw FormatError(where(source, lineNo) + ": expected header '" + want + "', got '" +
                            joinHeader(t.header) + "'");
        }
      }
      continue;
    }
    const auto cells = split(s);
    if (cells.size() != t.header.size()) {
      throw FormatError(where(source, lineNo) + ": expected " + std::to_string(t.header.size()) +
                        " fields, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parseDouble(c, where(source, lineNo)));
    t.rows.push_back(std::move(row));
  }
  if (!haveHeader) throw FormatError(std::string(source) + ": missing CSV header");
  return t;
}

void writeCsv(std::ostream& out, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& columns) {
  out << joinHeader(header) << '\n';
  const std::size_t n = columns.empty() ? 0 : columns.front().size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << (c ? "," : "") << formatDouble(columns[c][i]);
    }
    out << '\n';
  }
}

ComplexTrace readComplexTrace(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"freq_hz", "re", "im"}});
  ComplexTrace tr;
  for (const auto& r : t.rows) {
    tr.frequencies.push_back(r[0]);
    tr.values.emplace_back(r[1], r[2]);
  }
  return tr;
}

void writeComplexTrace(std::ostream& out, const ComplexTrace& trace) {
  std::vector<double> re, im;
  for (const auto& v : trace.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  writeCsv(out, {"freq_hz", "re", "im"}, {trace.frequencies, re, im});
}

RingdownTrace readRingdown(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"delay_s", "power"}});
  return {column(t, 0), column(t, 1)};
}

void writeRingdown(std::ostream& out, const RingdownTrace& trace) {
  writeCsv(out, {"delay_s", "power"}, {trace.delays, trace.power});
}

TemperatureSeries readTemperatureSeries(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"temp_k", "q_int"}, {"temp_k", "q_int", "q_sigma"}});
  TemperatureSeries s{column(t, 0), column(t, 1), {}};
  if (t.header.size() == 3) s.qSigma = column(t, 2);
  return s;
}

void writeTemperatureSeries(std::ostream& out, const TemperatureSeries& s) {
  if (s.qSigma.empty()) {
    writeCsv(out, {"temp_k", "q_int"}, {s.temperatures, s.qInt});
  } else {
    writeCsv(out, {"temp_k", "q_int", "q_sigma"}, {s.temperatures, s.qInt, s.qSigma});
  }
}

QubitSpectrum readQubitSpectrum(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"detuning_hz", "population"}});
  return {column(t, 0), column(t, 1)};
}

void writeQubitSpectrum(std::ostream& out, const QubitSpectrum& s) {
  writeCsv(out, {"detuning_hz", "population"}, {s.detunings, s.population});
}

VacuumRevival readVacuumRevival(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"delay_s", "vacuum_weight"}});
  return {column(t, 0), column(t, 1)};
}

void writeVacuumRevival(std::ostream& out, const VacuumRevival& p) {
  writeCsv(out, {"delay_s", "vacuum_weight"}, {p.delays, p.weights});
}

XpsSpectrum readXpsSpectrum(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"be_ev", "counts"}});
  XpsSpectrum s;
  s.bindingEnergy = column(t, 0);
  s.counts = column(t, 1);
  return s;
}

void writeXpsSpectrum(std::ostream& out, const XpsSpectrum& s) {
  writeCsv(out, {"be_ev", "counts"}, {s.bindingEnergy, s.counts});
}

std::vector<ProfilePoint> readDepthProfile(std::istream& in, std::string_view source) {
  const auto t = readCsv(in, source, {{"cycle", "oxygen_fraction"}});
  std::vector<ProfilePoint> out;
  for (const auto& r : t.rows) out.push_back({r[0], r[1]});
  return out;
}

void writeDepthProfile(std::ostream& out, std::span<const ProfilePoint> profile) {
  std::vector<double> c, f;
  for (const auto& p : profile) {
    c.push_back(p.cycle);
    f.push_back(p.oxygenFraction);
  }
  writeCsv(out, {"cycle", "oxygen_fraction"}, {c, f});
}

HeightMap readHeightMapCsv(std::istream& in, std::string_view source) {
  HeightMap m;
  m.pixelPitch = 1.0;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string s = trim(line);
    if (s.empty()) continue;
    if (s.front() == '#') {
      const std::string body = trim(std::string_view(s).substr(1));
      constexpr std::string_view key = "pitch_m=";
      if (body.rfind(key, 0) == 0) {
        m.pixelPitch = parseDouble(trim(std::string_view(body).substr(key.size())), where(source, lineNo));
      }
      continue;
    }
    const auto cells = split(s);
    if (m.rows == 0) {
      m.cols = cells.size();
    } else if (cells.size() != m.cols) {
      throw FormatError(where(source, lineNo) + ": height map rows must have equal length");
    }
    for (const auto& c : cells) m.heights.push_back(parseDouble(c, where(source, lineNo)));
    ++m.rows;
  }
  if (m.rows == 0) throw FormatError(std::string(source) + ": empty height map");
  return m;
}

void writeHeightMapCsv(std::ostream& out, const HeightMap& m) {
  out << "# pitch_m=" << formatDouble(m.pixelPitch) << '\n';
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out << (c ? "," : "") << formatDouble(m.at(r, c));
    out << '\n';
  }
}

namespace {

template <typename T>
T readLe(std::istream& in, std::string_view source) {
  std::array<unsigned char, sizeof(T)> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), sizeof(T))) {
    throw FormatError(std::string(source) + ": truncated binary height map");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

template <typename T>
void writeLe(std::ostream& out, T v) {
  std::array<unsigned char, sizeof(T)> b{};
  std::memcpy(b.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b.begin(), b.end());
  out.write(reinterpret_cast<const char*>(b.data()), sizeof(T));
}

}  // namespace

HeightMap readHeightMapBinary(std::istream& in, std::string_view source) {
  HeightMap m;
  m.rows = readLe<std::uint32_t>(in, source);
  m.cols = readLe<std::uint32_t>(in, source);
  m.pixelPitch = readLe<double>(in, source);
  if (m.rows == 0 || m.cols == 0 || m.rows * m.cols > (std::size_t{1} << 28)) {
    throw FormatError(std::string(source) + ": implausible height map dimensions");
  }
  m.heights.resize(m.rows * m.cols);
  for (double& h : m.heights) h = readLe<double>(in, source);
  return m;
}

void writeHeightMapBinary(std::ostream& out, const HeightMap& m) {
  writeLe(out, static_cast<std::uint32_t>(m.rows));
  writeLe(out, static_cast<std::uint32_t>(m.cols));
  writeLe(out, m.pixelPitch);
  for (double h : m.heights) writeLe(out, h);
}

}  // namespace nbcav::io
