// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nbcav/io.hpp"
#include "nbcav/resonator.hpp"

namespace nbcav::cli {

using io::Json;

inline constexpr const char* kToolName = "nbcav";
inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitFormat = 2,
  kExitNotConverged = 3,
  kExitPrecondition = 4,
};

/// `--set key=value` pairs. Keys outside `allowed` are a format error.
class Overrides {
 public:
  Overrides() = default;
  Overrides(const std::vector<std::string>& items, const std::vector<std::string>& allowed);

  std::optional<double> get(std::string_view key) const;
  double get(std::string_view key, double fallback) const;
  bool empty() const { return values_.empty(); }
  Json toJson() const;

 private:
  std::map<std::string, double, std::less<>> values_;
};

/// Number with an optional unit suffix, e.g. "6.5GHz", "12 ms", "4.2e9".
double parseFrequency(std::string_view text, std::string_view what);
double parseTime(std::string_view text, std::string_view what);

/// Whole input as text; "-" reads standard input.
std::string readInput(const std::string& path);
std::string sourceName(const std::string& path);
bool fileExists(const std::string& path);

struct Outcome {
  Json result;
  int exitCode = kExitOk;          // kExitOk or kExitNotConverged
  std::optional<std::string> csv;  // replaces the flattened CSV form
  std::optional<std::string> svg;
};

using Job = std::function<Outcome(const std::string& input)>;

struct RunSpec {
  std::string command;
  std::string input;                    // file, directory, "-" or empty
  std::vector<std::string> extensions;  // files matched in a directory
  bool batch = true;                    // directories fan out to one job per file
  std::string output = "-";
  std::string format = "json";
  std::string plot;  // svg path, or a directory in batch mode
  Json options = Json::object();
};

/// Runs the job(s), writes the document and returns the exit code. Errors go
/// to stderr as JSON; a failed single-file run writes nothing.
int run(const RunSpec& spec, const Job& job);

/// Error document for stderr.
Json errorJson(int code, std::string_view kind, std::string_view message, std::string_view input);
/// Maps the in-flight exception to an exit code and kind.
std::pair<int, std::string> classifyCurrentException();

/// Files in `dir` with one of the extensions, sorted by path.
std::vector<std::string> listFiles(const std::string& dir, const std::vector<std::string>& extensions);
bool isDirectory(const std::string& path);

/// Two-panel plot of Re and Im of the data and the fitted model.
std::string s11Svg(const ComplexTrace& trace, const ResonatorParams& fit);

}  // namespace nbcav::cli
