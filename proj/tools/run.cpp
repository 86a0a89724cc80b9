// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <iterator>
#include <sstream>
#include <thread>
#include <variant>

#include "cli.hpp"

namespace nbcav::cli {

namespace fs = std::filesystem;

Overrides::Overrides(const std::vector<std::string>& items, const std::vector<std::string>& allowed) {
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw FormatError("--set expects key=value, got '" + item + "'");
    }
    const std::string key = item.substr(0, eq);
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      std::string known;
      for (const auto& a : allowed) known += (known.empty() ? "" : ", ") + a;
      throw FormatError("unknown override key '" + key + "'" +
                        (known.empty() ? std::string(" (this command takes none)")
                                       : " (known: " + known + ")"));
    }
    values_[key] = io::parseDouble(std::string_view(item).substr(eq + 1), "--set " + key);
  }
}

std::optional<double> Overrides::get(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double Overrides::get(std::string_view key, double fallback) const {
  return get(key).value_or(fallback);
}

Json Overrides::toJson() const {
  Json j = Json::object();
  for (const auto& [k, v] : values_) j[k] = io::number(v);
  return j;
}

namespace {

struct Unit {
  std::string_view suffix;
  double factor;
};

double parseWithUnits(std::string_view text, std::string_view what, std::initializer_list<Unit> units) {
  std::size_t end = text.size();
  while (end > 0 && std::isalpha(static_cast<unsigned char>(text[end - 1]))) --end;
  std::string_view num = text.substr(0, end);
  const std::string_view suffix = text.substr(end);
  while (!num.empty() && num.back() == ' ') num.remove_suffix(1);
  double factor = 1.0;
  if (!suffix.empty()) {
    bool found = false;
    for (const auto& u : units) {
      if (u.suffix == suffix) {
        factor = u.factor;
        found = true;
      }
    }
    if (!found) throw FormatError(std::string(what) + ": unknown unit '" + std::string(suffix) + "'");
  }
  return io::parseDouble(num, what) * factor;
}

}  // namespace

double parseFrequency(std::string_view text, std::string_view what) {
  return parseWithUnits(text, what, {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}});
}

double parseTime(std::string_view text, std::string_view what) {
  return parseWithUnits(text, what, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}});
}

std::string readInput(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  if (isDirectory(path)) throw FormatError("'" + path + "' is a directory");
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string sourceName(const std::string& path) { return path == "-" ? "<stdin>" : path; }

bool fileExists(const std::string& path) {
  std::error_code ec;
  return fs::is_regular_file(path, ec);
}

bool isDirectory(const std::string& path) {
  std::error_code ec;
  return fs::is_directory(path, ec);
}

std::vector<std::string> listFiles(const std::string& dir, const std::vector<std::string>& extensions) {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = entry.path().extension().string();
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end()) {
      out.push_back(entry.path().string());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Json errorJson(int code, std::string_view kind, std::string_view message, std::string_view input) {
  Json e;
  e["code"] = code;
  e["kind"] = std::string(kind);
  e["message"] = std::string(message);
  if (!input.empty()) e["input"] = std::string(input);
  Json j;
  j["error"] = std::move(e);
  return j;
}

std::pair<int, std::string> classifyCurrentException() {
  try {
    throw;
  } catch (const FormatError&) {
    return {kExitFormat, "format_error"};
  } catch (const Json::exception&) {
    return {kExitFormat, "format_error"};
  } catch (const DomainError&) {
    return {kExitPrecondition, "precondition_violation"};
  } catch (const EvaluationError&) {
    return {kExitPrecondition, "evaluation_error"};
  } catch (const fs::filesystem_error&) {
    return {kExitFormat, "io_error"};
  } catch (const std::exception&) {
    return {kExitPrecondition, "error"};
  }
}

namespace {

struct Failure {
  int code;
  std::string kind;
  std::string message;
};

using JobResult = std::variant<Outcome, Failure>;

JobResult guarded(const Job& job, const std::string& input) {
  try {
    return job(input);
  } catch (const std::exception& e) {
    auto [code, kind] = classifyCurrentException();
    return Failure{code, kind, e.what()};
  }
}

void reportFailure(const Failure& f, const std::string& input) {
  std::cerr << errorJson(f.code, f.kind, f.message, input).dump() << '\n';
}

void reportNotConverged(const std::string& input) {
  std::cerr << errorJson(kExitNotConverged, "not_converged", "fit did not converge; results written",
                         input)
                   .dump()
            << '\n';
}

std::string csvCell(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_float()) return io::formatDouble(v.get<double>());
  if (v.is_number()) return v.dump();
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// Dotted key paths for every leaf; arrays use numeric indices.
void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, Json>>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    if (j.empty()) return;
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else {
    out.emplace_back(prefix, j);
  }
}

std::string flatCsv(const Json& result, const std::string& input, bool withInput) {
  std::vector<std::pair<std::string, Json>> rows;
  flatten(result, "", rows);
  std::string s;
  for (const auto& [k, v] : rows) {
    if (withInput) s += csvCell(input) + ",";
    s += csvCell(k) + "," + csvCell(v) + "\n";
  }
  return s;
}

Json metadata(const RunSpec& spec, const std::vector<std::string>& inputs) {
  Json m;
  m["tool"] = kToolName;
  m["version"] = kVersion;
  m["command"] = spec.command;
  m["inputs"] = inputs;
  m["options"] = spec.options;
  return m;
}

void writeText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write '" + path + "'");
  f << text;
  if (!f) throw FormatError("failed writing '" + path + "'");
}

std::string stemOf(const std::string& path) { return fs::path(path).stem().string(); }

int runSingle(const RunSpec& spec, const Job& job) {
  const JobResult r = guarded(job, spec.input);
  if (const auto* f = std::get_if<Failure>(&r)) {
    reportFailure(*f, spec.input);
    return f->code;
  }
  const auto& o = std::get<Outcome>(r);
  std::string text;
  if (spec.format == "csv") {
    text = o.csv ? *o.csv : "key,value\n" + flatCsv(o.result, spec.input, false);
  } else {
    Json doc;
    doc["metadata"] = metadata(spec, spec.input.empty() ? std::vector<std::string>{}
                                                        : std::vector<std::string>{spec.input});
    doc["result"] = o.result;
    text = doc.dump(2) + "\n";
  }
  writeText(spec.output, text);
  if (!spec.plot.empty() && o.svg) writeText(spec.plot, *o.svg);
  if (o.exitCode == kExitNotConverged) reportNotConverged(spec.input);
  return o.exitCode;
}

int runBatch(const RunSpec& spec, const Job& job) {
  const auto files = listFiles(spec.input, spec.extensions);
  if (files.empty()) throw FormatError("no matching input files in '" + spec.input + "'");
  if (!spec.plot.empty() && !isDirectory(spec.plot)) {
    throw FormatError("--plot must name an existing directory in batch mode");
  }

  std::vector<JobResult> results(files.size(), Failure{});
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t start = 0; start < files.size(); start += width) {
    const std::size_t stop = std::min(files.size(), start + width);
    std::vector<std::future<JobResult>> pending;
    for (std::size_t i = start; i < stop; ++i) {
      pending.push_back(std::async(std::launch::async, [&job, &files, i] { return guarded(job, files[i]); }));
    }
    for (std::size_t i = start; i < stop; ++i) results[i] = pending[i - start].get();
  }

  int exitCode = kExitOk;
  Json entries = Json::array();
  std::string csv = "input,key,value\n";
  for (std::size_t i = 0; i < files.size(); ++i) {
    Json e;
    e["input"] = files[i];
    if (const auto* f = std::get_if<Failure>(&results[i])) {
      reportFailure(*f, files[i]);
      exitCode = std::max(exitCode, f->code);
      e["status"] = f->code;
      e["error"] = errorJson(f->code, f->kind, f->message, files[i])["error"];
      csv += csvCell(files[i]) + ",error," + csvCell(f->message) + "\n";
    } else {
      const auto& o = std::get<Outcome>(results[i]);
      if (o.exitCode == kExitNotConverged) reportNotConverged(files[i]);
      exitCode = std::max(exitCode, o.exitCode);
      e["status"] = o.exitCode;
      e["result"] = o.result;
      csv += flatCsv(o.result, files[i], true);
      if (!spec.plot.empty() && o.svg) {
        writeText((fs::path(spec.plot) / (stemOf(files[i]) + ".svg")).string(), *o.svg);
      }
    }
    entries.push_back(std::move(e));
  }

  if (spec.format == "csv") {
    writeText(spec.output, csv);
  } else {
    Json doc;
    doc["metadata"] = metadata(spec, files);
    doc["files"] = std::move(entries);
    writeText(spec.output, doc.dump(2) + "\n");
  }
  return exitCode;
}

}  // namespace

int run(const RunSpec& spec, const Job& job) {
  try {
    if (spec.batch && !spec.input.empty() && spec.input != "-" && isDirectory(spec.input)) {
      return runBatch(spec, job);
    }
    return runSingle(spec, job);
  } catch (const std::exception& e) {
    auto [code, kind] = classifyCurrentException();
    std::cerr << errorJson(code, kind, e.what(), spec.input).dump() << '\n';
    return code;
  }
}

}  // namespace nbcav::cli
