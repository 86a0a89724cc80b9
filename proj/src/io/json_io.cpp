// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The nbcav Authors

#include <cmath>
#include <fstream>
#include <sstream>

#include "nbcav/io.hpp"

namespace nbcav::io {

namespace {

double requireNumber(const Json& j, const char* key, std::string_view ctx) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string(ctx) + ": missing key '" + key + "'");
  }
  const auto& v = j.at(key);
  if (!v.is_number()) throw FormatError(std::string(ctx) + ": '" + key + "' must be a number");
  return v.get<double>();
}

double optionalNumber(const Json& j, const char* key, double fallback, std::string_view ctx) {
  return j.contains(key) ? requireNumber(j, key, ctx) : fallback;
}

void rejectUnknownKeys(const Json& j, std::initializer_list<std::string_view> allowed,
                       std::string_view ctx) {
  for (const auto& [k, v] : j.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == k;
    if (!ok) throw FormatError(std::string(ctx) + ": unknown key '" + k + "'");
  }
}

}  // namespace

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json readJson(std::istream& in, std::string_view source) {
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(source) + ": invalid JSON: " + e.what());
  }
}

std::string readTextFile(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Json readJsonFile(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open '" + path + "'");
  return readJson(f, path);
}

void applyXpsSidecar(XpsSpectrum& s, const Json& j) {
  constexpr std::string_view ctx = "XPS sidecar";
  if (!j.is_object()) throw FormatError("XPS sidecar must be an object");
  rejectUnknownKeys(j, {"sputter_cycle", "dwell_s"}, ctx);
  if (j.contains("sputter_cycle")) {
    if (!j.at("sputter_cycle").is_number_integer()) {
      throw FormatError("XPS sidecar: 'sputter_cycle' must be an integer");
    }
    s.sputterCycle = j.at("sputter_cycle").get<int>();
  }
  s.dwellPerCycle = optionalNumber(j, "dwell_s", s.dwellPerCycle, ctx);
}

Json xpsSidecar(const XpsSpectrum& s) {
  Json j;
  j["sputter_cycle"] = s.sputterCycle;
  j["dwell_s"] = s.dwellPerCycle;
  return j;
}

std::string sidecarPath(const std::string& csvPath) {
  const auto slash = csvPath.find_last_of('/');
  const auto dot = csvPath.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return csvPath + ".json";
  return csvPath.substr(0, dot) + ".json";
}

CavityGeometry geometryFromJson(const Json& j) {
  constexpr std::string_view ctx = "geometry";
  if (!j.is_object()) throw FormatError("geometry must be an object");
  rejectUnknownKeys(j, {"s_e", "s_m", "t_ox_m", "eps_r"}, ctx);
  return {requireNumber(j, "s_e", ctx), requireNumber(j, "s_m", ctx),
          requireNumber(j, "t_ox_m", ctx), requireNumber(j, "eps_r", ctx)};
}

EtchPlan etchPlanFromJson(const Json& j) {
  constexpr std::string_view ctx = "etch plan";
  if (!j.is_object()) throw FormatError("etch plan must be an object");
  rejectUnknownKeys(j, {"surface_area_m2", "etch_depth_um", "bath_volume_l", "etch_rate_um_per_min",
                        "power_density_lo_w_per_m2", "power_density_hi_w_per_m2"},
                    ctx);
  EtchPlan p;
  p.surfaceArea = requireNumber(j, "surface_area_m2", ctx);
  p.etchDepth = requireNumber(j, "etch_depth_um", ctx);
  p.bathVolume = requireNumber(j, "bath_volume_l", ctx);
  p.etchRate = requireNumber(j, "etch_rate_um_per_min", ctx);
  p.powerDensityLo = optionalNumber(j, "power_density_lo_w_per_m2", p.powerDensityLo, ctx);
  p.powerDensityHi = optionalNumber(j, "power_density_hi_w_per_m2", p.powerDensityHi, ctx);
  return p;
}

Json etchPlanToJson(const EtchPlan& p) {
  Json j;
  j["surface_area_m2"] = p.surfaceArea;
  j["etch_depth_um"] = p.etchDepth;
  j["bath_volume_l"] = p.bathVolume;
  j["etch_rate_um_per_min"] = p.etchRate;
  j["power_density_lo_w_per_m2"] = p.powerDensityLo;
  j["power_density_hi_w_per_m2"] = p.powerDensityHi;
  return j;
}

std::vector<DoubletSpec> doubletsFromJson(const Json& j) {
  if (!j.is_array()) throw FormatError("doublet config must be an array of species records");
  std::vector<DoubletSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    const std::string ctx = "doublet " + std::to_string(i);
    if (!r.is_object()) throw FormatError(ctx + ": must be an object");
    rejectUnknownKeys(r, {"species", "position_ev", "fwhm_ev", "gl_mix", "asymmetry", "area"}, ctx);
    if (!r.contains("species") || !r.at("species").is_string()) {
      throw FormatError(ctx + ": 'species' must be a string");
    }
    DoubletSpec d;
    try {
      d.species = parseSpecies(r.at("species").get<std::string>());
    } catch (const DomainError& e) {
      throw FormatError(ctx + ": " + e.what());
    }
    d.position52 = requireNumber(r, "position_ev", ctx);
    d.fwhm = optionalNumber(r, "fwhm_ev", d.fwhm, ctx);
    d.glMix = optionalNumber(r, "gl_mix", d.glMix, ctx);
    d.asymmetry = optionalNumber(r, "asymmetry", 0.0, ctx);
    d.area = optionalNumber(r, "area", 0.0, ctx);
    out.push_back(d);
  }
  return out;
}

Json doubletsToJson(std::span<const DoubletSpec> doublets) {
  Json arr = Json::array();
  for (const auto& d : doublets) {
    Json r;
    r["species"] = std::string(speciesName(d.species));
    r["position_ev"] = d.position52;
    r["fwhm_ev"] = d.fwhm;
    r["gl_mix"] = d.glMix;
    r["asymmetry"] = d.asymmetry;
    r["area"] = d.area;
    arr.push_back(std::move(r));
  }
  return arr;
}

std::vector<DoubletSpec> readDoublets(const std::string& path) { return doubletsFromJson(readJsonFile(path)); }

ThicknessInputs thicknessInputsFromJson(const Json& j) {
  constexpr std::string_view ctx = "thickness inputs";
  if (!j.is_object()) throw FormatError("thickness inputs must be an object");
  rejectUnknownKeys(j, {"species", "i_oxide", "i_metal", "lambda_oxide_nm", "lambda_metal_nm",
                        "density_ratio", "theta_rad"},
                    ctx);
  ThicknessInputs in;
  in.iOxide = requireNumber(j, "i_oxide", ctx);
  in.iMetal = requireNumber(j, "i_metal", ctx);
  in.lambdaOxide = requireNumber(j, "lambda_oxide_nm", ctx);
  in.lambdaMetal = requireNumber(j, "lambda_metal_nm", ctx);
  in.densityRatio = requireNumber(j, "density_ratio", ctx);
  in.theta = optionalNumber(j, "theta_rad", in.theta, ctx);
  return in;
}

AttenuationChain attenuationFromJson(const Json& j) {
  constexpr std::string_view ctx = "attenuation chain";
  if (!j.is_object()) throw FormatError("attenuation chain must be an object");
  rejectUnknownKeys(j, {"source_dbm", "attenuation_db"}, ctx);
  AttenuationChain c;
  c.sourceDbm = requireNumber(j, "source_dbm", ctx);
  if (!j.contains("attenuation_db") || !j.at("attenuation_db").is_array()) {
    throw FormatError("attenuation chain: 'attenuation_db' must be an array");
  }
  for (const auto& v : j.at("attenuation_db")) {
    if (!v.is_number()) throw FormatError("attenuation chain: entries must be numbers");
    c.attenuationDb.push_back(v.get<double>());
  }
  return c;
}

Json fitResultToJson(const FitResult& fit) {
  Json j;
  Json params = Json::object();
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    Json p;
    p["value"] = number(fit.values[i]);
    p["sigma"] = number(fit.sigmas[i]);
    p["frozen"] = static_cast<bool>(fit.frozen[i]);
    params[fit.names[i]] = std::move(p);
  }
  j["parameters"] = std::move(params);
  Json cov = Json::array();
  for (std::size_t r = 0; r < fit.covariance.rows(); ++r) {
    Json row = Json::array();
    for (std::size_t c = 0; c < fit.covariance.cols(); ++c) row.push_back(number(fit.covariance(r, c)));
    cov.push_back(std::move(row));
  }
  j["covariance"] = std::move(cov);
  j["residual_rms"] = number(fit.residualRms);
  j["chi_square"] = number(fit.chiSquare);
  j["dof"] = fit.dof;
  j["converged"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["degenerate"] = fit.degenerate;
  j["flags"] = fit.flags;
  j["warnings"] = fit.warnings;
  return j;
}

}  // namespace nbcav::io
