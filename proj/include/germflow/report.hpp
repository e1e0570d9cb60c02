#pragma once

// Case files and JSON serialization of every report type. Keys are emitted
// in a fixed order so identical runs produce identical bytes.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "germflow/analysis.hpp"
#include "germflow/flow.hpp"
#include "germflow/germ.hpp"
#include "germflow/homotopy.hpp"

namespace germflow {

using Json = nlohmann::ordered_json;

/// Malformed or unreadable input (exit code 64).
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CaseFile {
  std::string id;
  std::vector<std::string> vars;
  std::string f;
  unsigned r = 1;
  std::optional<std::string> h;
  std::optional<std::string> g;
  std::optional<double> radius;
  std::optional<int> grid;
  std::optional<double> rtol;
  std::optional<double> atol;
};

namespace detail {

inline Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

inline std::vector<std::string> read_vars(const Json& j) {
  if (!j.contains("vars") || !j["vars"].is_array() || j["vars"].empty())
    throw InputError("missing or empty \"vars\" array");
  std::vector<std::string> vars;
  for (const auto& v : j["vars"]) {
    if (!v.is_string()) throw InputError("\"vars\" entries must be strings");
    vars.push_back(v.get<std::string>());
  }
  return vars;
}

inline std::string read_string(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_string()) throw InputError(std::string("missing string field \"") + key + "\"");
  return j[key].get<std::string>();
}

inline MultiPoly parse_field(const std::string& text, const std::vector<std::string>& vars, const char* key) {
  try {
    return parse_poly(text, vars);
  } catch (const ParseError& e) {
    throw InputError(std::string("field \"") + key + "\": " + e.what());
  }
}

}  // namespace detail

inline CaseFile parse_case_json(const Json& j, const std::string& default_id) {
  if (!j.is_object()) throw InputError("case file must be a JSON object");
  CaseFile c;
  c.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : default_id;
  c.vars = detail::read_vars(j);
  c.f = detail::read_string(j, "f");
  if (!j.contains("r") || !j["r"].is_number_integer() || j["r"].get<long long>() < 1)
    throw InputError("\"r\" must be a positive integer");
  c.r = j["r"].get<unsigned>();
  if (j.contains("h")) c.h = detail::read_string(j, "h");
  if (j.contains("g")) c.g = detail::read_string(j, "g");
  if (!c.h && !c.g) throw InputError("case file needs \"h\" or \"g\"");
  auto opt_num = [&](const char* key) -> std::optional<double> {
    if (!j.contains(key)) return std::nullopt;
    if (!j[key].is_number()) throw InputError(std::string("\"") + key + "\" must be a number");
    return j[key].get<double>();
  };
  c.radius = opt_num("radius");
  c.rtol = opt_num("rtol");
  c.atol = opt_num("atol");
  if (j.contains("grid")) {
    if (!j["grid"].is_number_integer()) throw InputError("\"grid\" must be an integer");
    c.grid = j["grid"].get<int>();
  }
  return c;
}

inline CaseFile read_case_file(const std::filesystem::path& path) {
  return parse_case_json(detail::read_json_file(path), path.stem().string());
}

/// Builds the GermCase; throws InputError on parse failures or an
/// inconsistent (g, h) pair.
inline GermCase to_germ_case(const CaseFile& c) {
  try {
    const MultiPoly f = detail::parse_field(c.f, c.vars, "f");
    if (c.h && c.g) {
      return GermCase::from_both(c.vars, f, detail::parse_field(*c.g, c.vars, "g"),
                                 detail::parse_field(*c.h, c.vars, "h"), c.r, c.id);
    }
    if (c.h) {
      if (f.constant_term() != 0) throw InputError("f(0) must vanish to build g from h");
      return GermCase::from_witness(c.vars, f, detail::parse_field(*c.h, c.vars, "h"), c.r, c.id);
    }
    return GermCase::from_target(c.vars, f, detail::parse_field(*c.g, c.vars, "g"), c.r, c.id);
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
}

/// Polynomial file: {"vars": [...], "poly": "..."}; a case file's "f" is
/// accepted as well.
struct PolyFile {
  std::vector<std::string> vars;
  MultiPoly poly;
  std::optional<MultiPoly> eta;
};

inline PolyFile read_poly_file(const std::filesystem::path& path, const char* key = "poly") {
  const Json j = detail::read_json_file(path);
  if (!j.is_object()) throw InputError("polynomial file must be a JSON object");
  PolyFile out;
  out.vars = detail::read_vars(j);
  const char* field = j.contains(key) ? key : (j.contains("poly") ? "poly" : "f");
  try {
    out.poly = detail::parse_field(detail::read_string(j, field), out.vars, field);
    if (j.contains("eta")) out.eta = detail::parse_field(detail::read_string(j, "eta"), out.vars, "eta");
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(e.what());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline Json to_json(std::span<const double> v) { return Json(std::vector<double>(v.begin(), v.end())); }

inline Json to_json(const Monomial& m) { return Json(m.exponents()); }

inline Json to_json(const SampleGrid& g) {
  return Json{{"radius", g.radius},
              {"points_per_axis", g.points_per_axis},
              {"pattern", to_string(g.pattern)},
              {"exclusion", g.exclusion}};
}

inline Json to_json(const HypothesisReport& h, const std::vector<std::string>& vars) {
  Json j;
  j["f_vanishes"] = h.f_vanishes;
  j["g_vanishes"] = h.g_vanishes;
  j["grad_f_vanishes"] = h.grad_f_vanishes;
  j["membership"] = h.membership;
  j["quotient"] = h.quotient ? Json(to_string(*h.quotient, vars)) : Json(nullptr);
  j["messages"] = h.messages;
  return j;
}

inline Json to_json(const DomainCertificate& c) {
  Json j;
  j["radius"] = c.radius;
  j["grid"] = to_json(c.grid);
  j["min_gap"] = c.min_gap;
  j["C1_hat"] = c.C1_hat;
  j["C3_hat"] = c.C3_hat;
  j["A_hat"] = c.A_hat;
  j["samples"] = c.samples;
  j["ok"] = c.ok;
  return j;
}

/// Rows [t, y..., F, h].
inline Json trajectory_rows(const Trajectory& traj) {
  Json rows = Json::array();
  for (const auto& s : traj.states) {
    Json row = Json::array();
    row.push_back(s.t);
    for (double y : s.y) row.push_back(y);
    row.push_back(s.F_value);
    row.push_back(s.step);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Json to_json(const LojaReport& l) {
  Json j;
  j["C_hat"] = l.C_hat;
  j["eta_hat"] = l.eta_hat;
  j["sample_count"] = l.sample_count;
  j["radius"] = l.radius;
  return j;
}

inline Json to_json(const ScalingReport& s) {
  Json j;
  j["alpha"] = to_json(s.alpha);
  j["fitted_slope"] = s.identically_zero ? Json(nullptr) : Json(s.fitted_slope);
  j["required"] = s.required;
  j["pass"] = s.pass;
  j["identically_zero"] = s.identically_zero;
  Json pts = Json::array();
  for (const auto& p : s.points) pts.push_back(Json::array({p.dist, p.magnitude}));
  j["points"] = std::move(pts);
  return j;
}

inline Json to_json(const Lemma1Report& l) {
  Json j;
  Json part = Json::array();
  for (const auto& e : l.part_i) part.push_back(Json{{"alpha", to_json(e.alpha)}, {"divisible", e.divisible}});
  j["part_i"] = std::move(part);
  j["part_i_ok"] = l.part_i_ok;
  j["C_hat"] = l.C_hat;
  j["samples"] = l.samples;
  j["part_ii_ok"] = l.part_ii_ok;
  return j;
}

inline Json to_json(const Lemma2Report& l) {
  return Json{{"C_hat", l.C_hat},
              {"C_hat_refined", l.C_hat_refined},
              {"variety_samples", l.variety_samples},
              {"pass", l.pass}};
}

inline Json to_json(const ComparabilityReport& c) {
  return Json{{"C1_hat", c.C1_hat},
              {"C3_hat", c.C3_hat},
              {"C1_hat_refined", c.C1_hat_refined},
              {"C3_hat_refined", c.C3_hat_refined},
              {"pass", c.pass}};
}

inline Json to_json(const LemtechReport& l) {
  return Json{{"B_hat", l.B_hat}, {"B_hat_refined", l.B_hat_refined}, {"A1", l.A1}, {"A2", l.A2},
              {"A3", l.A3},       {"samples", l.samples},             {"pass", l.pass}};
}

/// (dist, magnitude) cloud as CSV.
inline std::string scaling_csv(const ScalingReport& s) {
  std::ostringstream os;
  os.precision(17);
  os << "dist,magnitude\n";
  for (const auto& p : s.cloud) os << p.dist << "," << p.magnitude << "\n";
  return os.str();
}

}  // namespace germflow
