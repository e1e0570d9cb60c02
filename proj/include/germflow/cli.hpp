#pragma once

// Command implementations behind the `germflow` executable. Each command
// writes its JSON report to `out`, diagnostics to `err`, and returns the
// process exit code.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "germflow/analysis.hpp"
#include "germflow/flow.hpp"
#include "germflow/germ.hpp"
#include "germflow/homotopy.hpp"
#include "germflow/report.hpp"

namespace germflow::cli {

enum ExitCode : int {
  kPass = 0,
  kHypothesisFail = 2,
  kDomainFail = 3,
  kNumericFail = 4,
  kVerificationFail = 5,
  kMalformedInput = 64,
};

inline constexpr double kDefaultRadius = 0.3;
inline constexpr int kDefaultGrid = 41;

// Per-sample acceptance thresholds of `construct`.
inline constexpr double kResidualTol = 1e-7;
inline constexpr double kDriftRelTol = 1e-8;
inline constexpr double kRoundtripRelTol = 1e-6;

struct Options {
  std::string input;
  std::optional<double> radius;
  std::optional<int> grid;
  std::optional<double> rtol;
  std::optional<double> atol;
  int alpha_max = 1;
  int order = 1;
  std::optional<std::string> out;
  bool force = false;
  std::uint64_t seed = 42;
};

/// Starting points for `construct`: +-radius_k e_i on the shells
/// radius_k = radius * {0.2, 0.4, 0.6, 0.8, 1.0}, then `random_count` points
/// drawn uniformly from the ball with a 64-bit Mersenne Twister.
inline std::vector<std::vector<double>> construct_samples(std::size_t n, double radius, std::uint64_t seed,
                                                          int random_count = 20) {
  std::vector<std::vector<double>> pts;
  for (int k = 1; k <= 5; ++k) {
    const double rho = radius * 0.2 * k;
    for (std::size_t i = 0; i < n; ++i)
      for (double s : {1.0, -1.0}) {
        std::vector<double> p(n, 0.0);
        p[i] = s * rho;
        pts.push_back(std::move(p));
      }
  }
  std::mt19937_64 eng(seed);
  auto unit = [&eng] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  for (int added = 0; added < random_count;) {
    std::vector<double> p(n);
    for (double& c : p) c = radius * (2.0 * unit() - 1.0);
    if (norm2(p) > radius) continue;
    pts.push_back(std::move(p));
    ++added;
  }
  return pts;
}

namespace detail {

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void emit(const Json& report, const Options& opt, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  out << text;
  if (opt.out) {
    std::ofstream f(*opt.out);
    if (!f) throw InputError("cannot write '" + *opt.out + "'");
    f << text;
  }
}

inline FlowConfig flow_config(const Options& opt, const CaseFile& cf) {
  FlowConfig cfg;
  if (cf.rtol) cfg.rtol = *cf.rtol;
  if (cf.atol) cfg.atol = *cf.atol;
  if (opt.rtol) cfg.rtol = *opt.rtol;
  if (opt.atol) cfg.atol = *opt.atol;
  if (const char* env = std::getenv("GERMFLOW_MAX_STEPS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) throw InputError("GERMFLOW_MAX_STEPS must be a positive integer");
    cfg.max_steps = v;
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return cfg;
}

inline SampleGrid grid_for(const Options& opt, const CaseFile* cf) {
  SampleGrid g;
  g.radius = opt.radius.value_or(cf && cf->radius ? *cf->radius : kDefaultRadius);
  g.points_per_axis = opt.grid.value_or(cf && cf->grid ? *cf->grid : kDefaultGrid);
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return g;
}

inline Json case_header(const GermCase& c) {
  Json j;
  j["case"] = c.label;
  j["generated_at"] = utc_timestamp();
  j["vars"] = c.vars;
  j["f"] = to_string(c.f, c.vars);
  j["g"] = to_string(c.g, c.vars);
  j["h"] = c.h ? Json(to_string(*c.h, c.vars)) : Json(nullptr);
  j["r"] = c.r;
  return j;
}

struct SampleOutcome {
  Json json;
  bool ok = false;
  FlowStatus status = FlowStatus::Completed;
};

inline SampleOutcome run_sample(const HomotopyField& field, const std::vector<double>& x, const FlowConfig& cfg) {
  SampleOutcome o;
  Json& j = o.json;
  j["x"] = x;
  const Trajectory traj = integrate(field, x, cfg);
  o.status = traj.status;
  j["status"] = to_string(traj.status);
  j["t_end"] = traj.states.back().t;
  j["steps"] = traj.states.size() - 1;
  if (!traj.completed()) {
    j["message"] = traj.message;
    j["phi_x"] = nullptr;
    j["residual"] = nullptr;
    j["drift"] = conservation_drift(traj);
    j["roundtrip"] = nullptr;
    j["trajectory"] = trajectory_rows(traj);
    return o;
  }
  const auto& y = traj.endpoint();
  const double residual = std::abs(field.g(y) - field.f(x));
  const double drift = conservation_drift(traj);
  const double f0 = traj.states.front().F_value;
  const Trajectory back = integrate_reversed(field, y, cfg);
  double roundtrip = std::numeric_limits<double>::quiet_NaN();
  if (back.completed()) {
    std::vector<double> diff(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) diff[i] = back.endpoint()[i] - x[i];
    roundtrip = norm2(diff);
  }
  j["phi_x"] = y;
  j["residual"] = residual;
  j["drift"] = drift;
  j["roundtrip"] = back.completed() ? Json(roundtrip) : Json(nullptr);
  j["trajectory"] = trajectory_rows(traj);
  o.ok = residual <= kResidualTol && drift <= kDriftRelTol * std::max(1.0, std::abs(f0)) &&
         back.completed() && roundtrip <= kRoundtripRelTol * (1.0 + norm2(x));
  return o;
}

struct Loaded {
  CaseFile file;
  GermCase germ;
};

inline Loaded load_case(const Options& opt) {
  Loaded l;
  l.file = read_case_file(opt.input);
  l.germ = to_germ_case(l.file);
  return l;
}

template <class Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const InputError& e) {
    err << "germflow: " << e.what() << "\n";
    return kMalformedInput;
  }
}

}  // namespace detail

inline int cmd_check(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const auto loaded = detail::load_case(opt);
    const auto hyp = check_hypotheses(loaded.germ);
    Json j = detail::case_header(loaded.germ);
    j["hypothesis"] = to_json(hyp, loaded.germ.vars);
    j["verdict"] = hyp.passed() ? "pass" : "hypothesis_fail";
    detail::emit(j, opt, out);
    return hyp.passed() ? kPass : kHypothesisFail;
  });
}

namespace detail {

struct ConstructOutcome {
  Json report;
  int code = kPass;
  bool hypothesis_ok = false;
  bool domain_ok = false;
  bool numeric_ok = false;
};

/// Shared pipeline of `construct` and `verify`.
inline ConstructOutcome construct_pipeline(const Options& opt, const Loaded& loaded, std::ostream& err) {
  ConstructOutcome o;
  const GermCase& c = loaded.germ;
  const auto hyp = check_hypotheses(c);
  o.report = case_header(c);
  o.report["hypothesis"] = to_json(hyp, c.vars);
  o.hypothesis_ok = hyp.passed();
  if (!o.hypothesis_ok && !opt.force) {
    o.report["verdict"] = "hypothesis_fail";
    o.code = kHypothesisFail;
    return o;
  }
  if (!o.hypothesis_ok) err << "germflow: hypotheses fail; continuing because of --force\n";

  const SampleGrid grid = grid_for(opt, &loaded.file);
  const FlowConfig cfg = flow_config(opt, loaded.file);
  const HomotopyField field(c);
  const auto cert = certify_domain(field, grid.radius, grid);
  o.report["certificate"] = to_json(cert);
  o.domain_ok = cert.ok;
  o.report["flow"] = Json{{"rtol", cfg.rtol}, {"atol", cfg.atol}, {"h_init", cfg.h_init},
                          {"h_min", cfg.h_min}, {"max_steps", cfg.max_steps}, {"seed", opt.seed}};

  Json samples = Json::array();
  o.numeric_ok = true;
  if (cert.ok || opt.force) {
    for (const auto& x : construct_samples(c.n(), grid.radius, opt.seed)) {
      auto s = run_sample(field, x, cfg);
      o.numeric_ok = o.numeric_ok && s.ok;
      samples.push_back(std::move(s.json));
    }
  }
  o.report["samples"] = std::move(samples);

  if (!o.domain_ok) {
    o.code = kDomainFail;
  } else if (!o.numeric_ok) {
    o.code = kNumericFail;
  } else if (!o.hypothesis_ok) {
    o.code = kHypothesisFail;
  }
  return o;
}

inline const char* verdict_name(int code) {
  switch (code) {
    case kPass: return "pass";
    case kHypothesisFail: return "hypothesis_fail";
    case kDomainFail: return "domain_fail";
    case kNumericFail: return "numeric_fail";
    case kVerificationFail: return "verification_fail";
    default: return "error";
  }
}

}  // namespace detail

inline int cmd_construct(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const auto loaded = detail::load_case(opt);
    auto o = detail::construct_pipeline(opt, loaded, err);
    if (!o.report.contains("verdict")) o.report["verdict"] = detail::verdict_name(o.code);
    detail::emit(o.report, opt, out);
    return o.code;
  });
}

namespace detail {

inline std::vector<ScalingReport> scaling_reports(const HomotopyField& field, const SampleGrid& grid,
                                                  unsigned max_order) {
  const PointSet z = critical_set_samples(field, grid);
  std::vector<ScalingReport> out;
  for (const auto& alpha : scaling_multi_indices(field.n(), max_order))
    out.push_back(step_scaling_check(field, alpha, grid, z));
  return out;
}

inline void write_scaling_csv(const Options& opt, const std::vector<ScalingReport>& reports) {
  if (!opt.out) return;
  for (const auto& s : reports) {
    std::string name = *opt.out + ".alpha";
    for (unsigned a : s.alpha.exponents()) name += "_" + std::to_string(a);
    std::ofstream f(name + ".csv");
    if (!f) throw InputError("cannot write '" + name + ".csv'");
    f << scaling_csv(s);
  }
}

}  // namespace detail

/// Full verification: construction plus every estimate scan.
inline int cmd_verify(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const auto loaded = detail::load_case(opt);
    auto o = detail::construct_pipeline(opt, loaded, err);
    if (o.report.contains("verdict")) {  // stopped at the hypothesis gate
      detail::emit(o.report, opt, out);
      return o.code;
    }
    const GermCase& c = loaded.germ;
    const SampleGrid grid = detail::grid_for(opt, &loaded.file);
    const HomotopyField field(c);
    bool scans_ok = true;
    try {
      const auto l1 = lemma1_check(c.g - c.f, c.f, c.r + 2, c.r, grid);
      o.report["lemma1"] = to_json(l1);
      scans_ok = scans_ok && l1.passed();
    } catch (const std::invalid_argument& e) {
      o.report["lemma1"] = Json{{"error", e.what()}};
      scans_ok = false;
    }
    try {
      const auto loja = loja_gradient_scan(c.f, grid);
      o.report["loja"] = to_json(loja);
      scans_ok = scans_ok && loja.C_hat > 0.0 && std::isfinite(loja.C_hat);
    } catch (const VerificationError& e) {
      o.report["loja"] = Json{{"error", e.what()}};
      scans_ok = false;
    }
    const auto l2 = lemma2_scan(c.f, grid);
    o.report["lemma2"] = to_json(l2);
    scans_ok = scans_ok && l2.pass;
    const auto comp = grad_comparability_scan(field, grid);
    o.report["comparability"] = to_json(comp);
    scans_ok = scans_ok && comp.pass;
    Json scaling = Json::array();
    try {
      const auto reports = detail::scaling_reports(field, grid, c.r);
      for (const auto& s : reports) {
        scaling.push_back(to_json(s));
        scans_ok = scans_ok && s.pass;
      }
    } catch (const VerificationError& e) {
      scaling.push_back(Json{{"error", e.what()}});
      scans_ok = false;
    }
    o.report["scaling"] = std::move(scaling);
    int code = o.code;
    if (code == kPass && !scans_ok) code = kVerificationFail;
    o.report["verdict"] = detail::verdict_name(code);
    detail::emit(o.report, opt, out);
    return code;
  });
}

inline int cmd_loja(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const auto pf = read_poly_file(opt.input);
    const SampleGrid grid = detail::grid_for(opt, nullptr);
    Json j;
    j["poly"] = to_string(pf.poly, pf.vars);
    j["generated_at"] = detail::utc_timestamp();
    j["grid"] = to_json(grid);
    if (pf.poly.constant_term() != 0) throw InputError("polynomial must vanish at the origin");
    bool ok = false;
    try {
      const auto rep = loja_gradient_scan(pf.poly, grid);
      j["loja"] = to_json(rep);
      ok = rep.passed();
    } catch (const VerificationError& e) {
      j["loja"] = Json{{"error", e.what()}};
    }
    j["verdict"] = ok ? "pass" : "verification_fail";
    detail::emit(j, opt, out);
    return ok ? kPass : kVerificationFail;
  });
}

inline int cmd_bounds(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const auto loaded = detail::load_case(opt);
    const GermCase& c = loaded.germ;
    if (opt.alpha_max < 0) throw InputError("--alpha-max must be non-negative");
    Json j = detail::case_header(c);
    const auto hyp = check_hypotheses(c);
    j["hypothesis"] = to_json(hyp, c.vars);
    if (!hyp.passed() && !opt.force) {
      j["verdict"] = "hypothesis_fail";
      detail::emit(j, opt, out);
      return static_cast<int>(kHypothesisFail);
    }
    const unsigned order = std::min<unsigned>(static_cast<unsigned>(opt.alpha_max), c.r);
    if (order < static_cast<unsigned>(opt.alpha_max))
      err << "germflow: --alpha-max clamped to r = " << c.r << "\n";
    const SampleGrid grid = detail::grid_for(opt, &loaded.file);
    const HomotopyField field(c);
    j["alpha_max"] = order;
    j["grid"] = to_json(grid);
    bool ok = true;
    Json scaling = Json::array();
    try {
      const auto reports = detail::scaling_reports(field, grid, order);
      for (const auto& s : reports) {
        scaling.push_back(to_json(s));
        ok = ok && s.pass;
      }
      detail::write_scaling_csv(opt, reports);
    } catch (const VerificationError& e) {
      scaling.push_back(Json{{"error", e.what()}});
      ok = false;
    }
    j["scaling"] = std::move(scaling);
    int code = ok ? kPass : kVerificationFail;
    if (code == kPass && !hyp.passed()) code = kHypothesisFail;
    j["verdict"] = detail::verdict_name(code);
    detail::emit(j, opt, out);
    return code;
  });
}

/// Expands d^k(1/xi) for every |k| = order, cross-checks it against the plain
/// quotient rule and scans the bound with eta = |eta poly| or sqrt|xi|.
inline int cmd_lemtech(const Options& opt, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  return detail::guarded(err, [&]() -> int {
    const auto pf = read_poly_file(opt.input, "xi");
    if (opt.order < 1) throw InputError("--order must be >= 1");
    if (pf.poly.is_zero()) throw InputError("xi must be nonzero");
    const SampleGrid grid = detail::grid_for(opt, nullptr);
    PointFunction eta;
    if (pf.eta) {
      const NumericPoly e(*pf.eta);
      eta = [e](std::span<const double> x) { return std::abs(e(x)); };
    } else {
      const NumericPoly xi(pf.poly);
      eta = [xi](std::span<const double> x) { return std::sqrt(std::abs(xi(x))); };
    }
    Json j;
    j["xi"] = to_string(pf.poly, pf.vars);
    j["eta"] = pf.eta ? Json(to_string(*pf.eta, pf.vars)) : Json("sqrt|xi|");
    j["order"] = opt.order;
    j["generated_at"] = detail::utc_timestamp();
    j["grid"] = to_json(grid);
    bool ok = true;
    Json items = Json::array();
    for (const auto& k : multi_indices_of_degree(pf.poly.dim(), static_cast<unsigned>(opt.order))) {
      Json item;
      item["k"] = to_json(k);
      const auto e = inv_power_expand(pf.poly, k);
      const bool match = same_rational_function(e, pf.poly, quotient_rule_inverse_derivative(pf.poly, k));
      item["numerator"] = to_string(e.numerator, pf.vars);
      item["denom_power"] = e.denom_power;
      item["matches_quotient_rule"] = match;
      ok = ok && match;
      try {
        const auto rep = lemtech_bound_scan(pf.poly, eta, k, grid);
        item["bound"] = to_json(rep);
        ok = ok && rep.pass;
      } catch (const std::exception& ex) {
        item["bound"] = Json{{"error", ex.what()}};
        ok = false;
      }
      items.push_back(std::move(item));
    }
    j["expansions"] = std::move(items);
    j["verdict"] = ok ? "pass" : "verification_fail";
    detail::emit(j, opt, out);
    return ok ? kPass : kVerificationFail;
  });
}

}  // namespace germflow::cli
