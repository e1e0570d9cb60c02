#include <cmath>
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "germflow/flow.hpp"
#include "oracles.hpp"

using namespace germflow;
using Catch::Approx;

namespace {

const std::vector<std::string> X1{"x"};
const std::vector<std::string> XY{"x", "y"};

MultiPoly P(const std::string& s, const std::vector<std::string>& vars = XY) { return parse_poly(s, vars); }

HomotopyField witness(const std::vector<std::string>& vars, const char* f, const char* h, unsigned r) {
  return HomotopyField(GermCase::from_witness(vars, P(f, vars), P(h, vars), r));
}

}  // namespace

TEST_CASE("FlowConfig validation") {
  CHECK_NOTHROW(FlowConfig{}.validate());
  FlowConfig c;
  c.h_min = c.h_init;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = FlowConfig{};
  c.rtol = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(std::string(to_string(FlowStatus::GapViolation)) == "gap_violation");
  CHECK(std::string(to_string(FlowStatus::Completed)) == "completed");
}

TEST_CASE("phi matches frozen one-dimensional values") {
  const auto r1 = phi(witness(X1, "x^2", "1", 1), std::vector<double>{0.1});
  CHECK(r1.y[0] == Approx(0.09999500137446898886).epsilon(1e-13));
  const auto r2 = phi(witness(X1, "x^2", "1", 2), std::vector<double>{0.1});
  CHECK(r2.y[0] == Approx(0.0999999500001874989).epsilon(1e-13));
}

TEST_CASE("phi matches the radial closed form") {
  const auto field = witness(XY, "x^2 + y^2", "1", 1);
  const auto r = phi(field, std::vector<double>{0.1, 0.1});
  CHECK(r.y[0] == Approx(0.09998002196606106).epsilon(1e-12));
  CHECK(r.y[1] == Approx(0.09998002196606106).epsilon(1e-12));
}

TEST_CASE("phi agrees with a Newton solve in one variable") {
  for (unsigned r : {1u, 2u}) {
    const auto field = witness(X1, "x^2", "1", r);
    for (double x : {-0.3, -0.17, 0.05, 0.2, 0.3}) {
      const double y = phi(field, std::vector<double>{x}).y[0];
      CHECK(std::abs(y - oracle::newton_phi_1d(field.germ().f, field.germ().g, x)) <= 1e-7);
    }
  }
}

TEST_CASE("trajectory invariants") {
  const auto field = witness(XY, "x^2*y", "1", 1);
  const std::vector<double> x{0.15, 0.2};
  const auto traj = integrate(field, x);
  REQUIRE(traj.completed());
  CHECK(traj.states.front().t == 0.0);
  CHECK(traj.states.back().t == 1.0);
  for (std::size_t k = 1; k < traj.states.size(); ++k) CHECK(traj.states[k].t > traj.states[k - 1].t);
  for (const auto& s : traj.states) CHECK(s.F_value == field.F(s.t, s.y));
  CHECK(conservation_drift(traj) <= 1e-8);
  CHECK(equivalence_residual(field, x) <= 1e-8);
}

TEST_CASE("g = f gives the identity") {
  const auto field = HomotopyField(GermCase::from_target(XY, P("x^2*y"), P("x^2*y"), 1));
  const std::vector<double> x{0.2, -0.1};
  const auto r = phi(field, x);
  CHECK(r.y == x);
  CHECK(r.drift == 0.0);
  CHECK(equivalence_residual(field, x) == 0.0);
}

TEST_CASE("phi fixes the origin exactly") {
  const auto field = witness(XY, "x^2 + y^4", "x", 1);
  const std::vector<double> o{0.0, 0.0};
  CHECK(phi(field, o).y == o);
  CHECK(phi_inverse(field, o) == o);
}

TEST_CASE("roundtrip phi_inverse(phi(x))") {
  const auto field = witness(XY, "x^2 + y^4", "x", 1);
  for (const auto& x : {std::vector<double>{0.2, 0.1}, std::vector<double>{-0.25, 0.05}, std::vector<double>{0.0, 0.3}}) {
    const auto y = phi(field, x).y;
    const auto back = phi_inverse(field, y);
    const auto fwd = phi(field, phi_inverse(field, x)).y;
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(std::abs(back[i] - x[i]) <= 1e-6 * (1 + norm2(x)));
      CHECK(std::abs(fwd[i] - x[i]) <= 1e-6 * (1 + norm2(x)));
    }
  }
  const auto rev = integrate_reversed(field, std::vector<double>{0.2, 0.1});
  CHECK(rev.reversed);
  CHECK(rev.completed());
}

TEST_CASE("sign-flip pair stops with gap_violation before t = 1/2") {
  const auto field = HomotopyField(GermCase::from_target(X1, P("x^2", X1), P("-x^2", X1), 1));
  const auto traj = integrate(field, std::vector<double>{0.1});
  CHECK(traj.status == FlowStatus::GapViolation);
  CHECK_FALSE(traj.completed());
  CHECK(traj.states.back().t < 0.5);
  CHECK(traj.states.back().t > 0.3);
  CHECK_FALSE(traj.message.empty());
  CHECK_THROWS_AS(phi(field, std::vector<double>{0.1}), FlowError);
  try {
    (void)phi(field, std::vector<double>{0.1});
  } catch (const FlowError& e) {
    CHECK(e.trajectory().status == FlowStatus::GapViolation);
  }
}

TEST_CASE("step budget exhaustion") {
  FlowConfig cfg;
  cfg.max_steps = 2;
  const auto traj = integrate(witness(X1, "x^2", "1", 1), std::vector<double>{0.3}, cfg);
  CHECK(traj.status == FlowStatus::MaxSteps);
}

TEST_CASE("tightening rtol reduces drift where truncation error dominates") {
  const auto field = witness(X1, "x^2", "1", 1);
  REQUIRE(certify_domain(field, 0.7, SampleGrid{0.7, 41}).ok);
  FlowConfig tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  FlowConfig coarse;
  coarse.rtol = 1e-3;
  coarse.atol = 1e-5;
  for (double x : {0.6, 0.65, 0.7}) {
    const std::vector<double> p{x};
    const double d_def = phi(field, p).drift;
    CHECK(d_def / phi(field, p, tight).drift >= 5.0);
    CHECK(phi(field, p, coarse).drift / d_def > 10.0);
  }
}
