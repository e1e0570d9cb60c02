#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "catch2/catch_amalgamated.hpp"
#include "germflow/homotopy.hpp"
#include "oracles.hpp"

using namespace germflow;
using Catch::Approx;

namespace {

const std::vector<std::string> X1{"x"};
const std::vector<std::string> XY{"x", "y"};

MultiPoly P(const std::string& s, const std::vector<std::string>& vars = XY) { return parse_poly(s, vars); }

HomotopyField x2_field() { return HomotopyField(GermCase::from_witness(X1, P("x^2", X1), P("1", X1), 1)); }
HomotopyField flip_field() { return HomotopyField(GermCase::from_target(X1, P("x^2", X1), P("-x^2", X1), 1)); }

}  // namespace

TEST_CASE("F interpolates f and g") {
  const auto field = HomotopyField(GermCase::from_witness(XY, P("x^2 + y^4"), P("x"), 1));
  const std::vector<double> x{0.2, -0.1};
  CHECK(field.F(0.0, x) == Approx(field.f(x)).epsilon(1e-15));
  CHECK(field.F(1.0, x) == Approx(field.g(x)).epsilon(1e-15));
  CHECK(field.F(0.5, x) == Approx(0.5 * (field.f(x) + field.g(x))).epsilon(1e-15));
}

TEST_CASE("X and W on x^2 -> x^2 + x^6") {
  const auto field = x2_field();
  const std::vector<double> x{0.1};
  const auto X = field.X(0.0, x);
  REQUIRE(X.size() == 2);
  CHECK(X[0] == Approx(2.4999999999375e-11).epsilon(1e-12));
  CHECK(X[1] == Approx(4.999999999875e-06).epsilon(1e-12));
  const auto W = field.W(0.0, x);
  REQUIRE(W.size() == 1);
  CHECK(W[0] == Approx(-5e-06).epsilon(1e-9));

  const auto exact = oracle::exact_X(field.germ(), Rational(0), {rational_from_double(0.1)});
  CHECK(X[0] == Approx(to_double(exact[0])).epsilon(1e-14));
  CHECK(X[1] == Approx(to_double(exact[1])).epsilon(1e-14));
}

TEST_CASE("X vanishes at the origin") {
  const auto field = x2_field();
  const std::vector<double> o{0.0};
  const auto X = field.X(0.3, o);
  CHECK(X[0] == 0.0);
  CHECK(X[1] == 0.0);
  CHECK(field.W(0.3, o)[0] == 0.0);
  CHECK(field.sample(0.3, o).on_cutoff);
}

TEST_CASE("sign-flip pair loses the gap at xi = 1/2") {
  const auto field = flip_field();
  const std::vector<double> x{0.1};
  const auto grad = field.gradF(0.5, x);
  CHECK(grad[0] == Approx(-0.02).epsilon(1e-14));
  CHECK(std::abs(grad[1]) <= 1e-16);
  const auto X = field.X(0.5, x);
  CHECK(X[0] == Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(field.W(0.5, x), GapViolation);
  try {
    (void)field.W(0.5, x);
  } catch (const GapViolation& e) {
    CHECK(e.xi() == 0.5);
    CHECK(e.x() == x);
    CHECK(e.gap() <= kGapThreshold);
  }
  const auto s = field.sample(0.5, x);
  CHECK_FALSE(s.W);
}

TEST_CASE("dimension mismatches are rejected") {
  const auto field = x2_field();
  const std::vector<double> bad{0.1, 0.2};
  CHECK_THROWS_AS(field.F(0.0, bad), DimensionMismatch);
  CHECK_THROWS_AS(field.X(0.0, bad), DimensionMismatch);
  CHECK_THROWS_AS(HomotopyField(GermCase::from_witness(X1, P("x^2", X1), P("1", X1), 1), 0.0), std::invalid_argument);
}

TEST_CASE("field identities on random points") {
  const auto field = HomotopyField(GermCase::from_witness(XY, P("x^2 + y^2"), P("1 + x*y"), 1));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.3, 0.3), v(-1.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const std::vector<double> x{u(rng), u(rng)};
    const double xi = v(rng);
    const auto grad = field.gradF(xi, x);
    const auto X = field.X(xi, x);
    // X_1 >= 0 and <grad F, X> = d
    CHECK(X[0] >= 0.0);
    double dot = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) dot += grad[i] * X[i];
    CHECK(dot == Approx(field.d(x)).margin(1e-20).epsilon(1e-10));
    // dF/dt along (1, W) vanishes
    const auto W = field.W(xi, x);
    double ddt = grad[0];
    for (std::size_t i = 0; i < W.size(); ++i) ddt += grad[i + 1] * W[i];
    CHECK(std::abs(ddt) <= 1e-12 * (std::abs(grad[0]) + 1e-300) + 1e-30);
  }
}

TEST_CASE("W decays like |f|^{r+1} near the origin") {
  const auto field = x2_field();
  const double w1 = std::abs(field.W(0.0, std::vector<double>{0.1})[0]);
  const double w2 = std::abs(field.W(0.0, std::vector<double>{0.05})[0]);
  // W = -x^5/2 + ..., so halving x scales W by 1/32
  CHECK(w1 / w2 == Approx(32.0).epsilon(1e-3));
}

TEST_CASE("certify_domain") {
  const SampleGrid grid{0.3, 21};
  const auto good = certify_domain(x2_field(), 0.3, grid);
  CHECK(good.ok);
  CHECK(good.min_gap > 0.99);
  CHECK(good.C1_hat <= 1.05);
  CHECK(good.C3_hat >= 0.9);
  CHECK(good.samples == 21u * 21u);

  const auto bad = certify_domain(flip_field(), 0.3, grid);
  CHECK_FALSE(bad.ok);
  CHECK(bad.min_gap <= kGapThreshold);
  CHECK(bad.C1_hat > 10.0);

  CHECK_THROWS_AS(certify_domain(x2_field(), 0.0, grid), std::invalid_argument);
}

TEST_CASE("critical set samples") {
  const SampleGrid grid{0.3, 11};
  const auto z = critical_set_samples(x2_field(), grid);
  REQUIRE_FALSE(z.empty());
  for (const auto& p : z) CHECK(std::abs(p[0]) < 1e-6);

  const auto line = HomotopyField(GermCase::from_witness(XY, P("x^2*y"), P("1"), 1));
  const auto zl = critical_set_samples(line, grid);
  CHECK(zl.size() > 3);
  for (const auto& p : zl) CHECK(std::abs(p[0]) < 1e-5);
  CHECK(dist_to_Z_proxy(line, std::vector<double>{0.1, 0.0}, zl) <= 0.1 + 1e-9);
}
