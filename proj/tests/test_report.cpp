#include <filesystem>
#include <fstream>
#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "germflow/report.hpp"

using namespace germflow;

namespace {

const std::filesystem::path kCases{GERMFLOW_CASES};

}  // namespace

TEST_CASE("case files load into germ cases") {
  const auto cf = read_case_file(kCases / "x2_y4.json");
  CHECK(cf.id == "x2_y4");
  CHECK(cf.vars == std::vector<std::string>{"x", "y"});
  CHECK(cf.r == 1);
  REQUIRE(cf.h);
  const auto c = to_germ_case(cf);
  CHECK(c.label == "x2_y4");
  CHECK(c.g == parse_poly("x^2 + y^4 + x^7 + 3*x^5*y^4 + 3*x^3*y^8 + x*y^12", c.vars));

  const auto flip = to_germ_case(read_case_file(kCases / "sign_flip.json"));
  CHECK_FALSE(flip.h);
  CHECK(flip.g == parse_poly("-x^2", flip.vars));
}

TEST_CASE("malformed case files raise InputError") {
  CHECK_THROWS_AS(to_germ_case(read_case_file(kCases / "malformed.json")), InputError);
  try {
    (void)to_germ_case(read_case_file(kCases / "malformed.json"));
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("position 6") != std::string::npos);
  }
  CHECK_THROWS_AS(read_case_file(kCases / "missing.json"), InputError);
  CHECK_THROWS_AS(parse_case_json(Json::parse(R"({"vars": ["x"], "f": "x^2", "r": 1})"), "a"), InputError);
  CHECK_THROWS_AS(parse_case_json(Json::parse(R"({"vars": ["x"], "f": "x^2", "r": 0, "h": "1"})"), "a"), InputError);
  CHECK_THROWS_AS(parse_case_json(Json::parse(R"({"vars": [], "f": "x^2", "r": 1, "h": "1"})"), "a"), InputError);
  CHECK_THROWS_AS(parse_case_json(Json::parse(R"({"vars": ["x"], "f": "x^2", "r": 1, "h": "1", "grid": 2.5})"), "a"),
                  InputError);
  CHECK_THROWS_AS(parse_case_json(Json::parse("[1, 2]"), "a"), InputError);

  const auto both = parse_case_json(Json::parse(R"({"vars": ["x"], "f": "x^2", "r": 1, "h": "1", "g": "x^2"})"), "b");
  CHECK_THROWS_AS(to_germ_case(both), InputError);
  const auto nonzero = parse_case_json(Json::parse(R"({"vars": ["x"], "f": "x^2 + 1", "r": 1, "h": "1"})"), "c");
  CHECK_THROWS_AS(to_germ_case(nonzero), InputError);
}

TEST_CASE("optional case fields") {
  const auto cf = parse_case_json(
      Json::parse(R"({"vars": ["x"], "f": "x^2", "r": 2, "h": "1", "radius": 0.2, "grid": 11, "rtol": 1e-9})"), "d");
  CHECK(cf.id == "d");
  CHECK(*cf.radius == 0.2);
  CHECK(*cf.grid == 11);
  CHECK(*cf.rtol == 1e-9);
  CHECK_FALSE(cf.atol);
}

TEST_CASE("polynomial files") {
  const auto pf = read_poly_file(kCases / "loja_radial.json");
  CHECK(pf.poly == parse_poly("x^2 + y^2", pf.vars));
  const auto xi = read_poly_file(kCases / "lemtech_radial.json", "xi");
  CHECK(xi.poly == parse_poly("4*x^2 + 4*y^2", xi.vars));
  CHECK_FALSE(xi.eta);
  const auto fallback = read_poly_file(kCases / "x2_r1.json");
  CHECK(fallback.poly == parse_poly("x^2", fallback.vars));
}

TEST_CASE("serialization keeps a fixed key order") {
  Lemma2Report l2{0.5, 0.51, 3, true};
  CHECK(to_json(l2).dump() == R"({"C_hat":0.5,"C_hat_refined":0.51,"variety_samples":3,"pass":true})");

  ScalingReport s;
  s.alpha = Monomial{0, 1};
  s.identically_zero = true;
  s.pass = true;
  s.cloud = {{0.1, 0.0}};
  const auto j = to_json(s);
  CHECK(j["fitted_slope"].is_null());
  CHECK(j.begin().key() == "alpha");
  CHECK(scaling_csv(s).rfind("dist,magnitude\n", 0) == 0);

  Trajectory t;
  t.states.push_back({0.0, {0.1}, 0.01, 0.001});
  t.states.push_back({1.0, {0.1}, 0.01, 0.5});
  const auto rows = trajectory_rows(t);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].dump() == "[1.0,0.1,0.01,0.5]");
}
