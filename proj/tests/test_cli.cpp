#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "catch2/catch_amalgamated.hpp"

namespace {

const std::string kCli{GERMFLOW_CLI};
const std::string kCases{GERMFLOW_CASES};

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + (env.empty() ? "" : " ") + "'" + kCli + "' " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string c(const std::string& name) { return "'" + kCases + "/" + name + "'"; }

nlohmann::ordered_json parsed(const Run& r) { return nlohmann::ordered_json::parse(r.out); }

std::string without_timestamp(std::string text) {
  auto j = nlohmann::ordered_json::parse(text);
  j.erase("generated_at");
  return j.dump();
}

}  // namespace

TEST_CASE("check exit codes") {
  const auto ok = run("check " + c("x2_r1.json"));
  CHECK(ok.code == 0);
  CHECK(parsed(ok)["verdict"] == "pass");

  const auto flip = run("check " + c("sign_flip.json"));
  CHECK(flip.code == 2);
  CHECK(parsed(flip)["hypothesis"]["membership"] == false);

  CHECK(run("check " + c("malformed.json")).code == 64);
  CHECK(run("check " + c("nope.json")).code == 64);
  CHECK(run("frobnicate").code == 64);
  CHECK(run("check").code == 64);
}

TEST_CASE("construct on an admissible case") {
  const auto r = run("construct " + c("x2_r1.json") + " --grid 21");
  REQUIRE(r.code == 0);
  const auto j = parsed(r);
  CHECK(j["certificate"]["ok"] == true);
  CHECK(j["samples"].size() == 30);
  for (const auto& s : j["samples"]) {
    CHECK(s["status"] == "completed");
    CHECK(s["residual"].get<double>() <= 1e-7);
  }
}

TEST_CASE("construct --force on the sign-flip pair") {
  CHECK(run("construct " + c("sign_flip.json")).code == 2);
  const auto r = run("construct " + c("sign_flip.json") + " --force --grid 21");
  CHECK((r.code == 3 || r.code == 4));
  const auto j = parsed(r);
  bool saw_gap = false;
  for (const auto& s : j["samples"])
    if (s["status"] == "gap_violation") {
      saw_gap = true;
      CHECK(s["t_end"].get<double>() < 0.5);
    }
  CHECK(saw_gap);
}

TEST_CASE("identity case maps points to themselves") {
  const auto r = run("construct " + c("identity.json") + " --grid 11");
  REQUIRE(r.code == 0);
  for (const auto& s : parsed(r)["samples"]) CHECK(s["phi_x"] == s["x"]);
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  const auto a = run("construct " + c("x2y.json") + " --grid 11");
  const auto b = run("construct " + c("x2y.json") + " --grid 11");
  REQUIRE(a.code == 0);
  CHECK(without_timestamp(a.out) == without_timestamp(b.out));
  const auto other = run("construct " + c("x2y.json") + " --grid 11 --seed 7");
  CHECK(without_timestamp(a.out) != without_timestamp(other.out));
}

TEST_CASE("step budget from the environment") {
  const auto r = run("construct " + c("x2_r1.json") + " --grid 11", "GERMFLOW_MAX_STEPS=1");
  CHECK(r.code == 4);
  CHECK(parsed(r)["samples"][0]["status"] == "max_steps");
  CHECK(run("construct " + c("x2_r1.json"), "GERMFLOW_MAX_STEPS=abc").code == 64);
}

TEST_CASE("--out writes the same report") {
  const auto path = std::filesystem::temp_directory_path() / "germflow_cli_out.json";
  const auto r = run("check " + c("x2_r1.json") + " --out '" + path.string() + "'");
  REQUIRE(r.code == 0);
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == r.out);
  std::filesystem::remove(path);
}

TEST_CASE("loja, bounds, lemtech and verify") {
  const auto l = run("loja " + c("loja_radial.json") + " --radius 0.5");
  CHECK(l.code == 0);
  CHECK(parsed(l)["loja"]["eta_hat"].get<double>() == Catch::Approx(0.5).margin(0.05));
  CHECK(run("loja " + c("loja_radial.json") + " --grid 2").code == 64);

  const auto csv_base = (std::filesystem::temp_directory_path() / "germflow_bounds").string();
  const auto b = run("bounds " + c("x2_r1.json") + " --alpha-max 1 --out '" + csv_base + "'");
  CHECK(b.code == 0);
  CHECK(parsed(b)["scaling"].size() == 3);
  std::ifstream csv(csv_base + ".alpha_0_0.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "dist,magnitude");
  CHECK(run("bounds " + c("sign_flip.json")).code == 2);

  const auto t = run("lemtech " + c("lemtech_radial.json") + " --order 1");
  CHECK(t.code == 0);
  const auto tj = parsed(t);
  CHECK(tj["expansions"].size() == 2);
  CHECK(tj["expansions"][0]["bound"]["B_hat"].get<double>() == Catch::Approx(4.0).epsilon(0.02));
  CHECK(run("lemtech " + c("lemtech_radial.json")).code == 64);

  const auto v = run("verify " + c("x2_r1.json") + " --grid 21");
  CHECK(v.code == 0);
  CHECK(parsed(v)["verdict"] == "pass");
}
