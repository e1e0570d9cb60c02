#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "germflow/cli.hpp"

namespace {

void add_case_flags(CLI::App* cmd, germflow::cli::Options& opt) {
  cmd->add_option("--radius", opt.radius, "Sampling radius of the neighbourhood");
  cmd->add_option("--grid", opt.grid, "Grid points per axis")->check(CLI::Range(3, 100001));
  cmd->add_option("--seed", opt.seed, "Seed for the random starting points");
  cmd->add_option("--out", opt.out, "Also write the JSON report to this path");
  cmd->add_flag("--force", opt.force, "Continue past a failed hypothesis check");
}

}  // namespace

int main(int argc, char** argv) {
  namespace cli = germflow::cli;
  CLI::App app{"germflow: right-equivalence flows for polynomial germs"};
  app.require_subcommand(1);
  cli::Options opt;

  auto* check = app.add_subcommand("check", "Check the hypotheses of a case file");
  check->add_option("case", opt.input, "Case file (JSON)")->required();
  check->add_option("--out", opt.out, "Also write the JSON report to this path");

  auto* construct = app.add_subcommand("construct", "Certify the domain and integrate phi on sample points");
  construct->add_option("case", opt.input, "Case file (JSON)")->required();
  add_case_flags(construct, opt);
  construct->add_option("--rtol", opt.rtol, "Relative tolerance of the integrator");
  construct->add_option("--atol", opt.atol, "Absolute tolerance of the integrator");

  auto* verify = app.add_subcommand("verify", "construct plus every estimate scan");
  verify->add_option("case", opt.input, "Case file (JSON)")->required();
  add_case_flags(verify, opt);
  verify->add_option("--rtol", opt.rtol, "Relative tolerance of the integrator");
  verify->add_option("--atol", opt.atol, "Absolute tolerance of the integrator");

  auto* loja = app.add_subcommand("loja", "Gradient inequality scan of a polynomial");
  loja->add_option("poly", opt.input, "Polynomial file (JSON)")->required();
  loja->add_option("--radius", opt.radius, "Sampling radius");
  loja->add_option("--grid", opt.grid, "Grid points per axis")->check(CLI::Range(3, 100001));
  loja->add_option("--out", opt.out, "Also write the JSON report to this path");

  auto* bounds = app.add_subcommand("bounds", "Decay exponents of the field derivatives near Z");
  bounds->add_option("case", opt.input, "Case file (JSON)")->required();
  add_case_flags(bounds, opt);
  bounds->add_option("--alpha-max", opt.alpha_max, "Largest derivative order |alpha|");

  auto* lemtech = app.add_subcommand("lemtech", "Expand and bound derivatives of 1/xi");
  lemtech->add_option("xi", opt.input, "Polynomial file with \"xi\" (JSON)")->required();
  lemtech->add_option("--order", opt.order, "Derivative order |k|")->required();
  lemtech->add_option("--radius", opt.radius, "Sampling radius");
  lemtech->add_option("--grid", opt.grid, "Grid points per axis")->check(CLI::Range(3, 100001));
  lemtech->add_option("--out", opt.out, "Also write the JSON report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kMalformedInput;
  }

  if (check->parsed()) return cli::cmd_check(opt);
  if (construct->parsed()) return cli::cmd_construct(opt);
  if (verify->parsed()) return cli::cmd_verify(opt);
  if (loja->parsed()) return cli::cmd_loja(opt);
  if (bounds->parsed()) return cli::cmd_bounds(opt);
  if (lemtech->parsed()) return cli::cmd_lemtech(opt);
  return cli::kMalformedInput;
}
