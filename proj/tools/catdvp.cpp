#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "catdvp/cli/commands.hpp"
#include "catdvp/cli/selftest.hpp"

using namespace catdvp::cli;

int main(int argc, char** argv) {
  CLI::App app{"catdvp: Clifford-augmented TDVP for purified thermal states"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunOptions run_opt;
  std::string out_dir, format;
  auto* run = app.add_subcommand("run", "evolve the purified state to beta_max and write results");
  run->add_option("--config", run_opt.config_path, "INI config file")->required();
  run->add_option("--out", out_dir, "output directory (overrides output.dir)");
  run->add_option("--format", format, "results format (overrides output.format)")
      ->check(CLI::IsMember({"csv", "json"}));
  run->add_option("--threads", run_opt.threads, "parallel bond-dimension jobs, 0 = auto");

  std::string cmp_a, cmp_b, cmp_out;
  auto* compare = app.add_subcommand("compare", "per-beta comparison of two result tables");
  compare->add_option("run_a", cmp_a, "results of run A (csv or json)")->required();
  compare->add_option("run_b", cmp_b, "results of run B (csv or json)")->required();
  compare->add_option("--out", cmp_out, "write the comparison table here instead of stdout");

  std::string enum_out;
  auto* enumerate = app.add_subcommand("enumerate-cliffords", "write the 720-entry two-site Clifford catalog");
  enumerate->add_option("--out", enum_out, "output file (default stdout)");

  std::string fault = "none";
  auto* selftest = app.add_subcommand("selftest", "run the built-in invariant checks");
  selftest->add_option("--inject-fault", fault, "deliberate defect, to check that it is caught")
      ->check(CLI::IsMember({"none", "conjugation-sign"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (*run) {
    if (!out_dir.empty()) run_opt.out_dir = out_dir;
    if (!format.empty()) run_opt.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
    return cmd_run(run_opt, std::cout, std::cerr);
  }
  if (*compare)
    return cmd_compare(cmp_a, cmp_b, cmp_out.empty() ? std::nullopt : std::optional<std::string>(cmp_out),
                       std::cout, std::cerr);
  if (*enumerate)
    return cmd_enumerate_cliffords(enum_out.empty() ? std::nullopt : std::optional<std::string>(enum_out),
                                   std::cout, std::cerr);
  return cmd_selftest(fault == "conjugation-sign" ? Fault::ConjugationSign : Fault::None, std::cout);
}
