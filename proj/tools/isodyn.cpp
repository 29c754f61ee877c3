// isodyn: scenario-driven front end for the isospin dynamics library.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "isodyn/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kerner-Wong dynamics of isospin particles in static gauge fields"};
  app.require_subcommand(1);

  isodyn::CommandOptions opts;
  std::string out = ".";
  std::uint64_t seed = 0;
  std::string format;
  auto addCommon = [&](CLI::App* cmd) {
    cmd->add_option("--out", out, "Output directory")->capture_default_str();
    cmd->add_option("--seed", seed, "Seed for randomized tests (0 = identity gauge)");
    cmd->add_option("--format", format, "Trajectory format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--svg", opts.svg, "Write an SVG plot of the orbit");
  };

  std::string path;
  auto* simulate = app.add_subcommand("simulate", "Integrate a scenario and report conserved-quantity drift");
  simulate->add_option("scenario", path, "Scenario INI file")->required();
  addCommon(simulate);

  auto* gauge = app.add_subcommand("gauge-test", "Compare a scenario with its random gauge transform");
  gauge->add_option("scenario", path, "Scenario INI file")->required();
  addCommon(gauge);

  auto* kk = app.add_subcommand("kk-compare", "5D geodesic versus 4D Lorentz force for an Abelian field");
  kk->add_option("scenario", path, "Scenario INI file")->required();
  addCommon(kk);

  isodyn::KillingRequest killing;
  std::string fieldKind;
  double kappa = 0.0;
  auto* kcheck = app.add_subcommand("killing-check", "van Holten constraint ladder for a coefficient ansatz");
  kcheck->add_option("ansatz", killing.ansatz,
                     "rotation | radial-charge | runge-lenz | diatomic-rotation, or an ansatz INI file")
      ->required();
  auto* fieldOpt = kcheck->add_option("--field", fieldKind, "Field kind for a built-in ansatz");
  auto* kappaOpt = kcheck->add_option("--kappa", kappa, "Diatomic coupling");
  addCommon(kcheck);

  auto* batch = app.add_subcommand("batch", "Run every scenario in a directory concurrently");
  batch->add_option("directory", path, "Directory of scenario INI files")->required();
  addCommon(batch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : isodyn::exit_code::validation;
  }

  opts.out = out;
  if (seed != 0 || gauge->count("--seed") > 0) opts.seed = seed;
  if (!format.empty()) opts.format = format;

  try {
    if (*simulate) return isodyn::cmdSimulate(path, opts);
    if (*gauge) return isodyn::cmdGaugeTest(path, opts);
    if (*kk) return isodyn::cmdKKCompare(path, opts);
    if (*kcheck) {
      if (*fieldOpt) killing.field = fieldKind;
      if (*kappaOpt) killing.kappa = kappa;
      return isodyn::cmdKillingCheck(killing, opts);
    }
    if (*batch) return isodyn::cmdBatch(path, opts);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return isodyn::exit_code::internal;
  }
  return isodyn::exit_code::internal;
}
