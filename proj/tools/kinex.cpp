// kinex: command-line driver for the kinetic income-class model.
//
//   kinex equilibrium --mu 135 --tau-min 0.30 --tau-max 0.45 --gamma 0.5
//   kinex sweep tax --mu 135 --pairs table1 --fit
//   kinex sweep welfare --mu 127.65 --gammas 0.5:0.15:8
//   kinex baseline --preset table4
//   kinex fit --preset fig3

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "kinex/commands.hpp"
#include "kinex/manifest.hpp"

namespace {

void add_scenario_flags(CLI::App* app, kinex::ConfigOverrides& o, std::optional<std::string>& config) {
  app->add_option("--config", config, "JSON config file (flags override its values)");
  app->add_option("--preset", o.preset, "Reference grid: table1, table2, table3, table4, fig3");
  app->add_option("--n", o.n, "Number of income classes [15]");
  app->add_option("--spacing", o.spacing, "Income ladder spacing, r_j = spacing * j [25]");
  app->add_option("--s", o.transaction, "Money moved per transaction [1]");
  app->add_option("--mu", o.mu, "Total income of the initial condition");
  app->add_option("--tau-min", o.tau_min, "Tax rate of the poorest class");
  app->add_option("--tau-max", o.tau_max, "Tax rate of the richest class");
  app->add_option("--gamma", o.gamma, "Welfare shape parameter in (0, 0.5]");
  app->add_option("--seed", o.seed, "Seed of the random initial condition");
  app->add_option("--tol", o.tol, "Residual tolerance [1e-10]");
  app->add_option("--dt", o.dt, "RK4 step [0.1]");
  app->add_option("--max-time", o.max_time, "Integration horizon [1e6]");
  app->add_option("--out", o.out, "Output directory");
  app->add_option("--format", o.format, "csv or json [csv]");
  app->add_option("--jobs", o.jobs, "Worker threads, 0 = all processors");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinetic income-class model: equilibria, policy sweeps and fits"};
  app.require_subcommand(1);

  kinex::ConfigOverrides flags;
  std::optional<std::string> config_path;

  auto* equilibrium = app.add_subcommand("equilibrium", "Stationary distribution for one policy");
  add_scenario_flags(equilibrium, flags, config_path);

  auto* sweep = app.add_subcommand("sweep", "Policy sweeps");
  sweep->require_subcommand(1);
  auto* sweep_tax = sweep->add_subcommand("tax", "Sweep (tau_min, tau_max) pairs");
  add_scenario_flags(sweep_tax, flags, config_path);
  sweep_tax->add_option("--pairs", flags.pairs, "table1 | table2 | tmin:tmax[,tmin:tmax...]");
  sweep_tax->add_flag("--fit", flags.fit, "Also fit G against delta_tau");
  auto* sweep_welfare = sweep->add_subcommand("welfare", "Sweep gamma values");
  add_scenario_flags(sweep_welfare, flags, config_path);
  sweep_welfare->add_option("--gammas", flags.gammas, "table3 | table4 | start:stop:count | list");
  sweep_welfare->add_flag("--fit", flags.fit, "Also fit G against w_n/w_1");

  auto* baseline = app.add_subcommand("baseline", "Equilibrium with taxation switched off");
  add_scenario_flags(baseline, flags, config_path);

  auto* fit = app.add_subcommand("fit", "Linear fits of G against delta_tau and w_n/w_1");
  add_scenario_flags(fit, flags, config_path);
  fit->add_option("--records", flags.records, "Fit an existing records CSV instead of sweeping");
  fit->add_option("--abscissa", flags.abscissa, "delta_tau or w_ratio");
  fit->add_option("--pairs", flags.pairs, "Tax grid for the delta_tau fit");
  fit->add_option("--gammas", flags.gammas, "Gamma grid for the w_ratio fit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kinex::kExitOk : kinex::kExitUsage;
  }

  kinex::Command command = kinex::Command::equilibrium;
  if (*sweep_tax) command = kinex::Command::sweep_tax;
  if (*sweep_welfare) command = kinex::Command::sweep_welfare;
  if (*baseline) command = kinex::Command::baseline;
  if (*fit) command = kinex::Command::fit;

  kinex::RunManifest manifest;
  try {
    std::optional<nlohmann::json> file;
    if (config_path) file = kinex::load_config_file(*config_path);
    manifest = kinex::resolve_manifest(command, file, flags);
  } catch (const kinex::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kinex::kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kinex::kExitUsage;
  }
  return kinex::run_command(manifest, std::cout, std::cerr);
}
