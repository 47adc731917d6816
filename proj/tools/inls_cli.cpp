#include <CLI11.hpp>

#include <iostream>

#include "inls/experiment.hpp"

using namespace inls;

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulator and verification lab for the L2-critical inhomogeneous NLS"};
  app.require_subcommand(1);

  std::string config_path;
  auto* simulate_cmd = app.add_subcommand("simulate", "run one experiment from a config file");
  simulate_cmd->add_option("config", config_path, "config file")->required();

  std::string axis;
  std::vector<double> values;
  int workers = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "run one experiment per value of a parameter");
  sweep_cmd->add_option("config", config_path, "base config file")->required();
  sweep_cmd->add_option("--axis", axis, "amplitude|R|b|k")->required();
  sweep_cmd->add_option("--values", values, "parameter values")->required()->delimiter(',');
  sweep_cmd->add_option("--workers", workers, "concurrent runs")->check(CLI::PositiveNumber);

  std::string run_dir;
  auto* plot_cmd = app.add_subcommand("plot", "write SVG plots for a run directory");
  plot_cmd->add_option("run_dir", run_dir, "run directory")->required();

  int dim = 1, k = 0, samples = 100000, trials = 200;
  double b = 0.5, radius = 1.0, c = 1.0;
  std::uint64_t seed = 1;
  auto* cutoff_cmd = app.add_subcommand("cutoff-verify", "certify the cutoff weight inequalities");
  cutoff_cmd->add_option("--N", dim, "dimension")->required();
  cutoff_cmd->add_option("--b", b, "inhomogeneity exponent")->required();
  cutoff_cmd->add_option("--k", k, "cutoff degree (default rule if omitted)");
  cutoff_cmd->add_option("--R", radius, "cutoff radius");
  cutoff_cmd->add_option("--samples", samples, "sample count");
  cutoff_cmd->add_option("--c", c, "constant in c eps Phi2^{2q} <= Phi1 (e.g. from interp-check)");

  std::string which;
  auto* interp_cmd = app.add_subcommand("interp-check", "estimate an interpolation constant empirically");
  interp_cmd->add_option("--which", which, "interp1|interp2|otn1|gn")->required();
  interp_cmd->add_option("--N", dim, "dimension")->required();
  interp_cmd->add_option("--b", b, "inhomogeneity exponent")->required();
  interp_cmd->add_option("--trials", trials, "family members")->check(CLI::PositiveNumber);
  interp_cmd->add_option("--seed", seed, "family seed");

  double tolerance = 1e-12;
  auto* audit_cmd = app.add_subcommand("virial-audit", "recompute diagnostics from checkpoints and compare with the CSV");
  audit_cmd->add_option("run_dir", run_dir, "run directory")->required();
  audit_cmd->add_option("--tol", tolerance, "relative tolerance");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate_cmd) {
      const SimulationResult r = simulate(load_config(config_path));
      std::cout << to_string(r.report.outcome) << " t_end=" << r.report.t_end << " steps=" << r.report.steps
                << " manifest=" << r.manifest.string() << "\n";
      if (!r.report.detail.empty()) std::cout << r.report.detail << "\n";
      return r.exit_status;
    }
    if (*sweep_cmd) {
      const auto rows = sweep(load_config(config_path), sweep_axis_from_string(axis), values, workers);
      int status = kExitReachedTMax;
      for (const SweepRow& row : rows) {
        std::cout << axis << "=" << row.value << " " << row.outcome << " t_end=" << row.t_end << " E0=" << row.E0
                  << (row.error.empty() ? "" : " error: " + row.error) << "\n";
        if (row.exit_status == kExitConfigError || row.exit_status == kExitFailure) status = row.exit_status;
      }
      return status;
    }
    if (*plot_cmd) {
      for (const auto& p : plot(run_dir)) std::cout << p.string() << "\n";
      return 0;
    }
    if (*cutoff_cmd) {
      if (k == 0) k = default_k(ProblemParams(dim, b));
      const auto report = cutoff_verify_report(dim, b, k, radius, samples, c);
      std::cout << report.dump(2) << "\n";
      return report["pass"]["all"].get<bool>() ? 0 : kExitFailure;
    }
    if (*interp_cmd) {
      std::cout << interp_check_report(inequality_from_string(which), dim, b, trials, seed).dump(2) << "\n";
      return 0;
    }
    if (*audit_cmd) {
      const AuditReport report = virial_audit(run_dir, tolerance);
      std::cout << report.to_json().dump(2) << "\n";
      return report.pass ? 0 : kExitFailure;
    }
  } catch (const ConfigError& e) {
    for (const auto& p : e.problems()) std::cerr << "config error: " << p << "\n";
    return kExitConfigError;
  } catch (const ConstraintError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
