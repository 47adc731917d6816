#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "inls/config.hpp"
#include "inls/inequalities.hpp"

namespace inls {

namespace fs = std::filesystem;

/// Process exit statuses.
inline constexpr int kExitReachedTMax = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitFailure = 2;
inline constexpr int kExitBlowup = 10;
inline constexpr int kExitInstability = 20;

int exit_code(Outcome outcome);

inline const std::vector<std::string>& series_columns() {
  static const std::vector<std::string> cols{"t",   "dt",        "mass",         "energy",
                                             "grad_norm", "sup_norm", "zR",       "zR_prime",
                                             "zR_second_formula", "zR_second_fd", "K1", "K2",
                                             "K3", "alpha_check"};
  return cols;
}

/// Mean/min/max of every finite alpha_check over samples and profiles.
struct AlphaSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  /// (max - min) / |mean|.
  double rel_spread = 0.0;
  long samples = 0;
};

AlphaSummary summarize_alpha(const RunReport& report);

struct SimulationResult {
  RunReport report;
  AlphaSummary alpha;
  fs::path manifest;
  int exit_status = 0;
};

/// One CSV row per sample for profile `index`, columns as series_columns().
std::string series_csv(const RunReport& report, std::size_t index);

/// Runs one experiment into cfg.out_dir: manifest.json, config.ini,
/// series_p<i>.csv per cutoff profile, checkpoints/ and optional SVG plots.
SimulationResult simulate(const ExperimentConfig& cfg);

enum class SweepAxis { amplitude, R, b, k };
SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
  double value = 0.0;
  std::string outcome;
  double t_end = 0.0;
  double E0 = 0.0;
  AlphaSummary alpha;
  int exit_status = 0;
  std::string error;
};

/// One simulate() per value into out_dir/<axis>_<i>, up to `workers` at a time,
/// plus out_dir/summary.csv in value order.
std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                            int workers);

/// Writes conservation.svg, virial.svg and gradnorm.svg into a run directory
/// and registers them in its manifest. Nothing is written on error.
std::vector<fs::path> plot(const fs::path& run_dir);

/// Every problem with a run manifest: missing or mistyped fields, unknown
/// outcome, files that do not exist.
std::vector<std::string> validate_manifest(const nlohmann::json& manifest, const fs::path& run_dir);

struct AuditReport {
  int checkpoints = 0;
  int rows_checked = 0;
  double max_rel_error = 0.0;
  std::string worst;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Recomputes the sampled diagnostics from every stored checkpoint and compares
/// them with the stored CSV rows at the same t.
AuditReport virial_audit(const fs::path& run_dir, double tolerance = 1e-12);

/// {phicond_min, grad_weight_bound, epsilon, sup_ratio, ... pass flags}.
nlohmann::json cutoff_verify_report(int dim, double b, int k, double radius, int samples, double c);

/// Grid and weight used by interp-check for a given inequality and dimension.
IneqCase default_case(Inequality which, int dim, double b);

/// {c_hat, argmax_descriptor, ratio_histogram, ...}.
nlohmann::json interp_check_report(Inequality which, int dim, double b, int trials, std::uint64_t seed);

}  // namespace inls
