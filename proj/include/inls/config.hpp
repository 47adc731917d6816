#pragma once

#include <string>
#include <vector>

#include "inls/solver.hpp"

namespace inls {

struct CutoffChoice {
  int k = 0;
  double radius = 1.0;
};

struct EmitOptions {
  bool csv = true;
  bool svg = false;
  bool checkpoints = false;
};

struct ExperimentConfig {
  ProblemParams params{1, 0.5};
  Grid grid{1, 20.0, 1024};
  InitialData init;
  SolverConfig solver;
  /// Sorted by radius, all sharing one k.
  std::vector<CutoffChoice> cutoffs;
  EmitOptions emit;
  std::string out_dir = "run";

  std::vector<CutoffProfile> profiles() const;
};

/// Thrown by parse_config; carries every violation found, not just the first.
class ConfigError : public ConstraintError {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses the sectioned key = value format:
///
///   [problem]  N, b
///   [grid]     L, M
///   [init]     kind, amplitude, width, center, amplitude2, width2, center2, checkpoint
///   [solver]   dt0, dt_floor, t_max, safety, gradnorm_ceiling, supnorm_ceiling,
///              sample_stride, checkpoint_stride, c_cfl, mass_drift_limit
///   [cutoff]   k, R (comma-separated, ascending)
///   [emit]     csv, svg, checkpoints, out_dir
///
/// '#' starts a comment. Unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Renders a config back to the text format; parse_config(render_config(c)) == c.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace inls
