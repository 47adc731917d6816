#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "inls/observables.hpp"

namespace inls {

struct SolverConfig {
  double dt0 = 1e-3;
  double dt_floor = 1e-12;
  double t_max = 1.0;
  double safety = 0.9;
  double gradnorm_ceiling = 1e12;
  double supnorm_ceiling = 1e12;
  int sample_stride = 10;
  /// Steps between checkpoints; must be a multiple of sample_stride.
  std::optional<int> checkpoint_stride;
  /// Radians of nonlinear phase allowed per step.
  double c_cfl = 0.1;
  /// Relative mass drift beyond which the run is declared unstable.
  double mass_drift_limit = 1e-6;

  std::vector<std::string> violations() const;
  /// Throws ConstraintError listing every violation.
  void validate() const;
};

enum class Outcome { reached_t_max, blowup_detected, instability_detected };

std::string to_string(Outcome outcome);

/// Diagnostics at one sampled step.
struct Sample {
  long step = 0;
  double t = 0.0;
  /// Step size that produced this state (the first planned step at t = 0).
  double dt = 0.0;
  ConservationReport conservation;
  double grad_norm = 0.0;
  double sup_norm = 0.0;
  /// One entry per cutoff profile.
  std::vector<VirialReport> virial;
  /// Three-point second difference of z_R in time; NaN at the ends.
  std::vector<double> z_second_fd;
};

struct RunReport {
  Outcome outcome = Outcome::reached_t_max;
  double t_end = 0.0;
  long steps = 0;
  std::vector<Sample> series;
  std::optional<std::pair<double, double>> blowup_time_bracket;
  double initial_energy = 0.0;
  double initial_mass = 0.0;
  double initial_grad_norm = 0.0;
  double min_dt = 0.0;
  bool gradnorm_ceiling_hit = false;
  bool supnorm_ceiling_hit = false;
  bool dt_floor_hit = false;
  std::string detail;
};

struct RunHooks {
  /// Called at checkpoint steps and at the final sample with the synchronised field.
  std::function<void(const Field&, const Sample&)> on_checkpoint;
};

/// Exact flow of i u_t + |x|^{-b}|u|^{(4-2b)/N} u = 0 over dt:
/// u ↦ u exp(i dt coupling |x|^{-b}|u|^{(4-2b)/N}). coupling = 0 switches the
/// nonlinearity off.
Field nonlinear_phase(const Field& f, double dt, double coupling = 1.0);

/// free(dt/2) ∘ nonlinear(dt) ∘ free(dt/2).
Field strang_step(const SpectralPlan& plan, const Field& f, double dt, double coupling = 1.0);

/// sup |x|^{-b}|u|^{(4-2b)/N}, the nonlinear phase rate.
double nonlinear_rate(const Field& f);

/// Advances u0 to t_max or until a detector fires.
///
/// Step size: safety * min(dt0, c_cfl / rate), where the rate is measured on
/// the state the previous nonlinear substep acted on. Consecutive free
/// half-steps between samples are fused into one transform pair.
RunReport run(const SpectralPlan& plan, const Field& u0, const SolverConfig& cfg,
              std::span<const CutoffProfile> profiles, const RunHooks& hooks = {});

RunReport run(const InitialData& init, const ProblemParams& params, const Grid& grid,
              const SolverConfig& cfg, std::span<const CutoffProfile> profiles,
              const RunHooks& hooks = {});

/// Fills Sample::z_second_fd with the non-uniform three-point formula.
void fill_second_differences(std::vector<Sample>& series);

}  // namespace inls
