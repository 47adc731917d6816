#include "inls/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inls {

namespace {

/// |u|^power = (|u|^2)^{power/2}, with a multiply/sqrt-only path when 2*power is an integer.
struct ModulusPower {
  explicit ModulusPower(double power) : power_(power) {
    const double quarters = 2.0 * power;
    if (quarters == std::round(quarters) && quarters >= 0.0 && quarters <= 64.0) quarters_ = static_cast<int>(quarters);
  }
  double operator()(double modulus_sq) const {
    if (quarters_ < 0) return std::pow(modulus_sq, 0.5 * power_);
    double out = 1.0;
    for (int i = 0; i < quarters_ / 4; ++i) out *= modulus_sq;
    switch (quarters_ % 4) {
      case 1: return out * std::sqrt(std::sqrt(modulus_sq));
      case 2: return out * std::sqrt(modulus_sq);
      case 3: return out * std::sqrt(modulus_sq) * std::sqrt(std::sqrt(modulus_sq));
    }
    return out;
  }

 private:
  double power_;
  int quarters_ = -1;
};

/// Applies the nonlinear phase in place and returns the phase rate
/// sup potential * |u|^power (unchanged by the rotation). Returns NaN if any
/// sample is non-finite.
double apply_phase(Eigen::ArrayXcd& values, const Eigen::ArrayXd& potential, const ModulusPower& power,
                   double dt, double coupling) {
  double rate = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    const Complex z = values(i);
    const double local = potential(i) * power(std::norm(z));
    if (!std::isfinite(local)) return std::numeric_limits<double>::quiet_NaN();
    rate = std::max(rate, local);
    const double theta = dt * coupling * local;
    values(i) = z * Complex(std::cos(theta), std::sin(theta));
  }
  return rate;
}

Eigen::ArrayXd potential_of(const Field& f) { return f.grid().radii().pow(-f.params().b()); }

}  // namespace

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> out;
  if (!(dt0 > 0.0)) out.push_back("solver.dt0 must be positive");
  if (!(dt_floor > 0.0)) out.push_back("solver.dt_floor must be positive");
  if (!(dt_floor < dt0)) out.push_back("solver.dt_floor must be smaller than solver.dt0");
  if (!(t_max > 0.0)) out.push_back("solver.t_max must be positive");
  if (!(safety > 0.0 && safety <= 1.0)) out.push_back("solver.safety must lie in (0,1]");
  if (!(gradnorm_ceiling > 0.0)) out.push_back("solver.gradnorm_ceiling must be positive");
  if (!(supnorm_ceiling > 0.0)) out.push_back("solver.supnorm_ceiling must be positive");
  if (sample_stride < 1) out.push_back("solver.sample_stride must be a positive integer");
  if (checkpoint_stride) {
    if (*checkpoint_stride < 1) {
      out.push_back("solver.checkpoint_stride must be a positive integer");
    } else if (sample_stride >= 1 && *checkpoint_stride % sample_stride != 0) {
      out.push_back("solver.checkpoint_stride must be a multiple of solver.sample_stride");
    }
  }
  if (!(c_cfl > 0.0)) out.push_back("solver.c_cfl must be positive");
  if (!(mass_drift_limit > 0.0)) out.push_back("solver.mass_drift_limit must be positive");
  return out;
}

void SolverConfig::validate() const {
  const auto v = violations();
  if (v.empty()) return;
  std::string msg = v.front();
  for (std::size_t i = 1; i < v.size(); ++i) msg += "; " + v[i];
  throw ConstraintError(msg);
}

std::string to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::reached_t_max: return "reached_t_max";
    case Outcome::blowup_detected: return "blowup_detected";
    case Outcome::instability_detected: return "instability_detected";
  }
  return "unknown";
}

Field nonlinear_phase(const Field& f, double dt, double coupling) {
  f.require_finite("nonlinear_phase");
  Eigen::ArrayXcd values = f.values();
  const double rate =
      apply_phase(values, potential_of(f), ModulusPower(f.params().nonlinear_power()), dt, coupling);
  if (!std::isfinite(rate)) throw NonFiniteError("overflow in |u|^{(4-2b)/N}: numerical instability");
  return f.with_values(std::move(values));
}

Field strang_step(const SpectralPlan& plan, const Field& f, double dt, double coupling) {
  if (!(dt > 0.0)) throw ConstraintError("strang_step: dt must be positive");
  return free_propagate(plan, nonlinear_phase(free_propagate(plan, f, 0.5 * dt), dt, coupling), 0.5 * dt);
}

double nonlinear_rate(const Field& f) {
  const Eigen::ArrayXd local =
      potential_of(f) * f.values().abs2().pow(0.5 * f.params().nonlinear_power());
  return local.maxCoeff();
}

void fill_second_differences(std::vector<Sample>& series) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t profiles = series[i].virial.size();
    series[i].z_second_fd.assign(profiles, nan);
    if (i == 0 || i + 1 == series.size()) continue;
    const double h1 = series[i].t - series[i - 1].t;
    const double h2 = series[i + 1].t - series[i].t;
    for (std::size_t j = 0; j < profiles; ++j) {
      const double zm = series[i - 1].virial[j].z;
      const double z0 = series[i].virial[j].z;
      const double zp = series[i + 1].virial[j].z;
      series[i].z_second_fd[j] = 2.0 * ((zp - z0) / h2 - (z0 - zm) / h1) / (h1 + h2);
    }
  }
}

RunReport run(const SpectralPlan& plan, const Field& u0, const SolverConfig& cfg,
              std::span<const CutoffProfile> profiles, const RunHooks& hooks) {
  cfg.validate();
  require_same_grid(plan.grid(), u0.grid(), "run");
  u0.require_finite("initial data");

  const Eigen::ArrayXd potential = potential_of(u0);
  const ModulusPower power(u0.params().nonlinear_power());

  RunReport report;
  auto record = [&](const Field& u, long step, double t, double dt) -> const Sample& {
    FieldDiagnostics diag(plan, u);
    Sample s;
    s.step = step;
    s.t = t;
    s.dt = dt;
    s.conservation = diag.conservation();
    s.grad_norm = diag.grad_norm();
    s.sup_norm = diag.sup_norm();
    for (const CutoffProfile& p : profiles) s.virial.push_back(diag.virial(p));
    report.series.push_back(std::move(s));
    return report.series.back();
  };
  auto choose_dt = [&](double rate) { return cfg.safety * std::min(cfg.dt0, cfg.c_cfl / rate); };
  auto remaining = [&](double t) { return cfg.t_max - t; };

  double t = 0.0;
  long step = 0;
  double dt_raw = choose_dt(nonlinear_rate(u0));
  double dt = std::min(dt_raw, remaining(t));

  const Sample& first = record(u0, 0, 0.0, dt);
  report.initial_energy = first.conservation.energy;
  report.initial_mass = first.conservation.mass;
  report.initial_grad_norm = first.grad_norm;
  report.min_dt = dt_raw;

  if (dt_raw < cfg.dt_floor) {
    report.outcome = Outcome::blowup_detected;
    report.dt_floor_hit = true;
    report.blowup_time_bracket = std::make_pair(0.0, 0.0);
    report.detail = "initial step already below dt_floor";
    fill_second_differences(report.series);
    return report;
  }

  Eigen::ArrayXcd w = u0.values();
  free_propagate_in_place(plan, w, 0.5 * dt);
  double last_sample_t = 0.0;

  for (;;) {
    const double rate = apply_phase(w, potential, power, dt, 1.0);
    t += dt;
    ++step;
    const double step_taken = dt;

    if (!std::isfinite(rate)) {
      report.outcome = Outcome::instability_detected;
      report.detail = "non-finite field values at step " + std::to_string(step);
      break;
    }

    dt_raw = choose_dt(rate);
    report.min_dt = std::min(report.min_dt, dt_raw);
    const bool finished = remaining(t) <= 1e-12 * cfg.t_max;
    const bool floor_hit = !finished && dt_raw < cfg.dt_floor;
    const bool sample_now = step % cfg.sample_stride == 0 || finished || floor_hit;

    if (!sample_now) {
      dt = std::min(dt_raw, remaining(t));
      free_propagate_in_place(plan, w, 0.5 * (step_taken + dt));
      continue;
    }

    free_propagate_in_place(plan, w, 0.5 * step_taken);
    const Field u = u0.with_values(w);
    if (!u.is_finite()) {
      report.outcome = Outcome::instability_detected;
      report.detail = "non-finite field values at step " + std::to_string(step);
      break;
    }
    const Sample& s = record(u, step, t, step_taken);

    const double drift = std::abs(s.conservation.mass - report.initial_mass) / report.initial_mass;
    bool stop = false;
    if (drift > cfg.mass_drift_limit) {
      report.outcome = Outcome::instability_detected;
      std::ostringstream msg;
      msg << "relative mass drift " << drift << " exceeds " << cfg.mass_drift_limit;
      report.detail = msg.str();
      stop = true;
    } else {
      report.gradnorm_ceiling_hit = s.grad_norm > cfg.gradnorm_ceiling;
      report.supnorm_ceiling_hit = s.sup_norm > cfg.supnorm_ceiling;
      report.dt_floor_hit = floor_hit;
      if (report.gradnorm_ceiling_hit || report.supnorm_ceiling_hit || floor_hit) {
        report.outcome = Outcome::blowup_detected;
        report.blowup_time_bracket = std::make_pair(last_sample_t, t);
        std::ostringstream msg;
        if (report.gradnorm_ceiling_hit) msg << "grad_norm above ceiling; ";
        if (report.supnorm_ceiling_hit) msg << "sup_norm above ceiling; ";
        if (floor_hit) msg << "next step " << dt_raw << " below dt_floor; ";
        report.detail = msg.str();
        stop = true;
      } else if (finished) {
        report.outcome = Outcome::reached_t_max;
        stop = true;
      }
    }

    const bool checkpoint_due = cfg.checkpoint_stride && step % *cfg.checkpoint_stride == 0;
    if (hooks.on_checkpoint && (checkpoint_due || stop)) hooks.on_checkpoint(u, s);
    last_sample_t = t;
    if (stop) break;

    dt = std::min(dt_raw, remaining(t));
    free_propagate_in_place(plan, w, 0.5 * dt);
  }

  report.t_end = t;
  report.steps = step;
  fill_second_differences(report.series);
  return report;
}

RunReport run(const InitialData& init, const ProblemParams& params, const Grid& grid,
              const SolverConfig& cfg, std::span<const CutoffProfile> profiles, const RunHooks& hooks) {
  const SpectralPlan plan(grid);
  return run(plan, realize(init, params, grid), cfg, profiles, hooks);
}

}  // namespace inls
