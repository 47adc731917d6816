#include "inls/spectral.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace inls {

namespace {

// The FFTW planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(Eigen::ArrayXcd& a) { return reinterpret_cast<fftw_complex*>(a.data()); }

}  // namespace

struct SpectralPlan::FftwPlans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  FftwPlans(const Grid& grid) {
    std::vector<int> dims(grid.dim(), static_cast<int>(grid.points()));
    Eigen::ArrayXcd scratch(grid.size());
    auto* buf = as_fftw(scratch);
    // FFTW_UNALIGNED: Eigen storage is not guaranteed to match the planning
    // buffer's SIMD alignment, and the codelet choice must not depend on it.
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    std::lock_guard lock(planner_mutex());
    forward = fftw_plan_dft(grid.dim(), dims.data(), buf, buf, FFTW_FORWARD, flags);
    backward = fftw_plan_dft(grid.dim(), dims.data(), buf, buf, FFTW_BACKWARD, flags);
    if (!forward || !backward) throw Error("FFTW planning failed");
  }
  ~FftwPlans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
  }
  FftwPlans(const FftwPlans&) = delete;
  FftwPlans& operator=(const FftwPlans&) = delete;
};

SpectralPlan::SpectralPlan(const Grid& grid)
    : grid_(grid),
      xi_(grid.axis_frequencies()),
      xi_deriv_(xi_),
      xi2_(Eigen::ArrayXd::Zero(grid.size())),
      plans_(std::make_shared<const FftwPlans>(grid)) {
  xi_deriv_(grid.points() / 2) = 0.0;
  Index stride = 1;
  for (int axis = grid.dim() - 1; axis >= 0; --axis) {
    for (Index i = 0; i < grid.size(); ++i) {
      const double k = xi_((i / stride) % grid.points());
      xi2_(i) += k * k;
    }
    stride *= grid.points();
  }
}

Eigen::ArrayXd SpectralPlan::derivative_multiplier(int axis) const {
  Index stride = 1;
  for (int d = grid_.dim() - 1; d > axis; --d) stride *= grid_.points();
  Eigen::ArrayXd out(grid_.size());
  for (Index i = 0; i < grid_.size(); ++i) out(i) = xi_deriv_((i / stride) % grid_.points());
  return out;
}

void SpectralPlan::forward(Eigen::ArrayXcd& data) const {
  if (data.size() != grid_.size()) throw GridMismatch("transform buffer size differs from plan");
  fftw_execute_dft(plans_->forward, as_fftw(data), as_fftw(data));
}

void SpectralPlan::inverse(Eigen::ArrayXcd& data) const {
  if (data.size() != grid_.size()) throw GridMismatch("transform buffer size differs from plan");
  fftw_execute_dft(plans_->backward, as_fftw(data), as_fftw(data));
  data /= static_cast<double>(grid_.size());
}

std::vector<Field> gradient(const SpectralPlan& plan, const Field& f) {
  require_same_grid(plan.grid(), f.grid(), "gradient");
  Eigen::ArrayXcd hat = f.values();
  plan.forward(hat);
  std::vector<Field> out;
  out.reserve(f.grid().dim());
  for (int axis = 0; axis < f.grid().dim(); ++axis) {
    Eigen::ArrayXcd comp = hat * (Complex(0.0, 1.0) * plan.derivative_multiplier(axis).cast<Complex>());
    plan.inverse(comp);
    out.push_back(f.with_values(std::move(comp)));
  }
  return out;
}

Field divergence(const SpectralPlan& plan, std::span<const Field> components) {
  if (static_cast<int>(components.size()) != plan.grid().dim()) {
    throw GridMismatch("divergence needs one component per axis");
  }
  Eigen::ArrayXcd acc = Eigen::ArrayXcd::Zero(plan.grid().size());
  for (int axis = 0; axis < plan.grid().dim(); ++axis) {
    require_same_grid(plan.grid(), components[axis].grid(), "divergence");
    Eigen::ArrayXcd hat = components[axis].values();
    plan.forward(hat);
    acc += hat * (Complex(0.0, 1.0) * plan.derivative_multiplier(axis).cast<Complex>());
  }
  plan.inverse(acc);
  return components[0].with_values(std::move(acc));
}

Field laplacian(const SpectralPlan& plan, const Field& f) {
  require_same_grid(plan.grid(), f.grid(), "laplacian");
  Eigen::ArrayXcd hat = f.values();
  plan.forward(hat);
  hat *= (-plan.wavenumber_squared()).cast<Complex>();
  plan.inverse(hat);
  return f.with_values(std::move(hat));
}

void free_propagate_in_place(const SpectralPlan& plan, Eigen::ArrayXcd& values, double dt) {
  if (!std::isfinite(dt)) throw ConstraintError("free_propagate: dt must be finite");
  if (dt == 0.0) return;
  plan.forward(values);
  const Eigen::ArrayXd& k2 = plan.wavenumber_squared();
  for (Index i = 0; i < values.size(); ++i) {
    const double theta = -k2(i) * dt;
    values(i) *= Complex(std::cos(theta), std::sin(theta));
  }
  plan.inverse(values);
}

Field free_propagate(const SpectralPlan& plan, const Field& f, double dt) {
  require_same_grid(plan.grid(), f.grid(), "free_propagate");
  Eigen::ArrayXcd v = f.values();
  free_propagate_in_place(plan, v, dt);
  return f.with_values(std::move(v));
}

double grad_norm(const SpectralPlan& plan, const Field& f) {
  f.require_finite("grad_norm");
  double total = 0.0;
  for (const Field& c : gradient(plan, f)) total += integrate(f.grid(), c.values().abs2());
  return std::sqrt(total);
}

double kinetic_from_spectrum(const SpectralPlan& plan, const Field& f) {
  require_same_grid(plan.grid(), f.grid(), "kinetic_from_spectrum");
  Eigen::ArrayXcd hat = f.values();
  plan.forward(hat);
  Eigen::ArrayXd k2 = Eigen::ArrayXd::Zero(hat.size());
  for (int axis = 0; axis < f.grid().dim(); ++axis) k2 += plan.derivative_multiplier(axis).square();
  // Parseval on the DFT: Σ|u_j|^2 = Σ|û_k|^2 / M^N.
  return (k2 * hat.abs2()).sum() * f.grid().cell_volume() / static_cast<double>(f.grid().size());
}

}  // namespace inls
