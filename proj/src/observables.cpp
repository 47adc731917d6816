#include "inls/observables.hpp"

#include <cmath>
#include <limits>

namespace inls {

FieldDiagnostics::FieldDiagnostics(const SpectralPlan& plan, const Field& f)
    : field_(f), radius_(f.grid().radii()) {
  require_same_grid(plan.grid(), f.grid(), "FieldDiagnostics");
  f.require_finite("diagnostics");
  const ProblemParams& params = f.params();
  const Grid& grid = f.grid();

  density_ = f.values().abs2();
  grad_sq_ = Eigen::ArrayXd::Zero(grid.size());
  radial_grad_ = Eigen::ArrayXcd::Zero(grid.size());
  const std::vector<Field> grad = gradient(plan, f);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    grad_sq_ += grad[axis].values().abs2();
    radial_grad_ += grid.coordinates(axis).cast<Complex>() * grad[axis].values();
  }
  weighted_ = radius_.pow(-params.b()) * density_.pow(0.5 * params.p());
  if (!weighted_.isFinite().all()) throw NonFiniteError("non-finite |x|^{-b}|u|^p integrand");

  conservation_.mass = integrate(grid, density_);
  conservation_.kinetic = integrate(grid, grad_sq_);
  conservation_.potential_weighted = integrate(grid, weighted_);
  conservation_.energy =
      0.5 * conservation_.kinetic - params.energy_coefficient() * conservation_.potential_weighted;
}

double FieldDiagnostics::grad_norm() const { return std::sqrt(conservation_.kinetic); }

double FieldDiagnostics::sup_norm() const { return density_.size() ? std::sqrt(density_.maxCoeff()) : 0.0; }

void FieldDiagnostics::require_params(const CutoffProfile& profile) const {
  if (!(profile.params() == field_.params())) {
    throw ConstraintError("cutoff profile was built for different problem parameters");
  }
}

double FieldDiagnostics::virial_z(const CutoffProfile& profile) const {
  const Eigen::ArrayXd phi = lift_radial(radius_, [&](double r) { return profile.phi_R(r); });
  return integrate(field_.grid(), phi * density_);
}

double FieldDiagnostics::virial_z_prime(const CutoffProfile& profile) const {
  // ∇φ_R·∇u = (∂_rφ_R / r) x·∇u for radial φ_R.
  const Eigen::ArrayXd radial = lift_radial(radius_, [&](double r) { return profile.dphi_R(r) / r; });
  const Eigen::ArrayXd integrand = radial * (radial_grad_ * field_.values().conjugate()).imag();
  return 2.0 * integrate(field_.grid(), integrand);
}

VirialReport FieldDiagnostics::virial(const CutoffProfile& profile) const {
  require_params(profile);
  const Grid& grid = field_.grid();
  const int n = field_.params().dim();
  const double b = field_.params().b();

  const Index size = grid.size();
  Eigen::ArrayXd over_r(size), hessian_gap(size), bilap(size), nonlinear_weight(size);
  Eigen::ArrayXd k1_gap(size), k2_weight(size);
  const double gamma = n - 1.0 + b * n / (2.0 - b);
  for (Index i = 0; i < size; ++i) {
    const double r = radius_(i);
    const double psi = profile.dphi_R(r);
    const double psi1 = profile.d2phi_R(r);
    over_r(i) = psi / r;
    hessian_gap(i) = psi1 / (r * r) - psi / (r * r * r);
    bilap(i) = profile.bilaplacian(r);
    nonlinear_weight(i) = -psi1 - gamma * psi / r;
    k1_gap(i) = 2.0 - psi / r;
    k2_weight(i) = (2.0 - b) * (2.0 - psi1) + (2.0 * n - 2.0 + b) * (2.0 - psi / r);
  }
  const Eigen::ArrayXd radial_sq = radial_grad_.abs2();

  VirialReport rep;
  rep.z = virial_z(profile);
  rep.z_prime = virial_z_prime(profile);

  const double t1 = 4.0 * integrate(grid, over_r * grad_sq_);
  const double t2 = 4.0 * integrate(grid, hessian_gap * radial_sq);
  const double t3 = -integrate(grid, density_ * bilap);
  const double t4 = (4.0 - 2.0 * b) / (n + 2.0 - b) * integrate(grid, nonlinear_weight * weighted_);
  rep.z_second_formula = t1 + t2 + t3 + t4;

  rep.K1 = -4.0 * integrate(grid, k1_gap * grad_sq_) + 4.0 * integrate(grid, hessian_gap * radial_sq);
  rep.K2 = 2.0 / (n + 2.0 - b) * integrate(grid, k2_weight * weighted_);
  rep.K3 = t3;

  const double energy = conservation_.energy;
  rep.alpha_check = std::abs(energy) > 1e-10 ? (rep.z_second_formula - rep.K1 - rep.K2 - rep.K3) / energy
                                             : std::numeric_limits<double>::quiet_NaN();
  return rep;
}

ConservationReport conservation(const SpectralPlan& plan, const Field& f) {
  return FieldDiagnostics(plan, f).conservation();
}

double virial_z(const Field& f, const CutoffProfile& profile) {
  const Eigen::ArrayXd r = f.grid().radii();
  const Eigen::ArrayXd phi = lift_radial(r, [&](double x) { return profile.phi_R(x); });
  return integrate(f.grid(), phi * f.values().abs2());
}

double virial_z_prime(const SpectralPlan& plan, const Field& f, const CutoffProfile& profile) {
  return FieldDiagnostics(plan, f).virial_z_prime(profile);
}

VirialReport virial_z_second(const SpectralPlan& plan, const Field& f, const CutoffProfile& profile) {
  return FieldDiagnostics(plan, f).virial(profile);
}

}  // namespace inls
