#pragma once

#include <memory>
#include <span>
#include <vector>

#include "inls/core.hpp"

namespace inls {

/// Cached FFT plans and Fourier multipliers for one grid.
///
/// Immutable after construction; transforms run on caller-owned buffers, so a
/// plan can be shared between threads.
class SpectralPlan {
 public:
  explicit SpectralPlan(const Grid& grid);

  const Grid& grid() const { return grid_; }

  /// Wavenumbers along one axis (DFT order).
  const Eigen::ArrayXd& axis_frequencies() const { return xi_; }
  /// Wavenumbers used for first derivatives: Nyquist mode zeroed.
  const Eigen::ArrayXd& derivative_frequencies() const { return xi_deriv_; }
  /// |ξ|^2 at every flat frequency index.
  const Eigen::ArrayXd& wavenumber_squared() const { return xi2_; }
  /// ξ_axis (Nyquist zeroed) at every flat frequency index.
  Eigen::ArrayXd derivative_multiplier(int axis) const;

  /// In-place unnormalised forward DFT.
  void forward(Eigen::ArrayXcd& data) const;
  /// In-place inverse DFT including the 1/M^N factor.
  void inverse(Eigen::ArrayXcd& data) const;

 private:
  struct FftwPlans;

  Grid grid_;
  Eigen::ArrayXd xi_;
  Eigen::ArrayXd xi_deriv_;
  Eigen::ArrayXd xi2_;
  std::shared_ptr<const FftwPlans> plans_;
};

/// Component j is the inverse transform of (i ξ_j) û.
std::vector<Field> gradient(const SpectralPlan& plan, const Field& f);
/// Sum of spectral ∂_j of the components.
Field divergence(const SpectralPlan& plan, std::span<const Field> components);
/// Inverse transform of -|ξ|^2 û.
Field laplacian(const SpectralPlan& plan, const Field& f);
/// Exact solution of i u_t + Δu = 0 over time dt: û ↦ exp(-i|ξ|^2 dt) û.
Field free_propagate(const SpectralPlan& plan, const Field& f, double dt);
/// In-place variant used by the time stepper.
void free_propagate_in_place(const SpectralPlan& plan, Eigen::ArrayXcd& values, double dt);

/// ‖∇u‖_2 with spectral derivatives.
double grad_norm(const SpectralPlan& plan, const Field& f);
/// ∫|∇u|^2 computed on the frequency side (Parseval).
double kinetic_from_spectrum(const SpectralPlan& plan, const Field& f);

}  // namespace inls
