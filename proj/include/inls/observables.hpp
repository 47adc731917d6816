#pragma once

#include <vector>

#include "inls/cutoff.hpp"
#include "inls/spectral.hpp"

namespace inls {

struct ConservationReport {
  double mass = 0.0;
  double energy = 0.0;
  /// ∫|∇u|^2.
  double kinetic = 0.0;
  /// ∫|x|^{-b}|u|^p.
  double potential_weighted = 0.0;
};

struct VirialReport {
  double z = 0.0;
  double z_prime = 0.0;
  /// z_R'' from the radial form of the second virial identity.
  double z_second_formula = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double K3 = 0.0;
  /// (z_R'' - K1 - K2 - K3) / E[u(t)]; NaN when |E| <= 1e-10.
  double alpha_check = 0.0;
};

/// Pointwise quantities shared by all diagnostics of one field: the spectral
/// gradient, |∇u|^2, x·∇u, |x| and the weighted density |x|^{-b}|u|^p.
/// Building it costs N+1 transforms; every query afterwards is a quadrature.
class FieldDiagnostics {
 public:
  FieldDiagnostics(const SpectralPlan& plan, const Field& f);

  const Field& field() const { return field_; }
  ConservationReport conservation() const { return conservation_; }
  double grad_norm() const;
  double sup_norm() const;

  double virial_z(const CutoffProfile& profile) const;
  double virial_z_prime(const CutoffProfile& profile) const;
  VirialReport virial(const CutoffProfile& profile) const;

 private:
  void require_params(const CutoffProfile& profile) const;

  Field field_;
  Eigen::ArrayXd radius_;
  Eigen::ArrayXd density_;        // |u|^2
  Eigen::ArrayXd grad_sq_;        // |∇u|^2
  Eigen::ArrayXcd radial_grad_;   // x·∇u
  Eigen::ArrayXd weighted_;       // |x|^{-b}|u|^p
  ConservationReport conservation_;
};

ConservationReport conservation(const SpectralPlan& plan, const Field& f);
/// ∫ φ_R |u|^2.
double virial_z(const Field& f, const CutoffProfile& profile);
/// 2 Im ∫ ∇φ_R·∇u ū.
double virial_z_prime(const SpectralPlan& plan, const Field& f, const CutoffProfile& profile);
/// Full virial report: z_R, z_R', z_R'' and the K1/K2/K3 decomposition.
VirialReport virial_z_second(const SpectralPlan& plan, const Field& f, const CutoffProfile& profile);

/// Evaluates a radial profile g(|x|) at every grid point.
template <typename Fn>
Eigen::ArrayXd lift_radial(const Eigen::ArrayXd& radii, Fn&& g) {
  Eigen::ArrayXd out(radii.size());
  for (Index i = 0; i < radii.size(); ++i) out(i) = g(radii(i));
  return out;
}

}  // namespace inls
