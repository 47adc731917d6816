#pragma once

#include <array>
#include <vector>

#include "inls/core.hpp"

namespace inls {

/// Polynomial piece of degree 7 on [left, right], in the local variable
/// t = (s - left) / (right - left).
struct PolyPiece {
  double left = 0.0;
  double right = 0.0;
  std::array<double, 8> coeffs{};

  /// d^order/ds^order of the piece at s (order 0..3).
  double derivative(double s, int order) const;
  /// ∫_left^s of the piece.
  double integral_to(double s) const;
};

/// Builds the degree-7 piece matching value and first three derivatives
/// (`left_jet`, `right_jet`) at both ends.
PolyPiece hermite7(double left, double right, const std::array<double, 4>& left_jet,
                   const std::array<double, 4>& right_jet);

struct BridgeOptions {
  /// Skip the single-piece attempt and build the two-piece bridge directly.
  bool force_split = false;
  /// Interior points checked for v' < 0.
  int monotonicity_samples = 10000;
};

/// Radial localisation weight φ_R(r) = R^2 φ(r/R), φ(s) = ∫_0^s v.
///
/// v(s) = 2s on [0,1], 2s - 2(s-1)^k on (1, s*], a C^3 decreasing bridge on
/// (s*, 2) and 0 beyond, with s* = 1 + (1/k)^{1/(k-1)} the maximiser of
/// 2s - 2(s-1)^k.
class CutoffProfile {
 public:
  int k() const { return k_; }
  double radius() const { return radius_; }
  double r_star() const { return r_star_; }
  const ProblemParams& params() const { return params_; }
  const std::vector<PolyPiece>& bridge() const { return bridge_; }

  /// d^order v / ds^order at s >= 0 (order 0..3), unscaled variable.
  double v(double s, int order = 0) const;
  /// φ(s) = ∫_0^s v, exact on every piece.
  double phi(double s) const;
  /// sup φ = φ(2).
  double sup_phi() const { return phi_at_two_; }

  double phi_R(double r) const { return radius_ * radius_ * phi(r / radius_); }
  /// ∂_r φ_R = R v(r/R).
  double dphi_R(double r) const { return radius_ * v(r / radius_); }
  /// ∂_r^2 φ_R = v'(r/R).
  double d2phi_R(double r) const { return v(r / radius_, 1); }
  double d3phi_R(double r) const { return v(r / radius_, 2) / radius_; }
  double d4phi_R(double r) const { return v(r / radius_, 3) / (radius_ * radius_); }

  /// Δφ_R for the radial lift to R^N.
  double laplacian(double r) const;
  /// Δ^2 φ_R from closed-form radial derivatives.
  double bilaplacian(double r) const;

  /// Breakpoints of the piecewise definition in the unscaled variable.
  std::vector<double> breakpoints() const;

 private:
  friend CutoffProfile build_cutoff_unchecked(int, double, const ProblemParams&, const BridgeOptions&);

  CutoffProfile(int k, double radius, ProblemParams params);

  int k_;
  double radius_;
  double r_star_;
  ProblemParams params_;
  std::vector<PolyPiece> bridge_;
  double phi_at_r_star_ = 0.0;
  double phi_at_two_ = 0.0;
};

/// Smallest admissible k with margin: max(⌈3-b⌉, ⌈2/b⌉, ⌈4/b⌉ if N=2) + 1.
int default_k(const ProblemParams& params);

/// Empty when admissible, otherwise one message per violated constraint
/// (k > 3-b and k > 2/b for N != 2; k > 4/b for N = 2).
std::vector<std::string> k_violations(int k, const ProblemParams& params);

/// Validates k and R, builds the bridge and verifies v' < 0 on (s*, 2).
CutoffProfile build_cutoff(int k, double radius, const ProblemParams& params,
                           const BridgeOptions& options = {});
/// Same as build_cutoff but without the k constraints (k >= 2 still required).
/// Used to exhibit what the constraints protect against.
CutoffProfile build_cutoff_unchecked(int k, double radius, const ProblemParams& params,
                                     const BridgeOptions& options = {});

/// Φ_{1,R} and Φ_{2,R} as functions of r.
class WeightPair {
 public:
  explicit WeightPair(CutoffProfile profile) : profile_(std::move(profile)) {}

  const CutoffProfile& profile() const { return profile_; }

  /// 4 (2 - ∂_rφ_R / r).
  double phi1(double r) const;
  /// (2/(N+2-b)) [(2-b)(2 - ∂_r^2φ_R) + (2N-2+b)(2 - ∂_rφ_R / r)].
  double phi2(double r) const;
  /// d/dr Φ_{2,R}.
  double phi2_derivative(double r) const;

 private:
  /// 2 - ∂_rφ_R / r and 2 - ∂_r^2 φ_R, evaluated without cancellation near r = R.
  std::pair<double, double> deficits(double r) const;

  CutoffProfile profile_;
};

WeightPair weights(const CutoffProfile& profile);

/// 1/(2-b) for N != 2, 1/(2-b/2) for N = 2: the power of Φ_2 that must be
/// Lipschitz in the interpolation step.
double weight_exponent(const ProblemParams& params);

struct PhicondReport {
  double min_value = 0.0;
  double argmin = 0.0;
  Index samples = 0;
  bool pass = false;
};

/// Samples ∂_rφ_R - r ∂_r^2φ_R on (0, 4R]; passes iff the minimum is >= -1e-12.
PhicondReport verify_phicond(const CutoffProfile& profile, Index samples);

/// sup over r ∈ (0, 4R] of R |d/dr Φ_2^{q}(r)|, q = weight_exponent, by central
/// differences kept inside each smooth piece.
double grad_weight_bound(const CutoffProfile& profile, Index samples = 100000);

struct EpsilonReport {
  double epsilon = 0.0;
  /// S = sup_{r>R} Φ_2^{2q} / Φ_1.
  double sup_ratio = 0.0;
  /// r/R where the sup is attained.
  double argsup = 0.0;
  /// max over the check points of c ε Φ_2^{2q} - Φ_1.
  double max_excess = 0.0;
  bool inequality_holds = false;
  /// Largest relative deviation of ε across R ∈ {1, 10, 100}.
  double r_spread = 0.0;
  bool r_independent = false;
};

/// ε = 1/(2 c S) making c ε Φ_2^{2q} - Φ_1 <= 0 for all r > R.
/// Throws UnboundedRatioError when the ratio does not vanish as r -> R+.
EpsilonReport find_epsilon(const CutoffProfile& profile, double c, Index samples = 100000);

/// The pair (Φ_2^{2q}, Φ_1) at r, exposed for the Phivare checks.
std::pair<double, double> phivare_terms(const WeightPair& w, double r);

}  // namespace inls
