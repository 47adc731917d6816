#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "inls/cutoff.hpp"
#include "inls/spectral.hpp"

namespace inls {

/// interp1: weighted estimate for N != 2 with weight power 1/(2-b).
/// interp2: N = 2 variant with power 1/(2-b/2) and the extra ‖φ^s f‖ term.
/// otn1: one-dimensional weighted sup bound.
/// gn: Gagliardo-Nirenberg applied to φ^{1/p} f.
enum class Inequality { interp1, interp2, otn1, gn };

std::string to_string(Inequality which);
Inequality inequality_from_string(const std::string& name);

enum class WeightKind { cutoff_phi2, gaussian_bump, plateau };

std::string to_string(WeightKind kind);

struct WeightSpec {
  WeightKind kind = WeightKind::cutoff_phi2;
  /// Plateau value or bump peak.
  double height = 1.0;
  double width = 1.0;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  /// cutoff_phi2 only; 0 selects default_k.
  int k = 0;
  double radius = 1.0;
};

/// A nonnegative weight sampled on a grid, with closed-form fractional powers
/// and gradients of those powers.
class GridWeight {
 public:
  GridWeight(const WeightSpec& spec, const ProblemParams& params, const Grid& grid);

  const WeightSpec& spec() const { return spec_; }
  const Eigen::ArrayXd& values() const { return values_; }
  /// φ^s.
  Eigen::ArrayXd power(double s) const;
  /// ∇(φ^s), one array per axis.
  std::vector<Eigen::ArrayXd> power_gradient(double s) const;

 private:
  WeightSpec spec_;
  Grid grid_;
  std::optional<WeightPair> phi2_;
  Eigen::ArrayXd radius_;
  Eigen::ArrayXd values_;
};

struct Sides {
  double lhs = 0.0;
  double rhs = 0.0;
  /// interp2 only: RHS without the ‖φ^s f‖_2 term.
  double rhs_reduced = 0.0;

  /// lhs / rhs, 0 when both vanish.
  double ratio() const;
};

/// Both sides with the implicit constant set to 1.
Sides lhs_rhs(Inequality which, const SpectralPlan& plan, const Field& f, const GridWeight& phi);

struct FamilySpec {
  double width_min = 0.5;
  double width_max = 2.0;
  double shift_max = 2.0;
  double modulation_max = 2.0;
  /// Random trigonometric polynomials use modes |k_j| <= this (units of π/L).
  int bandlimit_modes = 3;
  double bandlimited_fraction = 0.5;
};

struct IneqCase {
  Inequality which = Inequality::interp1;
  ProblemParams params{1, 1.0};
  Grid grid{1, 20.0, 1024};
  WeightSpec weight;
  FamilySpec family;

  std::vector<std::string> violations() const;
};

/// One test function: a modulated Gaussian or a random band-limited polynomial.
struct Member {
  bool bandlimited = false;
  double width = 1.0;
  std::array<double, 3> shift{0.0, 0.0, 0.0};
  std::array<double, 3> modulation{0.0, 0.0, 0.0};
  std::uint64_t seed = 0;

  std::string describe(int dim) const;
};

/// Member i of the family; depends only on (seed, i), so longer runs extend shorter ones.
Member family_member(const IneqCase& c, int index, std::uint64_t seed);
/// exp(-|x-c|^2/(2w^2)) exp(i ξ·x), or the band-limited polynomial.
Field sample_member(const IneqCase& c, const SpectralPlan& plan, const Member& m);

struct HistogramBin {
  double log10_lower = 0.0;
  int count = 0;
};

struct ConstantEstimate {
  /// Empirical stand-in for the implicit constant: max LHS/RHS seen.
  double c_hat = 0.0;
  std::string argmax_descriptor;
  /// LHS/RHS for each family member in order.
  std::vector<double> ratios;
  std::vector<HistogramBin> histogram;
  int evaluations = 0;
};

/// max over `trials` family members of LHS/RHS, plus coordinate-search
/// refinement from every member that raised the running maximum. Deterministic
/// for a given seed and nondecreasing in `trials`.
ConstantEstimate estimate_constant(const IneqCase& c, int trials, std::uint64_t seed);

/// Ratios for the rescalings λ^{N/2} f(λx) of a Gaussian member.
std::vector<double> scaling_ratios(const IneqCase& c, const Member& base, const std::vector<double>& lambdas);

struct PowerGapRow {
  int dim = 1;
  double b = 0.0;
  /// 1/(2-b).
  double interp1_power = 0.0;
  /// 1/(2-b/2); only meaningful for N = 2.
  double interp2_power = 0.0;
  /// 1/((4-2b)/N + 2).
  double interp3_power = 0.0;
  /// interp3_power <= 1/2 < interp1_power.
  bool gap = false;
};

PowerGapRow power_gap_row(const ProblemParams& params);
/// Rows for b ∈ {0.25, 0.5, ..., 1.75} and N ∈ {1, 2, 3}.
std::vector<PowerGapRow> power_gap_demo();

/// Young's inequality X Y <= ε X^p + C(ε) Y^{p'} as used to absorb the
/// weighted nonlinear term: p = 2/(2-b), p' = 2/b and a remainder of order
/// ε^{-(2-b)/b} R^{-2} for N != 2; p = 4/(4-b), p' = 4/b and ε^{-(4-b)/b} R^{-4}
/// for N = 2.
struct YoungSplit {
  double p = 0.0;
  double p_dual = 0.0;
  /// Power of 1/ε in the remainder.
  double eps_exponent = 0.0;
  /// Power of 1/R in the remainder.
  double radius_exponent = 0.0;
  /// Number of norms summed inside the interpolation bracket.
  int bracket_terms = 2;
};

YoungSplit young_split(const ProblemParams& params);
/// C(ε) = (ε p)^{-p'/p} / p'.
double young_remainder_coefficient(const YoungSplit& split, double eps);
/// Constant c in c ε Φ_2^{2q} - Φ_1 <= 0 implied by an interpolation constant ĉ:
/// c = bracket_terms * ĉ^p.
double phivare_constant(double c_hat, const ProblemParams& params);

}  // namespace inls
