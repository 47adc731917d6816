#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "inls/error.hpp"

namespace inls {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Dimension N and inhomogeneity exponent b of i u_t + Δu + |x|^{-b}|u|^{(4-2b)/N} u = 0.
class ProblemParams {
 public:
  /// Throws ConstraintError unless N ∈ {1,2,3} and 0 < b < 2.
  ProblemParams(int dim, double b);

  int dim() const { return dim_; }
  double b() const { return b_; }

  /// (4-2b)/N, the power of |u| multiplying u in the nonlinearity.
  double nonlinear_power() const { return (4.0 - 2.0 * b_) / dim_; }
  /// p = (4-2b)/N + 2, the power appearing in the potential energy.
  double p() const { return nonlinear_power() + 2.0; }
  /// N/(4-2b+2N).
  double energy_coefficient() const { return dim_ / (4.0 - 2.0 * b_ + 2.0 * dim_); }

  friend bool operator==(const ProblemParams&, const ProblemParams&) = default;

 private:
  int dim_;
  double b_;
};

/// Periodic cell-centred box [-L, L)^N with M points per axis.
///
/// Samples sit at x_j = -L + (j + 1/2) h, so with M even no sample coincides
/// with the origin and |x|^{-b} is finite at every grid point. Flat indices are
/// row-major: axis 0 varies slowest.
class Grid {
 public:
  /// Throws ConstraintError unless dim ∈ {1,2,3}, L > 0 and M is a positive even integer.
  Grid(int dim, double half_width, Index points);

  int dim() const { return dim_; }
  double half_width() const { return half_width_; }
  Index points() const { return points_; }
  double spacing() const { return 2.0 * half_width_ / static_cast<double>(points_); }
  double cell_volume() const;
  /// M^N.
  Index size() const { return size_; }

  /// Coordinate of index j along any axis.
  double coordinate(Index j) const {
    return -half_width_ + (static_cast<double>(j) + 0.5) * spacing();
  }
  /// The M axis coordinates.
  Eigen::ArrayXd axis_coordinates() const;
  /// Angular wavenumbers in standard DFT order for period 2L.
  Eigen::ArrayXd axis_frequencies() const;

  std::array<Index, 3> unravel(Index flat) const;
  Index ravel(const std::array<Index, 3>& multi) const;

  /// x_axis at every flat index.
  Eigen::ArrayXd coordinates(int axis) const;
  /// |x| at every flat index.
  Eigen::ArrayXd radii() const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  int dim_;
  double half_width_;
  Index points_;
  Index size_;
};

/// Complex samples of u on a grid, tagged with the problem they belong to.
class Field {
 public:
  Field(ProblemParams params, Grid grid);
  /// Throws ConstraintError if values.size() != grid.size().
  Field(ProblemParams params, Grid grid, Eigen::ArrayXcd values);

  const ProblemParams& params() const { return params_; }
  const Grid& grid() const { return grid_; }
  const Eigen::ArrayXcd& values() const { return values_; }
  Eigen::ArrayXcd& values() { return values_; }

  bool is_finite() const;
  /// Throws NonFiniteError naming `context` if any entry is NaN or Inf.
  void require_finite(const char* context) const;

  /// Copy with different samples on the same grid.
  Field with_values(Eigen::ArrayXcd values) const;

 private:
  ProblemParams params_;
  Grid grid_;
  Eigen::ArrayXcd values_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* context);

enum class InitialKind { gaussian, shifted_gaussian, sum_of_gaussians, from_checkpoint };

std::string to_string(InitialKind kind);
InitialKind initial_kind_from_string(const std::string& name);

struct GaussianBump {
  double amplitude = 1.0;
  double width = 1.0;
  /// Centre; only the first N entries are used.
  std::array<double, 3> center{0.0, 0.0, 0.0};
};

/// Recipe for u0. Gaussians are A exp(-|x-c|^2 / (2 w^2)).
struct InitialData {
  InitialKind kind = InitialKind::gaussian;
  GaussianBump bump;
  /// Second bump, used only by sum_of_gaussians.
  GaussianBump second;
  std::string checkpoint_path;
};

/// Samples the initial data. Emits a warning on std::cerr when the field does
/// not decay below 1e-12 of its peak on the box boundary.
Field realize(const InitialData& init, const ProblemParams& params, const Grid& grid);

/// max |u| over boundary cells divided by max |u| (0 for the zero field).
double boundary_decay(const Field& f);

/// Rectangle rule with weight h^N.
double integrate(const Grid& grid, const Eigen::ArrayXd& integrand);

double l2_norm(const Field& f);
double sup_norm(const Field& f);

}  // namespace inls
