#include "inls/core.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include "inls/checkpoint.hpp"

namespace inls {

ProblemParams::ProblemParams(int dim, double b) : dim_(dim), b_(b) {
  if (dim < 1 || dim > 3) {
    throw ConstraintError("dimension N must be 1, 2 or 3, got " + std::to_string(dim));
  }
  if (!(b > 0.0 && b < 2.0)) {
    std::ostringstream msg;
    msg << "b must lie in the open interval (0,2), got " << b;
    throw ConstraintError(msg.str());
  }
}

Grid::Grid(int dim, double half_width, Index points)
    : dim_(dim), half_width_(half_width), points_(points), size_(1) {
  if (dim < 1 || dim > 3) {
    throw ConstraintError("grid dimension must be 1, 2 or 3");
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConstraintError("grid half width L must be positive and finite");
  }
  if (points < 2 || points % 2 != 0) {
    throw ConstraintError("points per axis M must be a positive even integer");
  }
  for (int d = 0; d < dim; ++d) size_ *= points;
}

double Grid::cell_volume() const { return std::pow(spacing(), dim_); }

Eigen::ArrayXd Grid::axis_coordinates() const {
  Eigen::ArrayXd x(points_);
  for (Index j = 0; j < points_; ++j) x(j) = coordinate(j);
  return x;
}

Eigen::ArrayXd Grid::axis_frequencies() const {
  Eigen::ArrayXd xi(points_);
  const double base = M_PI / half_width_;
  for (Index j = 0; j < points_; ++j) {
    const Index k = j < points_ / 2 ? j : j - points_;
    xi(j) = base * static_cast<double>(k);
  }
  return xi;
}

std::array<Index, 3> Grid::unravel(Index flat) const {
  std::array<Index, 3> multi{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    multi[d] = flat % points_;
    flat /= points_;
  }
  return multi;
}

Index Grid::ravel(const std::array<Index, 3>& multi) const {
  Index flat = 0;
  for (int d = 0; d < dim_; ++d) flat = flat * points_ + multi[d];
  return flat;
}

Eigen::ArrayXd Grid::coordinates(int axis) const {
  // stride of `axis` in the row-major layout
  Index stride = 1;
  for (int d = dim_ - 1; d > axis; --d) stride *= points_;
  Eigen::ArrayXd out(size_);
  for (Index i = 0; i < size_; ++i) out(i) = coordinate((i / stride) % points_);
  return out;
}

Eigen::ArrayXd Grid::radii() const {
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(size_);
  for (int d = 0; d < dim_; ++d) r2 += coordinates(d).square();
  return r2.sqrt();
}

Field::Field(ProblemParams params, Grid grid)
    : params_(params), grid_(grid), values_(Eigen::ArrayXcd::Zero(grid.size())) {
  if (params.dim() != grid.dim()) throw GridMismatch("field and grid dimensions differ");
}

Field::Field(ProblemParams params, Grid grid, Eigen::ArrayXcd values)
    : params_(params), grid_(grid), values_(std::move(values)) {
  if (params.dim() != grid.dim()) throw GridMismatch("field and grid dimensions differ");
  if (values_.size() != grid_.size()) {
    throw ConstraintError("field has " + std::to_string(values_.size()) + " samples, grid needs " +
                          std::to_string(grid_.size()));
  }
}

bool Field::is_finite() const { return values_.isFinite().all(); }

void Field::require_finite(const char* context) const {
  if (!is_finite()) throw NonFiniteError(std::string("non-finite field samples in ") + context);
}

Field Field::with_values(Eigen::ArrayXcd values) const {
  return Field(params_, grid_, std::move(values));
}

void require_same_grid(const Grid& a, const Grid& b, const char* context) {
  if (!(a == b)) throw GridMismatch(std::string("grid mismatch in ") + context);
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::gaussian: return "gaussian";
    case InitialKind::shifted_gaussian: return "shifted_gaussian";
    case InitialKind::sum_of_gaussians: return "sum_of_gaussians";
    case InitialKind::from_checkpoint: return "from_checkpoint";
  }
  return "unknown";
}

InitialKind initial_kind_from_string(const std::string& name) {
  for (auto kind : {InitialKind::gaussian, InitialKind::shifted_gaussian,
                    InitialKind::sum_of_gaussians, InitialKind::from_checkpoint}) {
    if (to_string(kind) == name) return kind;
  }
  throw ConstraintError("unknown initial data kind '" + name + "'");
}

namespace {

void add_bump(const GaussianBump& bump, const Grid& grid, Eigen::ArrayXd& out) {
  if (!std::isfinite(bump.amplitude)) throw ConstraintError("amplitude must be finite");
  if (!(bump.width > 0.0)) throw ConstraintError("gaussian width must be positive");
  Eigen::ArrayXd dist2 = Eigen::ArrayXd::Zero(grid.size());
  for (int d = 0; d < grid.dim(); ++d) dist2 += (grid.coordinates(d) - bump.center[d]).square();
  out += bump.amplitude * (-dist2 / (2.0 * bump.width * bump.width)).exp();
}

}  // namespace

Field realize(const InitialData& init, const ProblemParams& params, const Grid& grid) {
  if (params.dim() != grid.dim()) throw GridMismatch("initial data dimension differs from grid");

  if (init.kind == InitialKind::from_checkpoint) {
    Checkpoint cp = read_checkpoint(init.checkpoint_path);
    if (!(cp.field.grid() == grid) || !(cp.field.params() == params)) {
      throw IoError("checkpoint '" + init.checkpoint_path +
                    "' metadata does not match the requested problem and grid");
    }
    return std::move(cp.field);
  }

  Eigen::ArrayXd samples = Eigen::ArrayXd::Zero(grid.size());
  add_bump(init.bump, grid, samples);
  if (init.kind == InitialKind::sum_of_gaussians) add_bump(init.second, grid, samples);

  Field f(params, grid, samples.cast<Complex>());
  const double decay = boundary_decay(f);
  if (decay > 1e-12) {
    std::cerr << "warning: initial data reaches " << decay
              << " of its peak on the box boundary (limit 1e-12); enlarge L\n";
  }
  return f;
}

double boundary_decay(const Field& f) {
  const Grid& g = f.grid();
  const Eigen::ArrayXd mod = f.values().abs();
  const double peak = mod.maxCoeff();
  if (peak == 0.0) return 0.0;
  double edge = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const auto multi = g.unravel(i);
    for (int d = 0; d < g.dim(); ++d) {
      if (multi[d] == 0 || multi[d] == g.points() - 1) {
        edge = std::max(edge, mod(i));
        break;
      }
    }
  }
  return edge / peak;
}

double integrate(const Grid& grid, const Eigen::ArrayXd& integrand) {
  if (integrand.size() != grid.size()) throw GridMismatch("integrand size differs from grid");
  return integrand.sum() * grid.cell_volume();
}

double l2_norm(const Field& f) {
  f.require_finite("l2_norm");
  return std::sqrt(integrate(f.grid(), f.values().abs2()));
}

double sup_norm(const Field& f) {
  f.require_finite("sup_norm");
  return f.values().size() == 0 ? 0.0 : f.values().abs().maxCoeff();
}

}  // namespace inls
