#include "inls/inequalities.hpp"

#include "inls/observables.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

namespace inls {

std::string to_string(Inequality which) {
  switch (which) {
    case Inequality::interp1: return "interp1";
    case Inequality::interp2: return "interp2";
    case Inequality::otn1: return "otn1";
    case Inequality::gn: return "gn";
  }
  return "unknown";
}

Inequality inequality_from_string(const std::string& name) {
  for (auto w : {Inequality::interp1, Inequality::interp2, Inequality::otn1, Inequality::gn}) {
    if (to_string(w) == name) return w;
  }
  throw ConstraintError("unknown inequality '" + name + "' (expected interp1|interp2|otn1|gn)");
}

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::cutoff_phi2: return "cutoff_phi2";
    case WeightKind::gaussian_bump: return "gaussian_bump";
    case WeightKind::plateau: return "plateau";
  }
  return "unknown";
}

GridWeight::GridWeight(const WeightSpec& spec, const ProblemParams& params, const Grid& grid)
    : spec_(spec), grid_(grid), radius_(grid.radii()) {
  if (params.dim() != grid.dim()) throw GridMismatch("weight dimension differs from grid");
  switch (spec.kind) {
    case WeightKind::cutoff_phi2: {
      const int k = spec.k > 0 ? spec.k : default_k(params);
      phi2_.emplace(build_cutoff(k, spec.radius, params));
      values_ = lift_radial(radius_, [&](double r) { return phi2_->phi2(r); });
      break;
    }
    case WeightKind::gaussian_bump:
    case WeightKind::plateau:
      if (!(spec.height >= 0.0)) throw ConstraintError("weight height must be nonnegative");
      if (spec.kind == WeightKind::gaussian_bump && !(spec.width > 0.0)) {
        throw ConstraintError("gaussian weight width must be positive");
      }
      values_ = power(1.0);
      break;
  }
  if ((values_ < 0.0).any()) throw ConstraintError("weight takes negative values");
}

Eigen::ArrayXd GridWeight::power(double s) const {
  switch (spec_.kind) {
    case WeightKind::cutoff_phi2:
      return values_.pow(s);
    case WeightKind::plateau:
      return Eigen::ArrayXd::Constant(grid_.size(), std::pow(spec_.height, s));
    case WeightKind::gaussian_bump: {
      Eigen::ArrayXd dist2 = Eigen::ArrayXd::Zero(grid_.size());
      for (int d = 0; d < grid_.dim(); ++d) dist2 += (grid_.coordinates(d) - spec_.center[d]).square();
      return std::pow(spec_.height, s) * (-s * dist2 / (2.0 * spec_.width * spec_.width)).exp();
    }
  }
  return {};
}

std::vector<Eigen::ArrayXd> GridWeight::power_gradient(double s) const {
  std::vector<Eigen::ArrayXd> out;
  switch (spec_.kind) {
    case WeightKind::plateau:
      out.assign(grid_.dim(), Eigen::ArrayXd::Zero(grid_.size()));
      break;
    case WeightKind::gaussian_bump: {
      const Eigen::ArrayXd base = power(s);
      for (int d = 0; d < grid_.dim(); ++d) {
        out.push_back(-s * (grid_.coordinates(d) - spec_.center[d]) / (spec_.width * spec_.width) * base);
      }
      break;
    }
    case WeightKind::cutoff_phi2: {
      // d/dr Φ_2^s = s Φ_2^{s-1} Φ_2'; zero where Φ_2 vanishes (r <= R).
      const Eigen::ArrayXd radial = lift_radial(radius_, [&](double r) {
        const double value = phi2_->phi2(r);
        return value > 0.0 ? s * std::pow(value, s - 1.0) * phi2_->phi2_derivative(r) : 0.0;
      });
      for (int d = 0; d < grid_.dim(); ++d) out.push_back(radial * grid_.coordinates(d) / radius_);
      break;
    }
  }
  return out;
}

double Sides::ratio() const {
  if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return lhs / rhs;
}

namespace {

double norm2(const Grid& g, const Eigen::ArrayXd& density) { return std::sqrt(integrate(g, density)); }

void require_case(Inequality which, const ProblemParams& params) {
  const int n = params.dim();
  if (which == Inequality::interp1 && n == 2) throw ConstraintError("interp1 applies to N != 2; use interp2");
  if (which == Inequality::interp2 && n != 2) throw ConstraintError("interp2 requires N = 2");
  if (which == Inequality::otn1 && n != 1) throw ConstraintError("otn1 requires N = 1");
  if (which == Inequality::gn && n >= 3) {
    const double sigma = (2.0 - params.b()) / n;
    if (!(sigma < 2.0 / (n - 2.0))) throw ConstraintError("gn requires 0 < σ < 2/(N-2)");
  }
}

}  // namespace

Sides lhs_rhs(Inequality which, const SpectralPlan& plan, const Field& f, const GridWeight& phi) {
  const ProblemParams& params = f.params();
  require_case(which, params);
  require_same_grid(plan.grid(), f.grid(), "lhs_rhs");
  f.require_finite("lhs_rhs");
  const Grid& g = f.grid();
  const int n = params.dim();
  const double b = params.b();
  const double p = params.p();

  const Eigen::ArrayXd density = f.values().abs2();
  const std::vector<Field> grad = gradient(plan, f);
  Eigen::ArrayXd grad_sq = Eigen::ArrayXd::Zero(g.size());
  for (const Field& c : grad) grad_sq += c.values().abs2();
  const double mass_norm = norm2(g, density);

  // ‖∇(φ^s) f‖_2 and ‖φ^s ∇f‖_2.
  auto weighted_norms = [&](double s) {
    const auto dpow = phi.power_gradient(s);
    Eigen::ArrayXd dsq = Eigen::ArrayXd::Zero(g.size());
    for (const auto& d : dpow) dsq += d.square();
    return std::make_pair(norm2(g, dsq * density), norm2(g, phi.power(2.0 * s) * grad_sq));
  };

  Sides out;
  switch (which) {
    case Inequality::interp1: {
      const auto [a, c] = weighted_norms(1.0 / (2.0 - b));
      out.lhs = integrate(g, phi.values() * density.pow(0.5 * p));
      out.rhs = std::pow(a + c, 2.0 - b) * std::pow(mass_norm, (4.0 + b * (n - 2.0)) / n);
      break;
    }
    case Inequality::interp2: {
      const double s = 1.0 / (2.0 - 0.5 * b);
      const auto [a, c] = weighted_norms(s);
      const double plain = norm2(g, phi.power(2.0 * s) * density);
      out.lhs = integrate(g, phi.values() * density.pow(0.5 * (4.0 - b)));
      out.rhs = std::pow(plain + a + c, 2.0 - 0.5 * b) * std::pow(mass_norm, 2.0 - 0.5 * b);
      out.rhs_reduced = std::pow(a + c, 2.0 - 0.5 * b) * std::pow(mass_norm, 2.0 - 0.5 * b);
      break;
    }
    case Inequality::otn1: {
      const auto [a, c] = weighted_norms(1.0 / (2.0 - b));
      out.lhs = (phi.power(1.0 / (4.0 - 2.0 * b)) * density.sqrt()).maxCoeff();
      out.rhs = std::sqrt(mass_norm) * std::sqrt(a + c);
      break;
    }
    case Inequality::gn: {
      // ∇(φ^{1/p} f) by the product rule with the closed-form weight gradient.
      const double s = 1.0 / p;
      const Eigen::ArrayXd ws = phi.power(s);
      const auto dws = phi.power_gradient(s);
      Eigen::ArrayXd lifted_grad_sq = Eigen::ArrayXd::Zero(g.size());
      for (int d = 0; d < n; ++d) {
        lifted_grad_sq += (dws[d].cast<Complex>() * f.values() + ws.cast<Complex>() * grad[d].values()).abs2();
      }
      out.lhs = integrate(g, phi.values() * density.pow(0.5 * p));
      out.rhs = std::pow(norm2(g, lifted_grad_sq), 2.0 - b) *
                std::pow(norm2(g, ws.square() * density), (4.0 + b * (n - 2.0)) / n);
      break;
    }
  }
  return out;
}

std::vector<std::string> IneqCase::violations() const {
  std::vector<std::string> out;
  try {
    require_case(which, params);
  } catch (const ConstraintError& e) {
    out.emplace_back(e.what());
  }
  if (params.dim() != grid.dim()) out.emplace_back("case grid dimension differs from N");
  if (!(family.width_min > 0.0 && family.width_min <= family.width_max)) {
    out.emplace_back("family widths must satisfy 0 < width_min <= width_max");
  }
  if (family.bandlimit_modes < 0) out.emplace_back("family.bandlimit_modes must be nonnegative");
  return out;
}

std::string Member::describe(int dim) const {
  std::ostringstream os;
  os.precision(6);
  if (bandlimited) {
    os << "bandlimited(seed=" << seed << ")";
    return os.str();
  }
  os << "gaussian(width=" << width << ", shift=[";
  for (int d = 0; d < dim; ++d) os << (d ? "," : "") << shift[d];
  os << "], modulation=[";
  for (int d = 0; d < dim; ++d) os << (d ? "," : "") << modulation[d];
  os << "])";
  return os.str();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Uniform [0,1) from the top 53 bits; independent of the standard library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Member family_member(const IneqCase& c, int index, std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index))));
  Member m;
  m.seed = rng();
  m.bandlimited = unit(rng) < c.family.bandlimited_fraction;
  m.width = c.family.width_min + (c.family.width_max - c.family.width_min) * unit(rng);
  for (int d = 0; d < c.params.dim(); ++d) {
    m.shift[d] = c.family.shift_max * (2.0 * unit(rng) - 1.0);
    m.modulation[d] = c.family.modulation_max * (2.0 * unit(rng) - 1.0);
  }
  return m;
}

Field sample_member(const IneqCase& c, const SpectralPlan& plan, const Member& m) {
  const Grid& g = c.grid;
  if (!m.bandlimited) {
    Eigen::ArrayXd dist2 = Eigen::ArrayXd::Zero(g.size());
    Eigen::ArrayXd phase = Eigen::ArrayXd::Zero(g.size());
    for (int d = 0; d < g.dim(); ++d) {
      const Eigen::ArrayXd x = g.coordinates(d);
      dist2 += (x - m.shift[d]).square();
      phase += m.modulation[d] * x;
    }
    const Eigen::ArrayXd envelope = (-dist2 / (2.0 * m.width * m.width)).exp();
    Eigen::ArrayXcd values(g.size());
    for (Index i = 0; i < g.size(); ++i) values(i) = envelope(i) * Complex(std::cos(phase(i)), std::sin(phase(i)));
    return Field(c.params, g, std::move(values));
  }

  // Σ a_k exp(iπ k·x / L) over |k_j| <= K, assembled on the DFT side. At the
  // cell centres exp(iπ k x_j / L) = exp(iπ k (1/M - 1)) exp(2πi k j / M).
  std::mt19937_64 rng(m.seed);
  const int modes = c.family.bandlimit_modes;
  const Index points = g.points();
  Eigen::ArrayXcd spectrum = Eigen::ArrayXcd::Zero(g.size());
  std::array<int, 3> k{-modes, -modes, -modes};
  for (int d = g.dim(); d < 3; ++d) k[d] = 0;
  for (;;) {
    const Complex a(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
    std::array<Index, 3> idx{0, 0, 0};
    double shift = 0.0;
    for (int d = 0; d < g.dim(); ++d) {
      idx[d] = (k[d] % points + points) % points;
      shift += M_PI * k[d] * (1.0 / static_cast<double>(points) - 1.0);
    }
    spectrum(g.ravel(idx)) += a * Complex(std::cos(shift), std::sin(shift));
    int d = g.dim() - 1;
    while (d >= 0 && k[d] == modes) k[d--] = -modes;
    if (d < 0) break;
    ++k[d];
  }
  plan.inverse(spectrum);
  spectrum *= static_cast<double>(g.size());
  return Field(c.params, g, std::move(spectrum));
}

namespace {

class RatioEvaluator {
 public:
  RatioEvaluator(const IneqCase& c) : case_(c), plan_(c.grid), weight_(c.weight, c.params, c.grid) {}

  double operator()(const Member& m) {
    ++evaluations;
    return lhs_rhs(case_.which, plan_, sample_member(case_, plan_, m), weight_).ratio();
  }

  const SpectralPlan& plan() const { return plan_; }
  const GridWeight& weight() const { return weight_; }

  int evaluations = 0;

 private:
  const IneqCase& case_;
  SpectralPlan plan_;
  GridWeight weight_;
};

/// Coordinate search over (width, shift, modulation) within the family ranges.
std::pair<double, Member> refine(const IneqCase& c, RatioEvaluator& eval, Member best, double best_ratio) {
  const int n = c.params.dim();
  const FamilySpec& fam = c.family;
  std::vector<double*> coords{&best.width};
  std::vector<std::pair<double, double>> bounds{{fam.width_min, fam.width_max}};
  std::vector<double> steps{0.25 * (fam.width_max - fam.width_min) + 1e-3};
  for (int d = 0; d < n; ++d) {
    coords.push_back(&best.shift[d]);
    bounds.emplace_back(-fam.shift_max, fam.shift_max);
    steps.push_back(0.25 * fam.shift_max + 1e-3);
    coords.push_back(&best.modulation[d]);
    bounds.emplace_back(-fam.modulation_max, fam.modulation_max);
    steps.push_back(0.25 * fam.modulation_max + 1e-3);
  }
  for (int halvings = 0; halvings < 5;) {
    bool improved = false;
    for (std::size_t j = 0; j < coords.size(); ++j) {
      for (double sign : {1.0, -1.0}) {
        const double old = *coords[j];
        const double trial = std::clamp(old + sign * steps[j], bounds[j].first, bounds[j].second);
        if (trial == old) continue;
        *coords[j] = trial;
        const double r = eval(best);
        if (r > best_ratio) {
          best_ratio = r;
          improved = true;
          break;
        }
        *coords[j] = old;
      }
    }
    if (!improved) {
      for (double& s : steps) s *= 0.5;
      ++halvings;
    }
  }
  return {best_ratio, best};
}

}  // namespace

ConstantEstimate estimate_constant(const IneqCase& c, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConstraintError("estimate_constant needs trials >= 1");
  const auto v = c.violations();
  if (!v.empty()) throw ConstraintError(v.front());

  RatioEvaluator eval(c);
  ConstantEstimate out;
  double running = -1.0;
  for (int i = 0; i < trials; ++i) {
    const Member m = family_member(c, i, seed);
    const double r = eval(m);
    out.ratios.push_back(r);
    if (!(r > running)) continue;
    running = r;
    if (r > out.c_hat) {
      out.c_hat = r;
      out.argmax_descriptor = m.describe(c.params.dim());
    }
    if (!m.bandlimited) {
      const auto [refined, where] = refine(c, eval, m, r);
      if (refined > out.c_hat) {
        out.c_hat = refined;
        out.argmax_descriptor = where.describe(c.params.dim()) + " [refined]";
      }
    }
  }
  if (!(out.c_hat > 0.0)) throw ConstraintError("degenerate family: every right-hand side vanished");

  std::map<int, int> bins;
  for (double r : out.ratios) {
    if (r > 0.0) ++bins[static_cast<int>(std::floor(4.0 * std::log10(r)))];
  }
  for (const auto& [bin, count] : bins) out.histogram.push_back({bin / 4.0, count});
  out.evaluations = eval.evaluations;
  return out;
}

std::vector<double> scaling_ratios(const IneqCase& c, const Member& base, const std::vector<double>& lambdas) {
  if (base.bandlimited) throw ConstraintError("scaling_ratios needs a Gaussian member");
  RatioEvaluator eval(c);
  std::vector<double> out;
  const int n = c.params.dim();
  for (double lambda : lambdas) {
    Member m = base;
    m.width = base.width / lambda;
    for (int d = 0; d < n; ++d) {
      m.shift[d] = base.shift[d] / lambda;
      m.modulation[d] = base.modulation[d] * lambda;
    }
    Field f = sample_member(c, eval.plan(), m);
    f.values() *= std::pow(lambda, 0.5 * n);
    out.push_back(lhs_rhs(c.which, eval.plan(), f, eval.weight()).ratio());
  }
  return out;
}

PowerGapRow power_gap_row(const ProblemParams& params) {
  PowerGapRow row;
  row.dim = params.dim();
  row.b = params.b();
  row.interp1_power = 1.0 / (2.0 - params.b());
  row.interp2_power = 1.0 / (2.0 - 0.5 * params.b());
  row.interp3_power = 1.0 / params.p();
  row.gap = row.interp3_power <= 0.5 && 0.5 < row.interp1_power;
  return row;
}

std::vector<PowerGapRow> power_gap_demo() {
  std::vector<PowerGapRow> rows;
  for (int n = 1; n <= 3; ++n) {
    for (int i = 1; i <= 7; ++i) rows.push_back(power_gap_row(ProblemParams(n, 0.25 * i)));
  }
  return rows;
}

YoungSplit young_split(const ProblemParams& params) {
  const double b = params.b();
  YoungSplit s;
  if (params.dim() == 2) {
    s.p = 4.0 / (4.0 - b);
    s.p_dual = 4.0 / b;
    s.eps_exponent = (4.0 - b) / b;
    s.radius_exponent = 4.0;
    s.bracket_terms = 3;
  } else {
    s.p = 2.0 / (2.0 - b);
    s.p_dual = 2.0 / b;
    s.eps_exponent = (2.0 - b) / b;
    s.radius_exponent = 2.0;
    s.bracket_terms = 2;
  }
  return s;
}

double young_remainder_coefficient(const YoungSplit& split, double eps) {
  return std::pow(eps * split.p, -split.p_dual / split.p) / split.p_dual;
}

double phivare_constant(double c_hat, const ProblemParams& params) {
  if (!(c_hat > 0.0)) throw ConstraintError("interpolation constant must be positive");
  const YoungSplit s = young_split(params);
  return s.bracket_terms * std::pow(c_hat, s.p);
}

}  // namespace inls
