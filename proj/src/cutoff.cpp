#include "inls/cutoff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace inls {

namespace {

/// k (k-1) ... (k-m+1).
double falling(int k, int m) {
  double out = 1.0;
  for (int i = 0; i < m; ++i) out *= static_cast<double>(k - i);
  return out;
}

double falling(double i, int m) {
  double out = 1.0;
  for (int j = 0; j < m; ++j) out *= i - j;
  return out;
}

/// Jet (v, v', v'', v''') of 2s - 2(s-1)^k at s.
std::array<double, 4> analytic_jet(int k, double s) {
  std::array<double, 4> jet{};
  const double a = s - 1.0;
  jet[0] = 2.0 * s - 2.0 * std::pow(a, k);
  jet[1] = 2.0 - 2.0 * k * std::pow(a, k - 1);
  for (int n = 2; n <= 3; ++n) {
    const double f = falling(k, n);
    jet[n] = f == 0.0 ? 0.0 : -2.0 * f * std::pow(a, k - n);
  }
  return jet;
}

bool strictly_decreasing(const std::vector<PolyPiece>& pieces, double left, double right, int samples) {
  for (int i = 0; i < samples; ++i) {
    const double s = left + (right - left) * (i + 1.0) / (samples + 1.0);
    const auto piece = std::find_if(pieces.begin(), pieces.end(),
                                    [s](const PolyPiece& p) { return s <= p.right; });
    if (piece == pieces.end() || !(piece->derivative(s, 1) < 0.0)) return false;
  }
  return true;
}

}  // namespace

double PolyPiece::derivative(double s, int order) const {
  const double width = right - left;
  const double t = (s - left) / width;
  double acc = 0.0;
  for (int i = 7; i >= order; --i) acc = acc * t + coeffs[i] * falling(static_cast<double>(i), order);
  return acc / std::pow(width, order);
}

double PolyPiece::integral_to(double s) const {
  const double width = right - left;
  const double t = (s - left) / width;
  double acc = 0.0;
  for (int i = 7; i >= 0; --i) acc = acc * t + coeffs[i] / (i + 1.0);
  return acc * t * width;
}

PolyPiece hermite7(double left, double right, const std::array<double, 4>& left_jet,
                   const std::array<double, 4>& right_jet) {
  PolyPiece piece;
  piece.left = left;
  piece.right = right;
  const double width = right - left;
  auto& c = piece.coeffs;
  c[0] = left_jet[0];
  c[1] = left_jet[1] * width;
  c[2] = left_jet[2] * width * width / 2.0;
  c[3] = left_jet[3] * width * width * width / 6.0;

  // Row n: d^n/dt^n of t^i at t = 1 for i = 4..7.
  Eigen::Matrix4d a;
  Eigen::Vector4d rhs;
  for (int n = 0; n < 4; ++n) {
    double known = 0.0;
    for (int i = n; i < 4; ++i) known += c[i] * falling(static_cast<double>(i), n);
    for (int i = 4; i < 8; ++i) a(n, i - 4) = falling(static_cast<double>(i), n);
    rhs(n) = right_jet[n] * std::pow(width, n) - known;
  }
  const Eigen::Vector4d high = a.fullPivLu().solve(rhs);
  for (int i = 0; i < 4; ++i) c[4 + i] = high(i);
  return piece;
}

CutoffProfile::CutoffProfile(int k, double radius, ProblemParams params)
    : k_(k),
      radius_(radius),
      r_star_(1.0 + std::pow(1.0 / k, 1.0 / (k - 1.0))),
      params_(params) {}

double CutoffProfile::v(double s, int order) const {
  if (s <= 1.0) {
    if (order == 0) return 2.0 * s;
    return order == 1 ? 2.0 : 0.0;
  }
  if (s <= r_star_) return analytic_jet(k_, s)[order];
  if (s < 2.0) {
    for (const PolyPiece& p : bridge_) {
      if (s <= p.right) return p.derivative(s, order);
    }
  }
  return 0.0;
}

double CutoffProfile::phi(double s) const {
  if (s <= 1.0) return s * s;
  if (s <= r_star_) return s * s - 2.0 * std::pow(s - 1.0, k_ + 1) / (k_ + 1.0);
  if (s >= 2.0) return phi_at_two_;
  double acc = phi_at_r_star_;
  for (const PolyPiece& p : bridge_) {
    if (s <= p.right) return acc + p.integral_to(s);
    acc += p.integral_to(p.right);
  }
  return phi_at_two_;
}

double CutoffProfile::laplacian(double r) const {
  const int n = params_.dim();
  return d2phi_R(r) + (n - 1) * dphi_R(r) / r;
}

double CutoffProfile::bilaplacian(double r) const {
  const double s = r / radius_;
  // φ_R = r^2 on the inner region and constant outside: Δ^2 vanishes exactly.
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const int n = params_.dim();
  const double psi = dphi_R(r);
  const double psi1 = d2phi_R(r);
  const double psi2 = d3phi_R(r);
  const double psi3 = d4phi_R(r);
  return psi3 + 2.0 * (n - 1) * psi2 / r + (n - 1.0) * (n - 3.0) * (psi1 / (r * r) - psi / (r * r * r));
}

std::vector<double> CutoffProfile::breakpoints() const {
  std::vector<double> out{1.0, r_star_};
  for (std::size_t i = 0; i + 1 < bridge_.size(); ++i) out.push_back(bridge_[i].right);
  out.push_back(2.0);
  return out;
}

int default_k(const ProblemParams& params) {
  const double b = params.b();
  double bound = std::max(std::ceil(3.0 - b), std::ceil(2.0 / b));
  if (params.dim() == 2) bound = std::max(bound, std::ceil(4.0 / b));
  return static_cast<int>(bound) + 1;
}

std::vector<std::string> k_violations(int k, const ProblemParams& params) {
  std::vector<std::string> out;
  const double b = params.b();
  auto require = [&](double bound, const char* label) {
    if (!(k > bound)) {
      std::ostringstream msg;
      msg << "k must exceed " << label << "=" << bound << " (got k=" << k << ")";
      out.push_back(msg.str());
    }
  };
  require(3.0 - b, "3-b");
  if (params.dim() == 2) {
    require(4.0 / b, "4/b");
  } else {
    require(2.0 / b, "2/b");
  }
  return out;
}

CutoffProfile build_cutoff_unchecked(int k, double radius, const ProblemParams& params,
                                     const BridgeOptions& options) {
  if (k < 2) throw ConstraintError("cutoff exponent k must be an integer >= 2");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConstraintError("cutoff radius R must be positive");

  CutoffProfile profile(k, radius, params);
  const double left = profile.r_star_;
  const std::array<double, 4> start = analytic_jet(k, left);
  const std::array<double, 4> zero{0.0, 0.0, 0.0, 0.0};

  if (!options.force_split) {
    profile.bridge_ = {hermite7(left, 2.0, start, zero)};
  }
  if (options.force_split ||
      !strictly_decreasing(profile.bridge_, left, 2.0, options.monotonicity_samples)) {
    // Retry with a knot at the midpoint carrying the jet of the C^3
    // smoothstep 1 - (35t^4 - 84t^5 + 70t^6 - 20t^7) scaled to the drop.
    const double width = 2.0 - left;
    const double mid = 0.5 * (left + 2.0);
    const double drop = start[0];
    const std::array<double, 4> knot{0.5 * drop, -2.1875 * drop / width, 0.0,
                                      52.5 * drop / (width * width * width)};
    profile.bridge_ = {hermite7(left, mid, start, knot), hermite7(mid, 2.0, knot, zero)};
    if (!strictly_decreasing(profile.bridge_, left, 2.0, options.monotonicity_samples)) {
      throw ConstraintError("bridge monotonicity verification failed for k=" + std::to_string(k));
    }
  }

  profile.phi_at_r_star_ = left * left - 2.0 * std::pow(left - 1.0, k + 1) / (k + 1.0);
  double acc = profile.phi_at_r_star_;
  for (const PolyPiece& p : profile.bridge_) acc += p.integral_to(p.right);
  profile.phi_at_two_ = acc;
  return profile;
}

CutoffProfile build_cutoff(int k, double radius, const ProblemParams& params,
                           const BridgeOptions& options) {
  const auto violations = k_violations(k, params);
  if (!violations.empty()) {
    std::string msg = violations.front();
    for (std::size_t i = 1; i < violations.size(); ++i) msg += "; " + violations[i];
    throw ConstraintError(msg);
  }
  return build_cutoff_unchecked(k, radius, params, options);
}

std::pair<double, double> WeightPair::deficits(double r) const {
  const double s = r / profile_.radius();
  if (s <= 1.0) return {0.0, 0.0};
  if (s >= 2.0) return {2.0, 2.0};
  const int k = profile_.k();
  if (s <= profile_.r_star()) {
    const double a = s - 1.0;
    return {2.0 * std::pow(a, k) / s, 2.0 * k * std::pow(a, k - 1)};
  }
  return {2.0 - profile_.v(s) / s, 2.0 - profile_.v(s, 1)};
}

double WeightPair::phi1(double r) const { return 4.0 * deficits(r).first; }

double WeightPair::phi2(double r) const {
  const int n = profile_.params().dim();
  const double b = profile_.params().b();
  const auto [d1, d2] = deficits(r);
  return 2.0 / (n + 2.0 - b) * ((2.0 - b) * d2 + (2.0 * n - 2.0 + b) * d1);
}

double WeightPair::phi2_derivative(double r) const {
  const double radius = profile_.radius();
  const double s = r / radius;
  if (s <= 1.0 || s >= 2.0) return 0.0;
  const int n = profile_.params().dim();
  const double b = profile_.params().b();
  const int k = profile_.k();
  double dd1 = 0.0;
  double dd2 = 0.0;
  if (s <= profile_.r_star()) {
    const double a = s - 1.0;
    dd1 = (2.0 * k * std::pow(a, k - 1) / s - 2.0 * std::pow(a, k) / (s * s)) / radius;
    dd2 = k >= 2 ? 2.0 * k * (k - 1.0) * std::pow(a, k - 2) / radius : 0.0;
  } else {
    dd1 = (profile_.v(s) / s - profile_.v(s, 1)) / r;
    dd2 = -profile_.v(s, 2) / radius;
  }
  return 2.0 / (n + 2.0 - b) * ((2.0 - b) * dd2 + (2.0 * n - 2.0 + b) * dd1);
}

WeightPair weights(const CutoffProfile& profile) { return WeightPair(profile); }

double weight_exponent(const ProblemParams& params) {
  const double b = params.b();
  return params.dim() == 2 ? 1.0 / (2.0 - 0.5 * b) : 1.0 / (2.0 - b);
}

std::pair<double, double> phivare_terms(const WeightPair& w, double r) {
  const double q = weight_exponent(w.profile().params());
  return {std::pow(w.phi2(r), 2.0 * q), w.phi1(r)};
}

PhicondReport verify_phicond(const CutoffProfile& profile, Index samples) {
  if (samples < 1) throw ConstraintError("verify_phicond needs at least one sample");
  PhicondReport report;
  report.samples = samples;
  report.min_value = std::numeric_limits<double>::infinity();
  const double span = 4.0 * profile.radius();
  for (Index i = 0; i < samples; ++i) {
    const double r = span * (i + 1.0) / static_cast<double>(samples);
    const double value = profile.dphi_R(r) - r * profile.d2phi_R(r);
    if (value < report.min_value) {
      report.min_value = value;
      report.argmin = r;
    }
  }
  report.pass = report.min_value >= -1e-12;
  return report;
}

double grad_weight_bound(const CutoffProfile& profile, Index samples) {
  const WeightPair w(profile);
  const double q = weight_exponent(profile.params());
  const double radius = profile.radius();
  const std::vector<double> knots = profile.breakpoints();
  auto powered = [&](double r) { return std::pow(w.phi2(r), q); };

  double sup = 0.0;
  for (Index i = 0; i < samples; ++i) {
    const double s = 4.0 * (i + 0.5) / static_cast<double>(samples);
    double gap = std::numeric_limits<double>::infinity();
    for (double knot : knots) gap = std::min(gap, std::abs(s - knot));
    if (gap < 1e-12) continue;
    const double step = std::min(1e-5, 0.5 * gap);
    const double r = s * radius;
    const double h = step * radius;
    const double slope = (powered(r + h) - powered(r - h)) / (2.0 * h);
    sup = std::max(sup, radius * std::abs(slope));
  }
  return sup;
}

namespace {

struct RatioScan {
  double sup = 0.0;
  double argsup = 0.0;
};

double phivare_ratio(const WeightPair& w, double r) {
  const auto [lifted, phi1] = phivare_terms(w, r);
  if (phi1 == 0.0) {
    if (lifted > 0.0) throw ConstraintError("Φ_1 vanishes where Φ_2 does not; cutoff construction is broken");
    return 0.0;
  }
  return lifted / phi1;
}

void check_edge_behaviour(const WeightPair& w) {
  const CutoffProfile& p = w.profile();
  const double radius = p.radius();
  const double near = phivare_ratio(w, radius * (1.0 + 1e-6));
  const double nearer = phivare_ratio(w, radius * (1.0 + 1e-8));
  if (!std::isfinite(near) || !std::isfinite(nearer)) {
    throw UnboundedRatioError("Φ_2^{2q}/Φ_1 is not finite near r = R");
  }
  const double slope = near > 0.0 && nearer > 0.0 ? std::log(nearer / near) / std::log(1e-2) : 0.0;
  if (slope < -1e-3) {
    std::ostringstream msg;
    msg << "Φ_2^{2q}/Φ_1 grows like (r/R-1)^" << slope << " as r -> R+ (k=" << p.k() << ")";
    throw UnboundedRatioError(msg.str());
  }
  const double b = p.params().b();
  const double exponent = p.params().dim() == 2 ? (b * p.k() - 4.0) / (4.0 - b) : (b * p.k() - 2.0) / (2.0 - b);
  if (!(exponent > 0.0)) {
    std::ostringstream msg;
    msg << "Φ_2^{2q}/Φ_1 does not vanish as r -> R+: k=" << p.k() << " must exceed "
        << (p.params().dim() == 2 ? "4/b=" : "2/b=") << (p.params().dim() == 2 ? 4.0 / b : 2.0 / b);
    throw UnboundedRatioError(msg.str());
  }
}

RatioScan scan_ratio(const WeightPair& w, Index samples) {
  RatioScan scan;
  const double radius = w.profile().radius();
  const double first = 1.0 + 1e-6;
  for (Index i = 0; i < samples; ++i) {
    const double s = first + (4.0 - first) * static_cast<double>(i) / static_cast<double>(samples - 1);
    const double ratio = phivare_ratio(w, s * radius);
    if (!std::isfinite(ratio)) throw UnboundedRatioError("non-finite Φ_2^{2q}/Φ_1 sample");
    if (ratio > scan.sup) {
      scan.sup = ratio;
      scan.argsup = s;
    }
  }
  return scan;
}

}  // namespace

EpsilonReport find_epsilon(const CutoffProfile& profile, double c, Index samples) {
  if (!(c > 0.0)) throw ConstraintError("find_epsilon: the constant c must be positive");
  if (samples < 2) throw ConstraintError("find_epsilon needs at least two samples");
  const WeightPair w(profile);
  check_edge_behaviour(w);

  EpsilonReport report;
  const RatioScan scan = scan_ratio(w, samples);
  if (!(scan.sup > 0.0)) throw ConstraintError("Φ_2 vanishes identically beyond R");
  report.sup_ratio = scan.sup;
  report.argsup = scan.argsup;
  report.epsilon = 1.0 / (2.0 * c * scan.sup);

  // Check on a staggered set of points so the sup samples are not reused.
  report.max_excess = -std::numeric_limits<double>::infinity();
  const double radius = profile.radius();
  for (Index j = 0; j < samples; ++j) {
    const double r = radius * (1.0 + 3.0 * (j + 0.5) / static_cast<double>(samples));
    const auto [lifted, phi1] = phivare_terms(w, r);
    report.max_excess = std::max(report.max_excess, c * report.epsilon * lifted - phi1);
  }
  report.inequality_holds = report.max_excess <= 0.0;

  for (double other : {1.0, 10.0, 100.0}) {
    const WeightPair rescaled(build_cutoff_unchecked(profile.k(), other, profile.params()));
    const double eps = 1.0 / (2.0 * c * scan_ratio(rescaled, samples).sup);
    report.r_spread = std::max(report.r_spread, std::abs(eps - report.epsilon) / report.epsilon);
  }
  report.r_independent = report.r_spread <= 1e-6;
  return report;
}

}  // namespace inls
