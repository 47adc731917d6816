#include <doctest.h>

#include <cmath>

#include "inls/cutoff.hpp"

using namespace inls;

namespace {

/// Composite Simpson on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, int n = 2000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("default k follows the margin rule") {
  const int expected_odd[] = {5, 3, 3};   // N != 2, b = 0.5, 1, 1.5
  const int expected_two[] = {9, 5, 4};   // N = 2
  const double bs[] = {0.5, 1.0, 1.5};
  for (int i = 0; i < 3; ++i) {
    CHECK(default_k(ProblemParams(1, bs[i])) == expected_odd[i]);
    CHECK(default_k(ProblemParams(3, bs[i])) == expected_odd[i]);
    CHECK(default_k(ProblemParams(2, bs[i])) == expected_two[i]);
  }
}

TEST_CASE("k constraints are enforced with a named message") {
  const auto v = k_violations(3, ProblemParams(2, 1.0));
  REQUIRE(v.size() == 1);
  CHECK(v.front().find("k must exceed 4/b=4") != std::string::npos);
  CHECK(k_violations(4, ProblemParams(1, 0.5)).size() == 1);  // k = 2/b is not enough
  CHECK(k_violations(2, ProblemParams(1, 0.5)).size() == 2);  // below both 3-b and 2/b
  CHECK(k_violations(5, ProblemParams(1, 0.5)).empty());
  CHECK_THROWS_AS(build_cutoff(3, 1.0, ProblemParams(2, 1.0)), ConstraintError);
  CHECK_THROWS_AS(build_cutoff(5, 0.0, ProblemParams(1, 0.5)), ConstraintError);
  CHECK_THROWS_AS(build_cutoff_unchecked(1, 1.0, ProblemParams(1, 0.5)), ConstraintError);
}

TEST_CASE("k = 2: r_star and the values of v") {
  const CutoffProfile c = build_cutoff(2, 1.0, ProblemParams(1, 1.5));
  CHECK(c.r_star() == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(c.v(1.0) == doctest::Approx(2.0));
  CHECK(c.v(1.0 - 1e-15) == doctest::Approx(2.0));
  CHECK(c.v(1.5) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(c.v(3.0) == 0.0);
  CHECK(c.v(2.0) == doctest::Approx(0.0));
}

TEST_CASE("r_star maximises the analytic branch") {
  for (int k = 2; k <= 12; ++k) {
    const CutoffProfile c = build_cutoff_unchecked(k, 1.0, ProblemParams(1, 1.0));
    CHECK(c.r_star() == doctest::Approx(1.0 + std::pow(1.0 / k, 1.0 / (k - 1))));
    CHECK(std::abs(c.v(c.r_star(), 1)) < 1e-12);
  }
}

TEST_CASE("bridge is C3 at r_star and at 2, and strictly decreasing") {
  for (int k = 2; k <= 12; ++k) {
    for (bool split : {false, true}) {
      const CutoffProfile c = build_cutoff_unchecked(k, 1.0, ProblemParams(1, 1.0), {split, 10000});
      for (double knot : {c.r_star(), 2.0}) {
        const double d = 1e-11;
        for (int order = 0; order <= 3; ++order) {
          // one-sided limits, with the linear drift over 2d removed
          const double left = c.v(knot - d, order) + d * c.v(knot - d, order + 1);
          const double right = c.v(knot + d, order) - d * c.v(knot + d, order + 1);
          CHECK(std::abs(left - right) < 1e-9 * std::max(1.0, std::abs(left)));
        }
      }
      // Finite-difference check of one-sided derivatives: v' from each side agrees.
      for (double knot : {c.r_star(), 2.0}) {
        const double h = 1e-6;
        const double left = (c.v(knot) - c.v(knot - h)) / h;
        const double right = (c.v(knot + h) - c.v(knot)) / h;
        CHECK(std::abs(left - right) < 1e-4);
      }
      double prev = c.v(c.r_star());
      bool decreasing = true;
      for (int i = 1; i <= 10000; ++i) {
        const double s = c.r_star() + (2.0 - c.r_star()) * i / 10001.0;
        decreasing = decreasing && c.v(s, 1) < 0.0 && c.v(s) < prev;
        prev = c.v(s);
      }
      CHECK(decreasing);
    }
  }
}

TEST_CASE("phi is the exact antiderivative of v") {
  const CutoffProfile c = build_cutoff(5, 1.0, ProblemParams(1, 0.5));
  auto v = [&](double s) { return c.v(s); };
  const auto knots = c.breakpoints();
  double acc = 0.0, prev = 0.0;
  for (double k : knots) {
    acc += simpson(v, prev, k);
    CHECK(c.phi(k) == doctest::Approx(acc).epsilon(1e-12));
    prev = k;
  }
  CHECK(c.phi(0.5) == doctest::Approx(0.25));
  CHECK(c.phi(7.0) == doctest::Approx(c.sup_phi()));
  const CutoffProfile scaled = build_cutoff(5, 3.0, ProblemParams(1, 0.5));
  CHECK(scaled.phi_R(4.5) == doctest::Approx(9.0 * c.phi(1.5)));
  CHECK(scaled.dphi_R(4.5) == doctest::Approx(3.0 * c.v(1.5)));
  CHECK(scaled.d2phi_R(4.5) == doctest::Approx(c.v(1.5, 1)));
}

TEST_CASE("dphi_R <= 2r and d2phi_R <= 2 everywhere") {
  for (int n = 1; n <= 3; ++n) {
    for (double b : {0.5, 1.0, 1.5}) {
      const ProblemParams p(n, b);
      const CutoffProfile c = build_cutoff(default_k(p), 2.0, p);
      double worst1 = -1, worst2 = -1;
      for (int i = 1; i <= 100000; ++i) {
        const double r = 8.0 * i / 100000.0;
        worst1 = std::max(worst1, c.dphi_R(r) - 2.0 * r);
        worst2 = std::max(worst2, c.d2phi_R(r) - 2.0);
      }
      CHECK(worst1 <= 1e-12);
      CHECK(worst2 <= 1e-12);
    }
  }
}

TEST_CASE("phicond: zero on the inner region, positive on the analytic branch") {
  const CutoffProfile c = build_cutoff_unchecked(4, 1.0, ProblemParams(1, 1.0));
  const PhicondReport rep = verify_phicond(c, 10000);
  CHECK(rep.pass);
  CHECK(std::abs(rep.min_value) < 1e-12);
  for (double r : {0.1, 0.5, 1.0}) CHECK(std::abs(c.dphi_R(r) - r * c.d2phi_R(r)) < 1e-14);

  const CutoffProfile d = build_cutoff_unchecked(4, 2.5, ProblemParams(1, 1.0));
  for (int i = 1; i < 200; ++i) {
    const double r = 2.5 * (1.0 + (d.r_star() - 1.0) * i / 200.0);
    const double rho = r / 2.5;
    const double expected = 2.0 * r * std::pow(rho - 1.0, 3) * (4.0 - (rho - 1.0) / rho);
    CHECK(d.dphi_R(r) - r * d.d2phi_R(r) == doctest::Approx(expected).epsilon(1e-9));
    CHECK(expected > 0.0);
  }
  CHECK(verify_phicond(d, 10000).pass);
  // Dense oracle: a million samples agree on the sign.
  double lo = 1e300;
  for (int i = 1; i <= 1000000; ++i) {
    const double r = 4.0 * 2.5 * i / 1000000.0;
    lo = std::min(lo, d.dphi_R(r) - r * d.d2phi_R(r));
  }
  CHECK(lo >= -1e-12);
}

TEST_CASE("weights: inner zero, outer constants, analytic-branch formulas") {
  {
    const CutoffProfile c = build_cutoff(3, 2.0, ProblemParams(3, 1.0));
    const WeightPair w = weights(c);
    CHECK(w.phi1(1.0) == 0.0);
    CHECK(w.phi2(1.0) == 0.0);
    CHECK(w.phi1(6.0) == doctest::Approx(8.0));
    CHECK(w.phi2(6.0) == doctest::Approx(6.0));
  }
  {
    const double R = 1.7, b = 0.5;
    const CutoffProfile c = build_cutoff_unchecked(4, R, ProblemParams(1, b));
    const WeightPair w = weights(c);
    const double r = 1.2 * R, rho = 1.2;
    const double d1 = 2.0 * R * (rho - std::pow(rho - 1.0, 4));
    const double d2 = 2.0 - 8.0 * std::pow(rho - 1.0, 3);
    CHECK(w.phi1(r) == doctest::Approx(4.0 * (2.0 - d1 / r)).epsilon(1e-13));
    const double phi2 = 2.0 / (3.0 - b) * ((2.0 - b) * (2.0 - d2) + b * (2.0 - d1 / r));
    CHECK(w.phi2(r) == doctest::Approx(phi2).epsilon(1e-13));
  }
}

TEST_CASE("weights are nonnegative and depend on r/R only") {
  for (int n = 1; n <= 3; ++n) {
    const ProblemParams p(n, 1.0);
    const WeightPair a = weights(build_cutoff(default_k(p), 1.0, p));
    const WeightPair b = weights(build_cutoff(default_k(p), 37.0, p));
    for (int i = 1; i <= 4000; ++i) {
      const double rho = 3.0 * i / 4000.0;
      CHECK(a.phi1(rho) >= 0.0);
      CHECK(a.phi2(rho) >= 0.0);
      CHECK(b.phi1(37.0 * rho) == doctest::Approx(a.phi1(rho)).epsilon(1e-12));
      CHECK(b.phi2(37.0 * rho) == doctest::Approx(a.phi2(rho)).epsilon(1e-12));
    }
  }
}

TEST_CASE("analytic derivative of Phi2 matches central differences") {
  const ProblemParams p(2, 1.0);
  const WeightPair w = weights(build_cutoff(default_k(p), 1.0, p));
  for (double r : {1.05, 1.2, 1.3, 1.55, 1.8, 1.95}) {
    const double h = 1e-6;
    CHECK(w.phi2_derivative(r) == doctest::Approx((w.phi2(r + h) - w.phi2(r - h)) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("grad weight bound is R independent and matches the analytic derivative") {
  const ProblemParams p(1, 0.5);
  const double q = weight_exponent(p);
  CHECK(q == doctest::Approx(1.0 / 1.5));
  CHECK(weight_exponent(ProblemParams(2, 0.5)) == doctest::Approx(1.0 / 1.75));
  const CutoffProfile base = build_cutoff_unchecked(4, 1.0, p);
  const double b1 = grad_weight_bound(base);
  for (double R : {10.0, 100.0}) {
    CHECK(grad_weight_bound(build_cutoff_unchecked(4, R, p)) == doctest::Approx(b1).epsilon(1e-6));
  }
  const WeightPair w = weights(base);
  double oracle = 0.0;
  for (int i = 0; i < 400000; ++i) {
    const double r = 1.0 + 1.0 * (i + 0.5) / 400000.0;
    const double phi2 = w.phi2(r);
    if (phi2 > 0) oracle = std::max(oracle, std::abs(q * std::pow(phi2, q - 1.0) * w.phi2_derivative(r)));
  }
  CHECK(b1 == doctest::Approx(oracle).epsilon(1e-3));
}

TEST_CASE("grad weight bound blows up when k <= 3-b") {
  const ProblemParams p(1, 0.5);
  const CutoffProfile bad = build_cutoff_unchecked(2, 1.0, p);
  const double coarse = grad_weight_bound(bad, 10000);
  const double fine = grad_weight_bound(bad, 1000000);
  CHECK(fine > 3.0 * coarse);
  const CutoffProfile good = build_cutoff_unchecked(3, 1.0, p);
  CHECK(grad_weight_bound(good, 1000000) == doctest::Approx(grad_weight_bound(good, 10000)).epsilon(1e-2));
}

TEST_CASE("bilaplacian vanishes off the transition, scales as 1/R^2, matches differences") {
  for (int n = 1; n <= 3; ++n) {
    const ProblemParams p(n, 1.0);
    const CutoffProfile c1 = build_cutoff(default_k(p), 1.0, p);
    CHECK(c1.bilaplacian(0.5) == 0.0);
    CHECK(c1.bilaplacian(3.0) == 0.0);
    double s1 = 0.0;
    for (int i = 1; i <= 20000; ++i) s1 = std::max(s1, std::abs(c1.bilaplacian(4.0 * i / 20000.0)));
    for (double R : {10.0, 100.0}) {
      const CutoffProfile c = build_cutoff(default_k(p), R, p);
      double s = 0.0;
      for (int i = 1; i <= 20000; ++i) s = std::max(s, std::abs(c.bilaplacian(4.0 * R * i / 20000.0)));
      CHECK(R * R * s == doctest::Approx(s1).epsilon(1e-6));
    }
    // Δ(Δφ) from central differences of the closed-form Δφ.
    auto lap = [&](double r) { return c1.laplacian(r); };
    for (double r : {1.1, 1.25, 1.45, 1.7, 1.9}) {
      const double h = 1e-4;
      const double g1 = (lap(r + h) - lap(r - h)) / (2 * h);
      const double g2 = (lap(r + h) - 2 * lap(r) + lap(r - h)) / (h * h);
      const double fd = g2 + (n - 1) / r * g1;
      CHECK(c1.bilaplacian(r) == doctest::Approx(fd).epsilon(1e-5).scale(1.0));
    }
    // Δφ itself against differences of φ_R.
    for (double r : {0.5, 1.3, 1.8, 2.5}) {
      const double h = 1e-4;
      const double fd = (c1.phi_R(r + h) - 2 * c1.phi_R(r) + c1.phi_R(r - h)) / (h * h) +
                        (n - 1) / r * (c1.phi_R(r + h) - c1.phi_R(r - h)) / (2 * h);
      CHECK(c1.laplacian(r) == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
    }
  }
}

TEST_CASE("find_epsilon: outer-region ratio and the Phivare inequality") {
  const ProblemParams p(1, 1.0);
  const CutoffProfile c = build_cutoff(4, 1.0, p);
  const WeightPair w = weights(c);
  const auto [num, den] = phivare_terms(w, 3.0);
  CHECK(num / den == doctest::Approx(2.0));

  const EpsilonReport rep = find_epsilon(c, 1.0);
  CHECK(rep.epsilon > 0.0);
  CHECK(rep.sup_ratio >= 2.0);
  CHECK(rep.epsilon <= 0.25 + 1e-15);
  CHECK(rep.inequality_holds);
  CHECK(rep.r_independent);
  // Independent check at staggered points.
  for (int i = 0; i < 100000; ++i) {
    const double r = 1.0 + 1e-6 + 3.0 * (i + 0.37) / 100000.0;
    const auto [a, b] = phivare_terms(w, r);
    CHECK_MESSAGE(rep.epsilon * a - b <= 1e-12, "r=" << r);
    if (rep.epsilon * a - b > 1e-12) break;
  }
}

TEST_CASE("Phi1 lower bound beyond r_star") {
  for (int k : {3, 5, 9}) {
    const CutoffProfile c = build_cutoff_unchecked(k, 2.0, ProblemParams(3, 1.0));
    const WeightPair w = weights(c);
    const double a = std::pow(1.0 / k, 1.0 / (k - 1));
    const double bound = 8.0 * std::pow(1.0 / k, static_cast<double>(k) / (k - 1)) / (1.0 + a);
    for (int i = 0; i <= 1000; ++i) {
      const double r = 2.0 * (c.r_star() + (3.0 - c.r_star()) * i / 1000.0);
      CHECK(w.phi1(r) >= bound * (1 - 1e-12));
    }
  }
}

TEST_CASE("find_epsilon rejects k at or below the critical exponent") {
  CHECK_THROWS_AS(find_epsilon(build_cutoff_unchecked(4, 1.0, ProblemParams(1, 0.5)), 1.0), UnboundedRatioError);
  CHECK_THROWS_AS(find_epsilon(build_cutoff_unchecked(3, 1.0, ProblemParams(1, 0.5)), 1.0), UnboundedRatioError);
  CHECK_THROWS_AS(find_epsilon(build_cutoff_unchecked(4, 1.0, ProblemParams(2, 1.0)), 1.0), UnboundedRatioError);
  CHECK_THROWS_AS(find_epsilon(build_cutoff_unchecked(2, 1.0, ProblemParams(3, 1.0)), 1.0), UnboundedRatioError);
  CHECK_NOTHROW(find_epsilon(build_cutoff(5, 1.0, ProblemParams(2, 1.0)), 1.0));
  CHECK_THROWS_AS(find_epsilon(build_cutoff(5, 1.0, ProblemParams(2, 1.0)), 0.0), ConstraintError);
}
