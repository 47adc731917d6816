#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <random>

#include "inls/observables.hpp"
#include "inls/solver.hpp"

using namespace inls;

namespace {

Field gaussian(const ProblemParams& p, const Grid& g, double amplitude, double center = 0.0, double width = 1.0) {
  InitialData init;
  init.kind = center == 0.0 ? InitialKind::gaussian : InitialKind::shifted_gaussian;
  init.bump = {amplitude, width, {center, 0.0, 0.0}};
  return realize(init, p, g);
}

Field random_bandlimited(const ProblemParams& p, const Grid& g, int kmax, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  const double unit = M_PI / g.half_width();
  Eigen::ArrayXcd v = Eigen::ArrayXcd::Zero(g.size());
  std::vector<Eigen::ArrayXd> x;
  for (int d = 0; d < g.dim(); ++d) x.push_back(g.coordinates(d));
  const int nz = g.dim() > 1 ? kmax : 0, nw = g.dim() > 2 ? kmax : 0;
  for (int a = -kmax; a <= kmax; ++a)
    for (int b = -nz; b <= nz; ++b)
      for (int c = -nw; c <= nw; ++c) {
        const Complex amp(gauss(rng), gauss(rng));
        for (Index i = 0; i < g.size(); ++i) {
          double phase = a * x[0](i);
          if (g.dim() > 1) phase += b * x[1](i);
          if (g.dim() > 2) phase += c * x[2](i);
          v(i) += amp * std::exp(Complex(0.0, unit * phase));
        }
      }
  return Field(p, g, v);
}

/// One step backwards in time: conjugation reverses the flow.
Field step_back(const SpectralPlan& plan, const Field& u, double dt) {
  const Field conj(u.params(), u.grid(), u.values().conjugate());
  const Field fwd = strang_step(plan, conj, dt);
  return Field(u.params(), u.grid(), fwd.values().conjugate());
}

/// A short run so the field picks up a non-trivial phase.
Field evolve(const SpectralPlan& plan, Field u, double dt, int steps) {
  for (int i = 0; i < steps; ++i) u = strang_step(plan, u, dt);
  return u;
}

}  // namespace

TEST_CASE("zero field: every diagnostic vanishes") {
  const ProblemParams p(2, 1.0);
  const Grid g(2, 6.0, 32);
  const SpectralPlan plan(g);
  const Field zero(p, g);
  const ConservationReport c = conservation(plan, zero);
  CHECK(c.mass == 0.0);
  CHECK(c.energy == 0.0);
  const CutoffProfile prof = build_cutoff(default_k(p), 2.0, p);
  CHECK(virial_z(zero, prof) == 0.0);
  CHECK(virial_z_prime(plan, zero, prof) == 0.0);
  const VirialReport v = virial_z_second(plan, zero, prof);
  CHECK(v.z_second_formula == 0.0);
  CHECK(v.K1 == 0.0);
  CHECK(v.K2 == 0.0);
  CHECK(v.K3 == 0.0);
  CHECK(std::isnan(v.alpha_check));
}

TEST_CASE("Gaussian moments: mass and kinetic energy") {
  const ProblemParams p(1, 0.5);
  const Grid g(1, 20.0, 1024);
  const SpectralPlan plan(g);
  for (double a : {0.3, 1.0, 1.7}) {
    const ConservationReport c = conservation(plan, gaussian(p, g, a));
    CHECK(c.mass == doctest::Approx(a * a * std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(c.kinetic == doctest::Approx(a * a * std::sqrt(M_PI) / 2.0).epsilon(1e-12));
    CHECK(c.energy == doctest::Approx(0.5 * c.kinetic - p.energy_coefficient() * c.potential_weighted).epsilon(1e-14));
  }
}

TEST_CASE("weighted potential converges to the quadrature oracle at rate h^1/2") {
  // ∫|x|^{-1/2} e^{-5x^2/2} dx; the grid samples the singular weight pointwise.
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double half = integrator.integrate([](double x) { return std::pow(x, -0.5) * std::exp(-2.5 * x * x); }, 0.0, 20.0);
  const double oracle = 2.0 * half;
  const double closed = boost::math::tgamma(0.25) / std::pow(2.5, 0.25);
  CHECK(oracle == doctest::Approx(closed).epsilon(1e-12));

  const ProblemParams p(1, 0.5);
  std::vector<double> errs;
  for (int m : {1024, 4096, 16384}) {
    const Grid g(1, 20.0, m);
    const ConservationReport c = conservation(SpectralPlan(g), gaussian(p, g, 1.0));
    errs.push_back(std::abs(c.potential_weighted - oracle));
    CHECK(errs.back() < 2.0 * std::sqrt(g.spacing()));
    CHECK(c.energy == doctest::Approx(0.25 * std::sqrt(M_PI) - p.energy_coefficient() * c.potential_weighted).epsilon(1e-12));
  }
  // Quadrupling M halves the error.
  CHECK(errs[0] / errs[1] == doctest::Approx(2.0).epsilon(0.05));
  CHECK(errs[1] / errs[2] == doctest::Approx(2.0).epsilon(0.05));
  // Away from the origin the weight is smooth and the grid sum is spectrally accurate.
  const double shifted = integrator.integrate(
      [](double x) { return std::pow(std::abs(x), -0.5) * std::exp(-2.5 * (x - 6.0) * (x - 6.0)); }, 1.0, 11.0);
  const Grid g(1, 20.0, 1024);
  CHECK(conservation(SpectralPlan(g), gaussian(p, g, 1.0, 6.0)).potential_weighted ==
        doctest::Approx(shifted).epsilon(1e-10));
}

TEST_CASE("z_R on the inner region is the second moment") {
  for (int n = 1; n <= 3; ++n) {
    const ProblemParams p(n, 1.0);
    const Grid g(n, 10.0, n == 3 ? 64 : 128);
    const SpectralPlan plan(g);
    const Field u = gaussian(p, g, 1.0);  // |u|^2 ~ e^{-64} at R = 8
    const CutoffProfile prof = build_cutoff(default_k(p), 8.0, p);
    const Eigen::ArrayXd r2 = g.radii().square();
    const double moment = (r2 * u.values().abs2()).sum() * g.cell_volume();
    CHECK(virial_z(u, prof) == doctest::Approx(moment).epsilon(1e-13));
    const VirialReport v = virial_z_second(plan, u, prof);
    CHECK(std::abs(v.K3) < 1e-12);
    // With φ_R = r^2, the first two terms collapse to 8∫|∇u|^2 and K1 to zero.
    CHECK(std::abs(v.K1) < 1e-10);
  }
}

TEST_CASE("z_R' of a real field vanishes") {
  const ProblemParams p(2, 0.5);
  const Grid g(2, 10.0, 80);
  const SpectralPlan plan(g);
  const CutoffProfile prof = build_cutoff(default_k(p), 2.0, p);
  CHECK(std::abs(virial_z_prime(plan, gaussian(p, g, 1.3, 0.7), prof)) < 1e-13);
}

TEST_CASE("virial bounds hold on random band-limited fields") {
  std::mt19937_64 rng(2024);
  for (int n = 1; n <= 3; ++n) {
    const ProblemParams p(n, 0.5 + 0.4 * n);
    const Grid g(n, 6.0, n == 3 ? 12 : 32);
    const SpectralPlan plan(g);
    const CutoffProfile prof = build_cutoff(default_k(p), 1.5, p);
    double bilap_sup = 0.0;
    for (int i = 1; i <= 20000; ++i) bilap_sup = std::max(bilap_sup, std::abs(prof.bilaplacian(5.0 * i / 20000.0)));
    int failures = 0;
    for (int trial = 0; trial < 100 / 3 + 1; ++trial) {
      const Field u = random_bandlimited(p, g, 3, rng);
      const FieldDiagnostics d(plan, u);
      const double mass = d.conservation().mass;
      const VirialReport v = d.virial(prof);
      failures += !(v.z >= 0.0 && v.z <= 2.25 * prof.sup_phi() * mass * (1 + 1e-12));
      failures += !(v.K1 <= 1e-12 * mass);
      failures += !(std::abs(v.K3) <= bilap_sup * mass * (1 + 1e-12));
      failures += !(v.K2 >= -1e-12);
    }
    CHECK(failures == 0);
  }
}

TEST_CASE("shared diagnostics agree with the one-shot functions") {
  const ProblemParams p(1, 1.0);
  const Grid g(1, 10.0, 256);
  const SpectralPlan plan(g);
  const Field u = evolve(plan, gaussian(p, g, 1.2, 0.4), 1e-3, 30);
  const CutoffProfile prof = build_cutoff(default_k(p), 1.0, p);
  const FieldDiagnostics d(plan, u);
  CHECK(d.virial_z(prof) == virial_z(u, prof));
  CHECK(d.virial_z_prime(prof) == virial_z_prime(plan, u, prof));
  CHECK(d.grad_norm() == doctest::Approx(grad_norm(plan, u)).epsilon(1e-14));
  CHECK(d.sup_norm() == sup_norm(u));
  CHECK_THROWS_AS(d.virial(build_cutoff(default_k(ProblemParams(1, 0.5)), 1.0, ProblemParams(1, 0.5))), ConstraintError);
}

TEST_CASE("z_R' matches a centred time difference at second order") {
  const ProblemParams p(1, 0.5);
  const Grid g(1, 20.0, 512);
  const SpectralPlan plan(g);
  const Field u = evolve(plan, gaussian(p, g, 1.0, 0.5), 1e-3, 100);
  const CutoffProfile prof = build_cutoff(default_k(p), 2.0, p);
  const double exact = virial_z_prime(plan, u, prof);
  CHECK(std::abs(exact) > 1e-2);
  std::vector<double> errs;
  for (double delta : {1e-2, 5e-3, 2.5e-3}) {
    const double fd = (virial_z(strang_step(plan, u, delta), prof) - virial_z(step_back(plan, u, delta), prof)) / (2 * delta);
    errs.push_back(std::abs(fd - exact));
  }
  CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("z_R'' formula matches a second time difference away from the singularity") {
  // The mass sits at |x| ~ 3, where |x|^{-b} is smooth. The bridge makes Δ²φ_R steep near 2R,
  // so the quadrature needs a fine grid before the formula settles.
  const ProblemParams p(1, 0.5);
  std::vector<double> errs;
  double formula = 0.0;
  for (int m : {4096, 65536}) {
    const Grid g(1, 20.0, m);
    const SpectralPlan plan(g);
    const Field u = evolve(plan, gaussian(p, g, 1.5, 3.0), 1e-3, 50);
    const CutoffProfile prof = build_cutoff(default_k(p), 2.0, p);
    formula = virial_z_second(plan, u, prof).z_second_formula;
    const double delta = 1e-3;
    const double fd = (virial_z(strang_step(plan, u, delta), prof) - 2 * virial_z(u, prof) +
                       virial_z(step_back(plan, u, delta), prof)) / (delta * delta);
    errs.push_back(std::abs(fd - formula));
  }
  CHECK(errs[1] < 1e-4 * std::abs(formula));
  CHECK(errs[1] < 0.1 * errs[0]);
}

TEST_CASE("closure coefficient is the same for every field and time") {
  std::vector<double> alphas;
  for (int n = 1; n <= 2; ++n) {
    const ProblemParams p(n, n == 1 ? 0.5 : 1.0);
    const Grid g(n, 10.0, n == 1 ? 512 : 64);
    const SpectralPlan plan(g);
    const CutoffProfile prof = build_cutoff(default_k(p), 1.5, p);
    for (double a : {0.6, 1.4}) {
      Field u = gaussian(p, g, a, 0.8);
      for (int rep = 0; rep < 3; ++rep) {
        const double alpha = virial_z_second(plan, u, prof).alpha_check;
        if (std::isfinite(alpha)) alphas.push_back(alpha);
        u = evolve(plan, u, 2e-3, 20);
      }
    }
  }
  REQUIRE(alphas.size() >= 10);
  for (double a : alphas) CHECK(a == doctest::Approx(alphas.front()).epsilon(1e-8));
  MESSAGE("closure coefficient alpha = " << alphas.front());
}
