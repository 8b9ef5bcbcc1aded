/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <doctest.h>

#include <cmath>
#include <random>

#include "zcoup/oracle.hpp"

using namespace zcoup;

namespace {

// Mass of mu_quartic restricted to r_lo <= |x| < r_hi whose gradient image lands in
// the set, by brute midpoint quadrature in the angle with the radial integral
// done exactly. Image directions come from the gradient itself.
double brute_pushed_mass(const ImageSet& s, double r_lo, double r_hi, int steps = 200000) {
  double total = 0.0;
  const double h = kPi / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = -0.5 * kPi + (k + 0.5) * h;
    const double c = std::cos(t);
    const auto g = grad_psi_quartic(std::array{c, std::sin(t)});
    double phi = std::atan2((*g)[1], (*g)[0]);
    if (phi < 0) phi += 2 * kPi;
    if (!(phi >= s.phi_lo && phi < s.phi_hi)) continue;
    const double gn = std::hypot((*g)[0], (*g)[1]);
    const double lo = std::max(r_lo, s.s_lo / gn);
    const double hi = std::min(r_hi, s.s_hi / gn);
    if (hi > lo) total += c * c * c * (1 / lo - 1 / hi) * h;
  }
  return total;
}

}  // namespace

TEST_CASE("closed-form potential values") {
  CHECK(psi_quartic(1, 1).value == 1.0);
  CHECK(psi_quartic(2, 2).value == 4.0);
  CHECK(psi_quartic(0.5, -1).value == 4.0);
  CHECK(std::isinf(psi_quartic(-1, 0).value));
  CHECK(std::isinf(psi_quartic(0, 1).value));
  CHECK(psi_quartic(0, 0).value == 0.0);
  CHECK_FALSE(psi_quartic(0, 0).grad);
  const auto g = psi_quartic(1, 2).grad;
  REQUIRE(g);
  CHECK((*g)[0] == -32.0);
  CHECK((*g)[1] == 32.0);
  CHECK_FALSE(grad_psi_quartic(std::array{-1.0, 1.0}));
}

TEST_CASE("target density is the change of variables of the source density") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> xs(0.1, 3.0), ys(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double x = xs(rng), y = ys(rng);
    if (std::abs(y) < 1e-3) continue;
    const auto g = grad_psi_quartic(std::array{x, y});
    const double jac = 8.0 * std::pow(y / x, 6);  // det of the Hessian
    const double want = mu_quartic_density(x, y) / jac;
    CHECK(nu_quartic_density((*g)[0], (*g)[1]) == doctest::Approx(want).epsilon(1e-10));
  }
  CHECK(nu_quartic_density(1.0, 0.5) == 0.0);
  CHECK(mu_quartic_density(-1.0, 0.5) == 0.0);
}

TEST_CASE("angular masses of the pair are consistent") {
  // Composite Simpson on a fine grid.
  auto simpson = [](auto f, double a, double b) {
    const int n = 20000;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += (k % 2 ? 4 : 2) * f(a + k * h);
    return s * h / 3;
  };
  CHECK(simpson(mu_quartic_angular, -0.5 * kPi, 0.5 * kPi) == doctest::Approx(kMuQuarticAngularMass).epsilon(1e-10));
  // Beyond the unit circle the target carries the source mass weighted by the
  // gradient norm along each ray. Midpoint rule avoids the endpoint blow-up.
  const int n = 400000;
  const double h = kPi / n;
  double pulled = 0.0;
  for (int k = 0; k < n; ++k) {
    const double t = -0.5 * kPi + (k + 0.5) * h;
    pulled += mu_quartic_angular(t) * g_quartic(t) * h;
  }
  CHECK(simpson(nu_quartic_angular, 0.5 * kPi, 1.5 * kPi) == doctest::Approx(pulled).epsilon(1e-5));
}

TEST_CASE("angle maps are mutually inverse") {
  for (double t = -1.5; t <= 1.5; t += 0.01) {
    if (std::abs(t) < 1e-9) continue;
    const double phi = phi_quartic(t);
    CHECK(phi > 0.5 * kPi);
    CHECK(phi < 1.5 * kPi);
    CHECK(theta_quartic(phi) == doctest::Approx(t).epsilon(1e-12));
    const auto g = grad_psi_quartic(std::array{std::cos(t), std::sin(t)});
    CHECK(std::hypot((*g)[0], (*g)[1]) == doctest::Approx(g_quartic(t)).epsilon(1e-12));
  }
}

TEST_CASE("pushed masses match brute quadrature") {
  const auto sets = pushforward_dictionary();
  CHECK(sets.size() == 56);
  for (std::size_t k = 0; k < sets.size(); k += 5) {
    const double exact = pushed_mass_quartic(sets[k], 1.0, 10.0);
    CHECK(exact == doctest::Approx(brute_pushed_mass(sets[k], 1.0, 10.0)).epsilon(1e-5));
  }
}

TEST_CASE("pushed masses over all radii equal the target measure") {
  for (const auto& s : pushforward_dictionary()) {
    if (s.s_lo == 0.0) continue;
    CHECK(pushed_mass_quartic(s, 0.0, kInf) == doctest::Approx(nu_quartic_mass(s)).epsilon(1e-9));
  }
}

TEST_CASE("push-forward verification and its negative control") {
  const auto ok = verify_pushforward_quartic(128, 1e-3);
  CHECK(ok.pass);
  CHECK(ok.right_half_mass == 0.0);
  CHECK(ok.total_mass == doctest::Approx(kMuQuarticAngularMass * 0.9).epsilon(1e-12));
  CHECK_FALSE(verify_pushforward_quartic(128, 1e-3, 1.01).pass);
  const auto fine = run_oracle_suite(256, 5e-4);
  CHECK(fine.pass);
  CHECK(fine.fd_max_error <= 1e-6);
  CHECK(fine.value_homogeneity_error <= 1e-12);
  CHECK(fine.grad_homogeneity_error <= 1e-12);
}
