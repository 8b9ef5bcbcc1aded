/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace zcoup {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

double wrap(double phi) {
  const double t = std::fmod(phi, 2.0 * kPi);
  return t < 0.0 ? t + 2.0 * kPi : t;
}

// Solve g_quartic(theta) = c on (0, pi/2); g_quartic increases from 0 to +inf there.
double invert_g(double c) {
  double lo = 0.0, hi = kHalfPi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g_quartic(mid) < c ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

PsiQuartic psi_quartic(double x, double y) {
  if (x > 0.0) {
    const double y2 = y * y;
    return {y2 * y2 / (x * x), std::array<double, 2>{-2.0 * y2 * y2 / (x * x * x), 4.0 * y2 * y / (x * x)}};
  }
  if (x == 0.0 && y == 0.0) return {0.0, std::nullopt};
  return {kInf, std::nullopt};
}

std::optional<std::vector<double>> grad_psi_quartic(ConstCoords p, double scale) {
  require(p.size() == 2, "psi_quartic lives on the plane");
  const auto v = psi_quartic(p[0], p[1]);
  if (!v.grad) return std::nullopt;
  return std::vector<double>{scale * (*v.grad)[0], scale * (*v.grad)[1]};
}

double mu_quartic_density(double x, double y) {
  if (!(x > 0.0)) return 0.0;
  const double q = x * x + y * y;
  return x * x * x / (q * q * q);
}

double nu_quartic_density(double u, double v) {
  if (!(u < 0.0)) return 0.0;
  const double q = 4.0 * u * u + v * v;
  return -64.0 * u * u * u / (q * q * q);
}

double mu_quartic_angular(double theta) {
  const double c = std::cos(theta);
  return c > 0.0 ? c * c * c : 0.0;
}

double nu_quartic_angular(double theta) {
  const double c = std::cos(theta);
  if (!(c < 0.0)) return 0.0;
  const double q = 1.0 + 3.0 * c * c;
  return -64.0 * c * c * c / (q * q * q);
}

double g_quartic(double theta) {
  const double c = std::cos(theta);
  const double t = std::abs(std::tan(theta));
  return 2.0 * t * t * t * std::sqrt(1.0 + 3.0 * c * c);
}

double phi_quartic(double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return wrap(std::atan2(2.0 * c * (s < 0.0 ? -1.0 : 1.0), -std::abs(s)));
}

double theta_quartic(double phi) {
  const double s = std::sin(phi);
  return std::atan2(-2.0 * std::cos(phi) * (s < 0.0 ? -1.0 : 1.0), std::abs(s));
}

double pushed_mass_quartic(const ImageSet& set, double r_lo, double r_hi) {
  require(set.s_lo >= 0.0 && set.s_lo <= set.s_hi, "bad image annulus");
  require(r_lo >= 0.0 && r_lo <= r_hi, "bad source annulus");
  std::vector<double> cuts{-kHalfPi, 0.0, kHalfPi};
  // Kinks where a radial bound switches between the source and image limits.
  for (double s : {set.s_lo, set.s_hi})
    for (double r : {r_lo, r_hi}) {
      const double c = s / r;
      if (std::isfinite(c) && c > 0.0) {
        const double t = invert_g(c);
        cuts.push_back(t);
        cuts.push_back(-t);
      }
    }
  for (double p : {set.phi_lo, set.phi_hi})
    if (p > kHalfPi && p < 1.5 * kPi) cuts.push_back(theta_quartic(p));
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](double theta) {
    const double g = g_quartic(theta);
    const double lo = set.s_lo > 0.0 ? std::max(r_lo, set.s_lo / g) : r_lo;
    const double hi = std::isinf(set.s_hi) ? r_hi : std::min(r_hi, set.s_hi / g);
    if (!(hi > lo)) return 0.0;
    return mu_quartic_angular(theta) * (1.0 / lo - 1.0 / hi);
  };
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double a = cuts[k], b = cuts[k + 1];
    if (!(b > a)) continue;
    const double ph = phi_quartic(0.5 * (a + b));
    if (!(ph >= set.phi_lo && ph < set.phi_hi)) continue;
    total += adaptive_simpson(integrand, a, b, 1e-13);
  }
  return total;
}

double nu_quartic_mass(const ImageSet& set) {
  require(set.s_lo > 0.0 && set.s_lo <= set.s_hi, "image annulus must avoid the origin");
  const double radial = 1.0 / set.s_lo - (std::isinf(set.s_hi) ? 0.0 : 1.0 / set.s_hi);
  return radial * adaptive_simpson(nu_quartic_angular, set.phi_lo, set.phi_hi, 1e-13);
}

std::vector<ImageSet> pushforward_dictionary() {
  // Sector edges sit on images of angular cell edges (0 and +-pi/4) so that
  // cells are never split between sectors when the resolution is a
  // multiple of 4.
  const double q1 = phi_quartic(0.25 * kPi);
  const double q2 = phi_quartic(-0.25 * kPi);
  const std::vector<std::array<double, 2>> sectors = {
      {kHalfPi, 1.5 * kPi}, {kHalfPi, kPi}, {kPi, 1.5 * kPi}, {kHalfPi, q1},
      {q1, kPi},            {kPi, q2},      {q2, 1.5 * kPi}};
  const std::vector<std::array<double, 2>> annuli = {{0.0, kInf}, {0.0, 1.0}, {1.0, kInf},
                                                     {0.0, 3.0},  {3.0, kInf}, {0.5, 5.0},
                                                     {1.0, 4.0},  {2.0, 20.0}};
  std::vector<ImageSet> out;
  for (const auto& a : annuli)
    for (const auto& s : sectors) out.push_back({a[0], a[1], s[0], s[1]});
  return out;
}

HomogeneousMeasure mu_quartic_measure(int resolution) {
  return HomogeneousMeasure(1.0, AngularLaw::density(AngularDensity::named(2, "mu_quartic"), std::nullopt, resolution),
                            true);
}

HomogeneousMeasure nu_quartic_measure(int resolution) {
  return HomogeneousMeasure(1.0, AngularLaw::density(AngularDensity::named(2, "nu_quartic"), std::nullopt, resolution),
                            true);
}

PushforwardReport verify_pushforward_quartic(int resolution, double tol, double grad_scale) {
  require(resolution >= 16, "resolution must be >= 16");
  constexpr double kRlo = 1.0, kRhi = 10.0;
  const auto mu = discretize(mu_quartic_measure(), kRlo, kRhi, DiscretizeMode::Quadrature, resolution);
  const auto sets = pushforward_dictionary();

  std::vector<double> rho(mu.size()), ang(mu.size());
  std::vector<double> right;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto y = grad_psi_quartic(mu.atom(i), grad_scale);
    if (!y) fail(ErrorCode::DomainViolation, "quadrature atom outside the gradient's domain");
    rho[i] = std::hypot((*y)[0], (*y)[1]);
    ang[i] = wrap(std::atan2((*y)[1], (*y)[0]));
    if ((*y)[0] > 0.0) right.push_back(mu.weight(i));
  }

  PushforwardReport rep{resolution, tol, 0.0, mu.total(), ordered_sum(right), {}, false};
  for (const auto& s : sets) {
    std::vector<double> hit;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (rho[i] >= s.s_lo && rho[i] < s.s_hi && ang[i] >= s.phi_lo && ang[i] < s.phi_hi)
        hit.push_back(mu.weight(i));
    const double emp = ordered_sum(hit);
    const double exact = pushed_mass_quartic(s, kRlo, kRhi);
    rep.masses.push_back({emp, exact});
    rep.max_rel_error = std::max(rep.max_rel_error, std::abs(emp - exact) / rep.total_mass);
  }
  rep.pass = rep.max_rel_error <= tol && rep.right_half_mass == 0.0;
  return rep;
}

OracleSuite run_oracle_suite(int resolution, double tol, double grad_scale) {
  OracleSuite suite{verify_pushforward_quartic(resolution, tol, grad_scale), 0.0, 0.0, 0.0, false};

  // Central differences of the value against the (possibly scaled) gradient.
  constexpr double h = 1e-6;
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j) {
      const double x = 0.5 + 0.25 * i;
      const double y = -1.5 + 0.5 * j;
      const auto g = grad_psi_quartic(std::array{x, y}, grad_scale);
      const double fx = (psi_quartic(x + h, y).value - psi_quartic(x - h, y).value) / (2.0 * h);
      const double fy = (psi_quartic(x, y + h).value - psi_quartic(x, y - h).value) / (2.0 * h);
      suite.fd_max_error = std::max(suite.fd_max_error,
                                    std::abs(fx - (*g)[0]) / std::max(1.0, std::abs((*g)[0])));
      suite.fd_max_error = std::max(suite.fd_max_error,
                                    std::abs(fy - (*g)[1]) / std::max(1.0, std::abs((*g)[1])));
    }

  // Order-2 value and order-1 gradient homogeneity.
  for (double lam : {0.5, 2.0, 10.0})
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) {
        const double x = 0.2 + 0.3 * i;
        const double y = -2.0 + 0.45 * j;
        const double v = psi_quartic(x, y).value;
        const double vl = psi_quartic(lam * x, lam * y).value;
        const double want = lam * lam * v;
        if (want != 0.0 || vl != 0.0)
          suite.value_homogeneity_error =
              std::max(suite.value_homogeneity_error, std::abs(vl - want) / std::abs(want));
        const auto g = grad_psi_quartic(std::array{x, y}, grad_scale);
        const auto gl = grad_psi_quartic(std::array{lam * x, lam * y}, grad_scale);
        const double dev = std::hypot((*gl)[0] - lam * (*g)[0], (*gl)[1] - lam * (*g)[1]);
        suite.grad_homogeneity_error = std::max(
            suite.grad_homogeneity_error, dev / std::max(1.0, std::hypot((*g)[0], (*g)[1])));
      }

  suite.pass = suite.push.pass && suite.fd_max_error <= 1e-6 &&
               suite.value_homogeneity_error <= 1e-12 && suite.grad_homogeneity_error <= 1e-12;
  return suite;
}

}  // namespace zcoup
