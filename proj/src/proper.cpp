/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/proper.hpp"

#include <algorithm>
#include <cmath>

namespace zcoup {

ResidualDecomposition residual_decomposition(const ZeroCoupling& g) {
  ResidualDecomposition r;
  r.from_origin.assign(g.targets.size(), 0.0);
  r.to_origin.assign(g.sources.size(), 0.0);
  std::vector<double> left, right;
  for (const auto& e : g.entries) {
    if (e.src == kOrigin && e.dst != kOrigin) {
      left.push_back(e.mass);
      r.from_origin[static_cast<std::size_t>(e.dst)] += e.mass;
    } else if (e.dst == kOrigin && e.src != kOrigin) {
      right.push_back(e.mass);
      r.to_origin[static_cast<std::size_t>(e.src)] += e.mass;
    }
  }
  r.left_residual = ordered_sum(left);
  r.right_residual = ordered_sum(right);
  return r;
}

bool check_proper(const ZeroCoupling& g, double tol) {
  std::vector<double> masses;
  for (const auto& e : g.entries) masses.push_back(e.mass);
  return residual_decomposition(g).left_residual <= tol * ordered_sum(masses);
}

NecessaryReport check_necessary(const HomogeneousMeasure& mu, const HomogeneousMeasure& nu,
                                int grid) {
  require(mu.dim == nu.dim, "measure dimensions differ");
  const auto ys = nu.angular.support_grid(grid);
  if (ys.empty() || mu.angular.total_mass() <= 0.0) fail(ErrorCode::EmptySupport, "angular support is empty");
  // The open half-space {<x,y> > 0} must carry mu mass.
  for (const auto& y : ys)
    if (!(mu.angular.cap_mass(y, 0.0) > 1e-12)) return {false, y};
  return {true, std::nullopt};
}

ConeReport check_cone_condition(const HomogeneousMeasure& mu, const HomogeneousMeasure& nu,
                                const std::vector<double>& eps_grid, int grid) {
  require(mu.dim == nu.dim, "measure dimensions differ");
  require(!eps_grid.empty(), "eps grid is empty");
  auto eps_sorted = eps_grid;
  std::sort(eps_sorted.begin(), eps_sorted.end(), std::greater<>());
  ConeReport rep{true, {}};
  const auto ys = nu.angular.support_grid(grid);
  if (ys.empty()) fail(ErrorCode::EmptySupport, "angular support of nu is empty");
  for (const auto& y : ys) {
    ConeDirection d{y, ConeVerdict::Undetermined, std::nullopt, mu.angular.cap_mass(y, 0.0)};
    if (!(d.halfspace_mass > 1e-12)) {
      d.verdict = ConeVerdict::Fails;
    } else {
      for (double eps : eps_sorted) {
        if (mass_cone(mu, Cone(y, eps)).infinite) {
          d.verdict = ConeVerdict::Holds;
          d.eps = eps;
          break;
        }
      }
    }
    if (d.verdict != ConeVerdict::Holds) rep.holds = false;
    rep.directions.push_back(std::move(d));
  }
  return rep;
}

HomogeneousSupportReport check_homogeneous_support(const SupportSet& s, double a, double b,
                                                   const std::vector<double>& lambdas, double tol) {
  const std::size_t n = s.size(), d = s.dim();
  if (n == 0) fail(ErrorCode::EmptySupport, "support is empty");
  double r_min = kInf, r_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = norm(s.x(i));
    r_min = std::min(r_min, r);
    r_max = std::max(r_max, r);
  }
  HomogeneousSupportReport rep{true, 0.0, 0};
  std::vector<double> p(2 * d);
  for (double lam : lambdas) {
    require(lam > 0.0, "scaling factors must be positive");
    const double sx = std::pow(lam, a), sy = std::pow(lam, b);
    for (std::size_t i = 0; i < n; ++i) {
      const double r = sx * norm(s.x(i));
      // A finite sample only represents the cone on its own radial range.
      if (r < r_min * (1.0 - 1e-12) || r > r_max * (1.0 + 1e-12)) continue;
      for (std::size_t k = 0; k < d; ++k) {
        p[k] = sx * s.x(i)[k];
        p[d + k] = sy * s.y(i)[k];
      }
      double best = kInf;
      for (std::size_t j = 0; j < n && best > 0.0; ++j) {
        const double dd = dist2({p.data(), d}, s.x(j)) + dist2({p.data() + d, d}, s.y(j));
        best = std::min(best, dd);
      }
      rep.max_distance = std::max(rep.max_distance, std::sqrt(best));
      ++rep.checked;
    }
  }
  rep.holds = rep.max_distance <= tol;
  return rep;
}

bool ext_geq(ExtReal a, ExtReal b) {
  if (a.infinite) return true;
  if (b.infinite) return false;
  return a.value >= b.value;
}

bool check_1d_criterion(ExtReal mu_pos, ExtReal mu_neg, ExtReal nu_pos, ExtReal nu_neg) {
  return ext_geq(mu_pos, nu_pos) && ext_geq(mu_neg, nu_neg);
}

std::vector<HalfspaceProbe> probe_halfspace(const HomogeneousMeasure& mu,
                                            const HomogeneousMeasure& nu, int grid) {
  require(mu.dim == nu.dim, "measure dimensions differ");
  const auto dirs = sphere_points(mu.dim, grid);
  std::vector<HalfspaceProbe> out;
  for (int k = 0; k < grid; ++k) {
    std::vector<double> b(dirs.begin() + k * static_cast<std::ptrdiff_t>(mu.dim),
                          dirs.begin() + (k + 1) * static_cast<std::ptrdiff_t>(mu.dim));
    const double m = mu.angular.cap_mass(b, 0.0);
    const double v = nu.angular.cap_mass(b, 0.0);
    out.push_back({std::move(b), m, v, m >= v});
  }
  return out;
}

}  // namespace zcoup
