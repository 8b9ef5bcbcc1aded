/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <optional>
#include <vector>

#include "zcoup/measures.hpp"
#include "zcoup/transport.hpp"

namespace zcoup {

struct ResidualDecomposition {
  /// Mass leaving the origin, i.e. gamma({0} x R^d).
  double left_residual = 0.0;
  /// Mass arriving at the origin, i.e. gamma(R^d x {0}).
  double right_residual = 0.0;
  /// Per target atom j: gamma({0} x {y_j}).
  std::vector<double> from_origin;
  /// Per source atom i: gamma({x_i} x {0}).
  std::vector<double> to_origin;
};

ResidualDecomposition residual_decomposition(const ZeroCoupling& g);

/// No mass leaves the origin: left_residual <= tol * total transported mass.
bool check_proper(const ZeroCoupling& g, double tol = 1e-9);

struct NecessaryReport {
  bool holds;
  std::optional<std::vector<double>> failing_direction;
};

/// For every nu support direction y some mu support direction x has
/// <x, y> > 0. Supports are the angular grids of both measures.
NecessaryReport check_necessary(const HomogeneousMeasure& mu, const HomogeneousMeasure& nu,
                                int grid = 64);

enum class ConeVerdict { Holds, Fails, Undetermined };

struct ConeDirection {
  std::vector<double> direction;
  ConeVerdict verdict;
  /// Largest grid aperture with an infinite-mass cone, when one exists.
  std::optional<double> eps;
  /// Angular mass of the open half-space around the direction.
  double halfspace_mass;
};

struct ConeReport {
  bool holds;
  std::vector<ConeDirection> directions;
};

inline const std::vector<double> kDefaultEpsGrid = {0.5, 0.25, 0.1, 0.05, 0.01};

/// For each nu support direction y look for eps in the grid with
/// mu(H(y, eps)) infinite. A direction whose open half-space carries no mu
/// mass fails outright; one that exhausts the grid is undetermined.
ConeReport check_cone_condition(const HomogeneousMeasure& mu, const HomogeneousMeasure& nu,
                                const std::vector<double>& eps_grid = kDefaultEpsGrid,
                                int grid = 64);

/// Homogeneous support test: for lambda in the grid and each pair, the
/// scaled pair (lambda^a x, lambda^b y) lies within tol of the set. Pairs
/// whose scaled x leaves the sampled radial range of the set are skipped.
struct HomogeneousSupportReport {
  bool holds;
  double max_distance;
  std::size_t checked;
};
HomogeneousSupportReport check_homogeneous_support(const SupportSet& s, double a, double b,
                                                   const std::vector<double>& lambdas, double tol);

/// Extended nonnegative real for one-dimensional masses.
struct ExtReal {
  bool infinite = false;
  double value = 0.0;
  static ExtReal inf() { return {true, 0.0}; }
  static ExtReal of(double v) { return {false, v}; }
};

/// ExtReal a >= b with infinity dominating every finite value.
bool ext_geq(ExtReal a, ExtReal b);

/// mu(R>0) >= nu(R>0) and mu(R<0) >= nu(R<0).
bool check_1d_criterion(ExtReal mu_pos, ExtReal mu_neg, ExtReal nu_pos, ExtReal nu_neg);

/// Experimental probe: compare mu and nu half-space masses over a grid of
/// directions. Never used as a decision.
struct HalfspaceProbe {
  std::vector<double> direction;
  double mu_mass;
  double nu_mass;
  bool mu_dominates;
};
std::vector<HalfspaceProbe> probe_halfspace(const HomogeneousMeasure& mu,
                                            const HomogeneousMeasure& nu, int grid = 64);

}  // namespace zcoup
