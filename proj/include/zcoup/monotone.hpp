/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "zcoup/measures.hpp"
#include "zcoup/transport.hpp"

namespace zcoup {

/// Absolute tolerance used by the checks: tol * max(1, max|x| * max|y|).
double scaled_tolerance(const SupportSet& s, double tol);

struct MonotoneResult {
  bool ok;
  std::optional<std::pair<std::size_t, std::size_t>> witness;
};

/// Pairwise check <x_i - x_j, y_i - y_j> >= -tol (tol scaled as above).
MonotoneResult is_monotone(const SupportSet& s, double tol = 1e-9);

struct CyclicResult {
  bool ok;
  /// Indices i_0 -> i_1 -> ... -> i_{L-1} -> i_0 of a violating cycle.
  std::vector<std::size_t> cycle;
  /// Sum over the cycle of <x_i, y_i - y_next>; negative on failure.
  double cycle_value = 0.0;
  /// The scaled per-edge tolerance that was applied.
  double tolerance = 0.0;
};

/// Negative-cycle search on the complete digraph with edge weights
/// <x_i, y_i - y_j> + tol (tol scaled as above).
CyclicResult is_cyclically_monotone(const SupportSet& s, double tol = 1e-9);

/// Sum of <x_i, y_i - y_next> along a closed index cycle.
double cycle_value(const SupportSet& s, const std::vector<std::size_t>& cycle);

/// Finite convex potential: nodes x_i with values psi_i and subgradients g_i.
class DiscretePotential {
 public:
  explicit DiscretePotential(std::size_t dim = 1) : dim_(dim) {}

  void add_node(ConstCoords x, double psi, ConstCoords grad);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return psi_.size(); }
  ConstCoords x(std::size_t i) const { return {xs_.data() + i * dim_, dim_}; }
  double psi(std::size_t i) const { return psi_[i]; }
  ConstCoords grad(std::size_t i) const { return {gs_.data() + i * dim_, dim_}; }
  std::size_t base_index = 0;

  /// Max-affine extension L(x) = max_i psi_i + <x - x_i, g_i>.
  double value(ConstCoords x) const;
  /// Subgradient of L at x: g of the maximising node (smallest index on ties).
  ConstCoords gradient_at(ConstCoords x) const;
  /// max over i, j of psi_i + <x_j - x_i, g_i> - psi_j; <= 0 for a valid potential.
  double max_violation() const;

  friend bool operator==(const DiscretePotential&, const DiscretePotential&) = default;

 private:
  std::size_t dim_;
  std::vector<double> xs_, psi_, gs_;
};

/// Longest-chain potential psi_j = max over chains base -> ... -> j of
/// sum <y_k, x_{k+1} - x_k>, with grad_i = y_i. Throws NotCyclicallyMonotone
/// when the support admits no such potential at tolerance tol.
DiscretePotential rockafellar_potential(const SupportSet& s, std::size_t base_index,
                                        double tol = 1e-9);

/// Whether (x, v) can join the potential's subdifferential graph: with
/// psi(x) = L(x), every node inequality psi_j >= psi(x) + <x_j - x, v> holds
/// within tol.
bool subdifferential_contains(const DiscretePotential& p, ConstCoords x, ConstCoords v,
                              double tol);

/// Closed-form map; std::nullopt marks points outside its domain.
using GradientMap = std::function<std::optional<std::vector<double>>(ConstCoords)>;

struct PushForward {
  DiscreteMeasure measure;
  /// Mass of atoms whose image is exactly the origin.
  double origin_residual = 0.0;
};

PushForward push_forward(const DiscretePotential& p, const DiscreteMeasure& m);
/// Throws DomainViolation naming the first atom outside the map's domain.
PushForward push_forward(const GradientMap& map, const DiscreteMeasure& m);

}  // namespace zcoup
