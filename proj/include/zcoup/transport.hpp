/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <vector>

#include "zcoup/measures.hpp"

namespace zcoup {

/// Index standing for the origin reservoir in coupling entries.
inline constexpr long kOrigin = -1;

struct CouplingEntry {
  long src;
  long dst;
  double mass;
  friend bool operator==(const CouplingEntry&, const CouplingEntry&) = default;
};

/// Sparse transport plan between two discrete measures, with the origin
/// acting as an extra source and sink of arbitrary mass.
struct ZeroCoupling {
  DiscreteMeasure sources;
  DiscreteMeasure targets;
  std::vector<CouplingEntry> entries;

  std::size_t dim() const noexcept { return sources.dim(); }
  /// Coordinates of an entry endpoint; empty span for the origin.
  ConstCoords src_point(const CouplingEntry& e) const;
  ConstCoords dst_point(const CouplingEntry& e) const;
};

/// Pairs (x, y) with a common dimension, stored flat.
class SupportSet {
 public:
  explicit SupportSet(std::size_t dim = 1) : dim_(dim) {}
  void add(ConstCoords x, ConstCoords y);
  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return xs_.size() / dim_; }
  ConstCoords x(std::size_t i) const { return {xs_.data() + i * dim_, dim_}; }
  ConstCoords y(std::size_t i) const { return {ys_.data() + i * dim_, dim_}; }
  friend bool operator==(const SupportSet&, const SupportSet&) = default;

 private:
  std::size_t dim_;
  std::vector<double> xs_, ys_;
};

struct MarginReport {
  double max_left_violation;
  double max_right_violation;
};

ZeroCoupling trivial_zero_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

struct SolveOptions {
  /// Dense instances up to this many source-target arcs skip column generation.
  std::size_t dense_limit = 250000;
  int neighbours = 20;
  int arcs_per_row = 16;
  /// Arcs added per pricing round before it ends early; 0 prices every row.
  std::size_t round_limit = 10000;
};

/// Minimum quadratic cost plan. With reservoir=true, two origin nodes and a
/// zero-cost slack arc make every instance feasible.
ZeroCoupling solve_zero_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 bool reservoir, const SolveOptions& opts = {});

struct BruteForceResult {
  double cost;
  ZeroCoupling coupling;
};

/// Exhaustive search over basic feasible solutions; (m+1)(n+1) <= 30.
BruteForceResult brute_force_min_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      bool reservoir);

double coupling_cost(const ZeroCoupling& g);
MarginReport check_margins(const ZeroCoupling& g);

/// Support pairs of the plan; origin endpoints become zero vectors. When
/// with_origin is set the pair (0, 0) is appended.
SupportSet coupling_support(const ZeroCoupling& g, bool with_origin);

}  // namespace zcoup
