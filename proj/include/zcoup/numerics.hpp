/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>

namespace zcoup {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

/// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, int max_depth = 48);

/// Left-to-right sum. All mass totals in the library go through this so that
/// equal inputs give bit-identical totals.
inline double ordered_sum(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

/// Fractional part of 0.5 + k * (golden ratio conjugate); a low-discrepancy
/// offset in [0, 1) used to stagger radial quadrature nodes between cells.
double golden_offset(std::uint64_t k);

/// Median of a copy of xs (mean of the two middle values for even sizes).
double median(std::span<const double> xs);

}  // namespace zcoup
