/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "zcoup/error.hpp"

namespace zcoup {

using ConstCoords = std::span<const double>;

inline double dot(ConstCoords a, ConstCoords b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double norm2(ConstCoords a) { return dot(a, a); }
inline double norm(ConstCoords a) { return std::sqrt(norm2(a)); }

inline double dist2(ConstCoords a, ConstCoords b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

/// A point of R^d with finite coordinates.
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords) : coords_(std::move(coords)) { validate(); }
  Point(std::initializer_list<double> coords) : coords_(coords) { validate(); }
  explicit Point(ConstCoords coords) : coords_(coords.begin(), coords.end()) { validate(); }

  static Point zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t k) const { return coords_[k]; }
  ConstCoords coords() const noexcept { return coords_; }
  const std::vector<double>& vec() const noexcept { return coords_; }
  double norm() const { return zcoup::norm(coords_); }
  bool is_origin() const {
    for (double c : coords_)
      if (c != 0.0) return false;
    return true;
  }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  void validate() const {
    require(!coords_.empty(), "point must have at least one coordinate");
    for (double c : coords_) require(std::isfinite(c), "point coordinates must be finite");
  }

  std::vector<double> coords_;
};

}  // namespace zcoup
