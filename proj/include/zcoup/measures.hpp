/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zcoup/numerics.hpp"
#include "zcoup/point.hpp"
#include "zcoup/rng.hpp"

namespace zcoup {

/// Provenance of a finite proxy measure. All fields optional.
struct MeasureMeta {
  std::optional<double> truncation_radius;
  std::optional<std::size_t> sample_size;
  std::optional<std::uint64_t> seed;
  std::size_t dropped_atoms = 0;
  std::size_t balance_atoms = 0;
};

/// Weighted point cloud on R^d minus the origin, stored as flat coordinates.
class DiscreteMeasure {
 public:
  explicit DiscreteMeasure(std::size_t dim = 1);
  DiscreteMeasure(std::size_t dim, std::vector<double> coords, std::vector<double> weights);

  void add(ConstCoords x, double w);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  ConstCoords atom(std::size_t i) const { return {coords_.data() + i * dim_, dim_}; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& coords() const noexcept { return coords_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double total() const { return ordered_sum(weights_); }
  double max_norm() const;

  MeasureMeta meta;

  friend bool operator==(const DiscreteMeasure& a, const DiscreteMeasure& b) {
    return a.dim_ == b.dim_ && a.coords_ == b.coords_ && a.weights_ == b.weights_;
  }

 private:
  std::size_t dim_;
  std::vector<double> coords_;
  std::vector<double> weights_;
};

/// Named angular density. In d = 2 the density is a function of the polar
/// angle w.r.t. arc length and lives on the arc [arc_lo, arc_hi]; in d = 3
/// only the uniform density is available.
struct AngularDensity {
  std::size_t dim = 2;
  std::string spec;
  double arc_lo = 0.0;
  double arc_hi = 2.0 * kPi;
  std::function<double(double)> on_circle;

  /// Parse "uniform", "mu_quartic", "nu_quartic" or "cap:<center>:<halfwidth>".
  static AngularDensity named(std::size_t dim, const std::string& spec);

  /// Unscaled density at a unit vector.
  double at(ConstCoords u) const;
  /// Integral of the unscaled density over the sphere.
  double natural_mass() const;
};

/// Finite angular measure on the unit sphere: atoms or a scaled density.
class AngularLaw {
 public:
  struct Atoms {
    std::vector<double> directions;
    std::vector<double> weights;
  };

  static AngularLaw discrete(std::size_t dim, std::vector<double> directions,
                             std::vector<double> weights);
  static AngularLaw density(AngularDensity density, std::optional<double> total_mass,
                            int resolution = 256);

  std::size_t dim() const noexcept { return dim_; }
  bool is_discrete() const noexcept { return std::holds_alternative<Atoms>(repr_); }
  const Atoms& atoms() const { return std::get<Atoms>(repr_); }
  const AngularDensity& density_shape() const { return std::get<AngularDensity>(repr_); }
  double total_mass() const noexcept { return total_mass_; }
  int resolution() const noexcept { return resolution_; }
  std::string describe() const;

  /// Scaled density value at a unit vector (density kind only).
  double density_at(ConstCoords u) const;
  /// Mass of the open cap {u : <u, b/|b|> > eps}.
  double cap_mass(ConstCoords b, double eps) const;
  /// Grid of directions carrying positive angular mass.
  std::vector<std::vector<double>> support_grid(int grid) const;
  /// Angular cells: representative unit directions and their masses.
  void cells(int resolution, std::vector<double>& dirs, std::vector<double>& masses) const;
  /// Draw one unit direction from the normalised law.
  std::vector<double> sample(Rng& rng) const;

 private:
  std::size_t dim_ = 1;
  std::variant<Atoms, AngularDensity> repr_;
  double total_mass_ = 0.0;
  double density_scale_ = 1.0;
  double envelope_ = 0.0;
  int resolution_ = 256;
  std::vector<double> cdf_;
};

/// alpha-homogeneous measure: angular law times r^{-alpha-1} alpha dr.
struct HomogeneousMeasure {
  std::size_t dim = 1;
  double alpha = 1.0;
  AngularLaw angular;
  bool smooth = false;

  HomogeneousMeasure(double alpha_, AngularLaw angular_, bool smooth_ = false);
  double total_angular_mass() const noexcept { return angular.total_mass(); }
};

/// Open cone {x != 0 : <x/|x|, b> > eps}.
struct Cone {
  std::vector<double> direction;
  double eps;
  Cone(std::vector<double> b, double eps_);
};

struct ConeMass {
  bool infinite;
  double cap_mass;
};

double mass_annulus(const DiscreteMeasure& m, double r_lo, double r_hi);
double mass_annulus(const HomogeneousMeasure& m, double r_lo, double r_hi);
ConeMass mass_cone(const HomogeneousMeasure& m, const Cone& c);

enum class DiscretizeMode { Quadrature, MonteCarlo };

/// Finite proxy of m restricted to r_lo <= |x| < r_hi; r_hi may be +inf.
/// Quadrature: angular cells times `resolution` radial strata of equal mass.
/// Monte Carlo: `resolution` i.i.d. atoms.
DiscreteMeasure discretize(const HomogeneousMeasure& m, double r_lo, double r_hi,
                           DiscretizeMode mode, int resolution, std::uint64_t seed = 0);

struct TruncationParams {
  DiscretizeMode mode = DiscretizeMode::Quadrature;
  int resolution = 64;
  std::uint64_t seed = 0;
  /// Outer radius factor for homogeneous inputs: region is [1/n, outer*n).
  /// Infinite by default.
  double outer = kInf;
};

using MeasureRef = std::variant<const DiscreteMeasure*, const HomogeneousMeasure*>;

/// Restrict both measures to |x| >= 1/n and add the mass difference to the
/// lighter one on the sphere of radius 1/(2n).
std::pair<DiscreteMeasure, DiscreteMeasure> truncate_and_balance(MeasureRef mu, MeasureRef nu,
                                                                 int n,
                                                                 const TruncationParams& params);

/// `count` deterministic, roughly uniform unit vectors in R^dim.
std::vector<double> sphere_points(std::size_t dim, int count);

}  // namespace zcoup
