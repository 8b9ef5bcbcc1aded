/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "zcoup/io.hpp"
#include "zcoup/measures.hpp"
#include "zcoup/monotone.hpp"
#include "zcoup/proper.hpp"
#include "zcoup/transport.hpp"

namespace zcoup {

enum class RadialLaw { Pareto, ParetoLog };
enum class Transform { None, GradPsiQuartic };

/// Regularly varying probability law: X = R * Theta with R Pareto(alpha)
/// (optionally times a logarithmic factor) and Theta from a normalised
/// angular law, optionally pushed through a fixed order-1 homogeneous map.
struct RVModel {
  std::size_t dim;
  double alpha;
  AngularLaw angular;  // total mass 1
  RadialLaw radial = RadialLaw::Pareto;
  Transform transform = Transform::None;

  /// Measure config keys plus radial_slowly_varying (none|log) and
  /// transform (none|grad_psi_quartic). The angular law is normalised to mass 1.
  static RVModel from_config(const Config& cfg);

  std::vector<double> draw(Rng& rng) const;
  /// t^(1/alpha) when the radial law is exact Pareto.
  std::optional<double> closed_form_b(double t) const;
  /// The limit (exponent) measure of the untransformed law.
  HomogeneousMeasure exponent_measure() const;
};

/// n i.i.d. draws with weight 1/n each.
DiscreteMeasure sample(const RVModel& model, std::size_t n, std::uint64_t seed);

/// Empirical (1 - 1/t)-quantile of |X| from `count` calibration draws.
double calibrate_b(const RVModel& model, double t, std::size_t count, std::uint64_t seed);

/// Atoms divided by b, weights multiplied by t; atoms that land within
/// 1e-12 of the origin are dropped and counted in meta.dropped_atoms.
DiscreteMeasure rescaled_empirical(const DiscreteMeasure& s, double t, double b);

/// B(t) = diag(b1 1_d, b2 1_d) with exponents E = diag(1/alpha1, 1/alpha2).
struct ScalingMatrix {
  double b1, b2, alpha1, alpha2;
  /// Closed form b_i(t) = t^(1/alpha_i).
  static ScalingMatrix pareto(double t, double alpha1, double alpha2);
};

/// (x, y) -> (x / b1, y / b2).
SupportSet scaled_subdifferential(const SupportSet& s, double b1, double b2);

struct GradientHomogeneityReport {
  double max_grad_deviation;
  std::optional<double> max_value_deviation;
  bool holds;
};

using ValueMap = std::function<double(ConstCoords)>;

/// max |grad(l x) - l^(a1/a2) grad(x)| / max(1, |grad(x)|) over points and
/// lambdas; with a value map also |psi(l x) - l^(a1/a2 + 1) psi(x)| / max(1, |psi(x)|).
GradientHomogeneityReport check_gradient_homogeneity(const GradientMap& grad,
                                                     const ValueMap* value, double alpha1,
                                                     double alpha2,
                                                     const std::vector<std::vector<double>>& points,
                                                     const std::vector<double>& lambdas, double tol);

/// Product annulus {r_lo <= |x| < r_hi} x {s_lo <= |y| < s_hi}.
struct ProductAnnulus {
  double r_lo, r_hi, s_lo, s_hi;
};

double coupling_mass(const ZeroCoupling& g, const ProductAnnulus& a);

struct CouplingHomogeneityRow {
  double lambda;
  ProductAnnulus annulus;
  double scaled_mass;  // gamma(lambda^-E A)
  double expected;     // lambda gamma(A)
  double deviation;    // relative
};

struct CouplingHomogeneityReport {
  std::vector<CouplingHomogeneityRow> rows;
  double max_mass_deviation;
  std::optional<HomogeneousSupportReport> support;
  bool holds;
};

/// Mass part: gamma(lambda^-E A) against lambda gamma(A) within tol
/// (relative). Support part (skipped when support_tol is unset):
/// check_homogeneous_support with exponents (1/alpha1, 1/alpha2).
CouplingHomogeneityReport check_coupling_homogeneity(const ZeroCoupling& g, double alpha1,
                                                     double alpha2,
                                                     const std::vector<double>& lambdas,
                                                     const std::vector<ProductAnnulus>& annuli,
                                                     double tol,
                                                     std::optional<double> support_tol = {});

/// Window {r_lo <= |x| <= r_hi, |y| <= y_max} in R^d x R^d.
struct Window {
  double r_lo = 1.0;
  double r_hi = 3.0;
  double y_max = 6.0;
  bool contains(ConstCoords x, ConstCoords y) const;
};

SupportSet restrict_support(const SupportSet& s, const Window& w);

/// Symmetric Hausdorff distance between the window restrictions: 0 when
/// both are empty, +inf when exactly one is.
double fell_window_distance(const SupportSet& s, const SupportSet& t, const Window& w);

/// sum_k exp(-r_k) BL_k / (1 + BL_k), BL_k the largest discrepancy over a
/// fixed dictionary of smoothed annulus and cone indicators supported in
/// {|x| > r_k}.
double m0_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const std::vector<double>& r_grid);

/// Annulus r_lo <= |x| < r_hi, optionally intersected with a cone.
struct TestSet {
  double r_lo, r_hi;
  std::optional<Cone> cone;
};

struct PortmanteauReport {
  std::vector<std::vector<double>> errors;  // [set][sequence element]
  double last_max;
};

PortmanteauReport portmanteau_check(const std::vector<DiscreteMeasure>& seq,
                                    std::variant<const DiscreteMeasure*, const HomogeneousMeasure*> target,
                                    const std::vector<TestSet>& sets);

/// Restriction of a coupling to a window, as a measure on R^{2d} with
/// points (x, y) and weights scaled by `weight_scale` after dividing
/// coordinates by (b1, b2).
DiscreteMeasure coupling_window_measure(const ZeroCoupling& g, double b1, double b2,
                                        double weight_scale, const Window& w);

struct ExperimentConfig {
  RVModel p;
  RVModel q;
  std::size_t n = 20000;
  std::vector<double> t_grid;
  int seeds = 10;
  std::uint64_t master_seed = kDefaultMasterSeed;
  Window window;
  std::vector<double> r_grid = {1.0, 2.0, 4.0};
  int reference_resolution = 64;
};

struct ExperimentRow {
  double t;
  int seed;
  std::size_t n;
  double fell_dist;
  double m0_dist;
  double left_residual;
  double cost;
  std::size_t window_pairs;
};

struct ExperimentSummary {
  std::vector<double> t_grid;
  std::vector<double> median_fell;
  std::vector<double> median_m0;
  std::size_t reference_pairs;
  bool fell_non_increasing;
};

struct ExperimentResult {
  std::vector<ExperimentRow> rows;
  ExperimentSummary summary;
};

/// The reference limit coupling: both exponent measures discretised on
/// [r_lo / 2, 2 r_hi] of the window and solved with the reservoir.
ZeroCoupling reference_coupling(const RVModel& p, const RVModel& q, const Window& w,
                                int resolution);

ExperimentResult tail_coupling_experiment(const ExperimentConfig& cfg);

std::string format_experiment_csv(const std::vector<ExperimentRow>& rows);
Json experiment_summary_json(const ExperimentConfig& cfg, const ExperimentResult& res);

}  // namespace zcoup
