/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "zcoup/measures.hpp"
#include "zcoup/point.hpp"

// Closed-form planar example: psi(x, y) = y^4 / x^2 on the open right
// half-plane, 0 at the origin and +inf elsewhere. Its gradient pushes the
// measure (cos t)^3 dt r^-2 dr on the right half-plane onto a measure on the
// left half-plane with angular density 64 |cos t|^3 / (1 + 3 cos^2 t)^3.

namespace zcoup {

struct PsiQuartic {
  double value;  // +inf outside the domain
  std::optional<std::array<double, 2>> grad;
};

PsiQuartic psi_quartic(double x, double y);

/// Gradient as a map on R^2; std::nullopt off the open right half-plane.
/// `scale` multiplies the output (1 for the exact map).
std::optional<std::vector<double>> grad_psi_quartic(ConstCoords p, double scale = 1.0);

double mu_quartic_density(double x, double y);
double nu_quartic_density(double u, double v);
/// Angular parts of the polar forms; the radial part is r^-2 dr for both.
double mu_quartic_angular(double theta);
double nu_quartic_angular(double theta);
inline constexpr double kMuQuarticAngularMass = 4.0 / 3.0;

/// Norm factor and image angle of the gradient along the ray at angle theta:
/// |grad psi(r, theta)| = r g(theta), arg grad psi = phi(theta) in (pi/2, 3pi/2).
double g_quartic(double theta);
double phi_quartic(double theta);
/// Inverse of phi_quartic on (pi/2, 3pi/2).
double theta_quartic(double phi);

/// Image-plane set {s_lo <= |y| < s_hi, phi_lo <= arg y < phi_hi}, with
/// arg y taken in [0, 2pi).
struct ImageSet {
  double s_lo, s_hi, phi_lo, phi_hi;
};

/// Exact mass that the gradient image of mu restricted to r_lo <= |x| < r_hi
/// puts on the set.
double pushed_mass_quartic(const ImageSet& set, double r_lo, double r_hi);

/// Closed-form nu mass of the set (nu over the whole punctured plane).
double nu_quartic_mass(const ImageSet& set);

/// The fixed dictionary of image sets used by the push-forward check.
std::vector<ImageSet> pushforward_dictionary();

struct PushforwardReport {
  int resolution;
  double tol;
  double max_rel_error;
  double total_mass;
  double right_half_mass;
  std::vector<std::array<double, 2>> masses;  // {empirical, exact} per set
  bool pass;
};

/// Discretise mu on [1, 10], push through the (optionally scaled) gradient,
/// compare the dictionary masses; errors are relative to the pushed total.
PushforwardReport verify_pushforward_quartic(int resolution, double tol, double grad_scale = 1.0);

struct OracleSuite {
  PushforwardReport push;
  double fd_max_error;
  double value_homogeneity_error;
  double grad_homogeneity_error;
  bool pass;
};

OracleSuite run_oracle_suite(int resolution, double tol, double grad_scale = 1.0);

/// The mu of the example as a homogeneous measure (alpha = 1).
HomogeneousMeasure mu_quartic_measure(int resolution = 256);
HomogeneousMeasure nu_quartic_measure(int resolution = 256);

}  // namespace zcoup
