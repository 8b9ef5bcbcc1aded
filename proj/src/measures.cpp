/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/measures.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "zcoup/rng.hpp"

namespace zcoup {

namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kMassThreshold = 1e-12;

void check_atom(ConstCoords x, double w) {
  require(std::isfinite(w) && w > 0.0, "atom weight must be positive and finite");
  bool origin = true;
  for (double c : x) {
    require(std::isfinite(c), "atom coordinates must be finite");
    if (c != 0.0) origin = false;
  }
  require(!origin, "atom located at the origin");
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    fail(ErrorCode::Parse, "cannot parse " + what + ": '" + s + "'");
  }
  if (used != s.size()) fail(ErrorCode::Parse, "cannot parse " + what + ": '" + s + "'");
  return v;
}

std::vector<double> unit(ConstCoords b) {
  const double n = norm(b);
  require(n > 0.0 && std::isfinite(n), "direction must be nonzero");
  std::vector<double> u(b.begin(), b.end());
  for (double& c : u) c /= n;
  return u;
}

}  // namespace

// ---------------------------------------------------------------- discrete

DiscreteMeasure::DiscreteMeasure(std::size_t dim) : dim_(dim) {
  require(dim >= 1, "dimension must be positive");
}

DiscreteMeasure::DiscreteMeasure(std::size_t dim, std::vector<double> coords,
                                 std::vector<double> weights)
    : dim_(dim), coords_(std::move(coords)), weights_(std::move(weights)) {
  require(dim >= 1, "dimension must be positive");
  require(coords_.size() == weights_.size() * dim_, "coordinate count does not match weights");
  for (std::size_t i = 0; i < weights_.size(); ++i) check_atom(atom(i), weights_[i]);
}

void DiscreteMeasure::add(ConstCoords x, double w) {
  require(x.size() == dim_, "atom dimension mismatch");
  check_atom(x, w);
  coords_.insert(coords_.end(), x.begin(), x.end());
  weights_.push_back(w);
}

double DiscreteMeasure::max_norm() const {
  double m = 0.0;
  for (std::size_t i = 0; i < size(); ++i) m = std::max(m, norm(atom(i)));
  return m;
}

// ---------------------------------------------------------------- angular

AngularDensity AngularDensity::named(std::size_t dim, const std::string& spec) {
  AngularDensity d;
  d.dim = dim;
  d.spec = spec;
  require(dim >= 2, "angular densities need dim >= 2");
  if (spec == "uniform") {
    require(dim <= 3, "uniform angular density supported for dim 2 and 3");
    d.on_circle = [](double) { return 1.0; };
    return d;
  }
  if (dim != 2) fail(ErrorCode::InvalidArgument, "angular density '" + spec + "' needs dim 2");
  if (spec == "mu_quartic") {
    d.arc_lo = -0.5 * kPi;
    d.arc_hi = 0.5 * kPi;
    d.on_circle = [](double t) {
      const double c = std::cos(t);
      return c > 0.0 ? c * c * c : 0.0;
    };
  } else if (spec == "nu_quartic") {
    d.arc_lo = 0.5 * kPi;
    d.arc_hi = 1.5 * kPi;
    d.on_circle = [](double t) {
      const double c = std::cos(t);
      if (c >= 0.0) return 0.0;
      const double q = 1.0 + 3.0 * c * c;
      return -64.0 * c * c * c / (q * q * q);
    };
  } else if (spec.rfind("cap:", 0) == 0) {
    const auto second = spec.find(':', 4);
    if (second == std::string::npos) fail(ErrorCode::Parse, "cap spec needs cap:<center>:<halfwidth>");
    const double center = parse_double(spec.substr(4, second - 4), "cap center");
    const double half = parse_double(spec.substr(second + 1), "cap halfwidth");
    require(half > 0.0 && half <= kPi, "cap halfwidth must lie in (0, pi]");
    d.arc_lo = center - half;
    d.arc_hi = center + half;
    d.on_circle = [](double) { return 1.0; };
  } else {
    fail(ErrorCode::Parse, "unknown angular density '" + spec + "'");
  }
  return d;
}

double AngularDensity::at(ConstCoords u) const {
  if (dim == 3) return 1.0;
  const double theta = std::atan2(u[1], u[0]);
  double shifted = std::fmod(theta - arc_lo, kTwoPi);
  if (shifted < 0.0) shifted += kTwoPi;
  if (arc_lo + shifted > arc_hi) return 0.0;
  return on_circle(arc_lo + shifted);
}

double AngularDensity::natural_mass() const {
  if (dim == 3) return 4.0 * kPi;
  return adaptive_simpson(on_circle, arc_lo, arc_hi, 1e-13);
}

AngularLaw AngularLaw::discrete(std::size_t dim, std::vector<double> directions,
                                std::vector<double> weights) {
  require(dim >= 1, "dimension must be positive");
  require(!weights.empty(), "discrete angular law needs at least one atom");
  require(directions.size() == weights.size() * dim, "angular atom size mismatch");
  AngularLaw law;
  law.dim_ = dim;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(std::isfinite(weights[i]) && weights[i] > 0.0, "angular weight must be positive");
    const auto u = unit({directions.data() + i * dim, dim});
    std::copy(u.begin(), u.end(), directions.begin() + static_cast<std::ptrdiff_t>(i * dim));
  }
  law.total_mass_ = ordered_sum(weights);
  double acc = 0.0;
  for (double w : weights) {
    acc += w;
    law.cdf_.push_back(acc / law.total_mass_);
  }
  law.repr_ = Atoms{std::move(directions), std::move(weights)};
  return law;
}

AngularLaw AngularLaw::density(AngularDensity shape, std::optional<double> total_mass,
                               int resolution) {
  require(resolution >= 1, "resolution must be >= 1");
  AngularLaw law;
  law.dim_ = shape.dim;
  law.resolution_ = resolution;
  const double natural = shape.natural_mass();
  law.total_mass_ = total_mass.value_or(natural);
  require(std::isfinite(law.total_mass_) && law.total_mass_ > 0.0,
          "angular mass must be positive");
  law.density_scale_ = law.total_mass_ / natural;
  if (shape.dim == 2) {
    constexpr int kGrid = 4096;
    double peak = 0.0;
    for (int k = 0; k <= kGrid; ++k)
      peak = std::max(peak, shape.on_circle(shape.arc_lo + (shape.arc_hi - shape.arc_lo) * k / kGrid));
    law.envelope_ = 1.05 * peak;
  }
  law.repr_ = std::move(shape);
  return law;
}

std::string AngularLaw::describe() const {
  std::ostringstream os;
  if (is_discrete()) {
    os << "discrete(" << atoms().weights.size() << " atoms)";
  } else {
    os << "density(" << density_shape().spec << ")";
  }
  return os.str();
}

double AngularLaw::density_at(ConstCoords u) const {
  require(!is_discrete(), "density_at on a discrete angular law");
  return density_scale_ * density_shape().at(u);
}

double AngularLaw::cap_mass(ConstCoords b, double eps) const {
  require(b.size() == dim_, "cone direction dimension mismatch");
  const auto bh = unit(b);
  if (is_discrete()) {
    const auto& a = atoms();
    double m = 0.0;
    for (std::size_t i = 0; i < a.weights.size(); ++i)
      if (dot({a.directions.data() + i * dim_, dim_}, bh) > eps) m += a.weights[i];
    return m;
  }
  if (eps <= -1.0) return total_mass_;
  if (eps >= 1.0) return 0.0;
  const auto& shape = density_shape();
  if (dim_ == 3) return density_scale_ * 2.0 * kPi * (1.0 - eps);
  const double beta = std::atan2(bh[1], bh[0]);
  const double half = std::acos(eps);
  double m = 0.0;
  for (int k = -2; k <= 2; ++k) {
    const double lo = std::max(shape.arc_lo, beta - half + k * kTwoPi);
    const double hi = std::min(shape.arc_hi, beta + half + k * kTwoPi);
    if (hi > lo) m += adaptive_simpson(shape.on_circle, lo, hi, 1e-13);
  }
  return density_scale_ * m;
}

std::vector<std::vector<double>> AngularLaw::support_grid(int grid) const {
  std::vector<std::vector<double>> out;
  if (is_discrete()) {
    const auto& a = atoms();
    for (std::size_t i = 0; i < a.weights.size(); ++i)
      if (a.weights[i] > kMassThreshold)
        out.emplace_back(a.directions.begin() + static_cast<std::ptrdiff_t>(i * dim_),
                         a.directions.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_));
    return out;
  }
  require(grid >= 1, "grid size must be >= 1");
  if (dim_ == 3) {
    const auto pts = sphere_points(3, grid);
    for (int k = 0; k < grid; ++k) out.emplace_back(pts.begin() + 3 * k, pts.begin() + 3 * k + 3);
    return out;
  }
  const auto& shape = density_shape();
  const double h = (shape.arc_hi - shape.arc_lo) / grid;
  for (int k = 0; k < grid; ++k) {
    const double t = shape.arc_lo + (k + 0.5) * h;
    if (density_scale_ * shape.on_circle(t) > kMassThreshold)
      out.push_back({std::cos(t), std::sin(t)});
  }
  return out;
}

void AngularLaw::cells(int resolution, std::vector<double>& dirs,
                       std::vector<double>& masses) const {
  require(resolution >= 1, "resolution must be >= 1");
  dirs.clear();
  masses.clear();
  if (is_discrete()) {
    dirs = atoms().directions;
    masses = atoms().weights;
    return;
  }
  if (dim_ == 3) {
    const double cell = total_mass_ / (static_cast<double>(resolution) * resolution);
    for (int band = 0; band < resolution; ++band) {
      const double z = -1.0 + 2.0 * (band + 0.5) / resolution;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      for (int sector = 0; sector < resolution; ++sector) {
        const double phi = kTwoPi * (sector + 0.5) / resolution;
        dirs.insert(dirs.end(), {rho * std::cos(phi), rho * std::sin(phi), z});
        masses.push_back(cell);
      }
    }
    return;
  }
  const auto& shape = density_shape();
  const double h = (shape.arc_hi - shape.arc_lo) / resolution;
  std::vector<double> raw(static_cast<std::size_t>(resolution));
  for (int k = 0; k < resolution; ++k) {
    const double lo = shape.arc_lo + k * h;
    const double hi = (k + 1 == resolution) ? shape.arc_hi : shape.arc_lo + (k + 1) * h;
    raw[static_cast<std::size_t>(k)] = adaptive_simpson(shape.on_circle, lo, hi, 1e-14);
  }
  // Renormalise so the cells carry the exact total.
  const double sum = ordered_sum(raw);
  for (int k = 0; k < resolution; ++k) {
    const double m = raw[static_cast<std::size_t>(k)] * (total_mass_ / sum);
    if (!(m > 0.0)) continue;
    const double t = shape.arc_lo + (k + 0.5) * h;
    dirs.insert(dirs.end(), {std::cos(t), std::sin(t)});
    masses.push_back(m);
  }
}

std::vector<double> AngularLaw::sample(Rng& rng) const {
  if (is_discrete()) {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const std::size_t i =
        std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    const auto& d = atoms().directions;
    return {d.begin() + static_cast<std::ptrdiff_t>(i * dim_),
            d.begin() + static_cast<std::ptrdiff_t>((i + 1) * dim_)};
  }
  if (dim_ == 3) {
    for (;;) {
      std::vector<double> v{rng.normal(), rng.normal(), rng.normal()};
      const double n = norm(v);
      if (n > 1e-300) {
        for (double& c : v) c /= n;
        return v;
      }
    }
  }
  const auto& shape = density_shape();
  for (;;) {
    const double t = shape.arc_lo + (shape.arc_hi - shape.arc_lo) * rng.uniform01();
    if (rng.uniform01() * envelope_ < shape.on_circle(t)) return {std::cos(t), std::sin(t)};
  }
}

// ---------------------------------------------------------------- homogeneous

HomogeneousMeasure::HomogeneousMeasure(double alpha_, AngularLaw angular_, bool smooth_)
    : dim(angular_.dim()), alpha(alpha_), angular(std::move(angular_)), smooth(smooth_) {
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
  require(!smooth || (!angular.is_discrete() && dim >= 2),
          "smooth flag requires a density angular part with dim >= 2");
}

Cone::Cone(std::vector<double> b, double eps_) : direction(std::move(b)), eps(eps_) {
  require(!direction.empty() && norm(direction) > 0.0, "cone direction must be nonzero");
  require(eps > 0.0 && eps < 1.0, "cone aperture must lie in (0, 1)");
}

double mass_annulus(const DiscreteMeasure& m, double r_lo, double r_hi) {
  require(r_lo > 0.0, "annulus must be bounded away from the origin");
  require(r_lo <= r_hi, "annulus needs r_lo <= r_hi");
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double r = norm(m.atom(i));
    if (r >= r_lo && r < r_hi) s += m.weight(i);
  }
  return s;
}

double mass_annulus(const HomogeneousMeasure& m, double r_lo, double r_hi) {
  require(r_lo > 0.0, "annulus must be bounded away from the origin");
  require(r_lo <= r_hi, "annulus needs r_lo <= r_hi");
  const double hi = std::isinf(r_hi) ? 0.0 : std::pow(r_hi, -m.alpha);
  return m.total_angular_mass() * (std::pow(r_lo, -m.alpha) - hi);
}

ConeMass mass_cone(const HomogeneousMeasure& m, const Cone& c) {
  const double cap = m.angular.cap_mass(c.direction, c.eps);
  return {cap > kMassThreshold, cap};
}

DiscreteMeasure discretize(const HomogeneousMeasure& m, double r_lo, double r_hi,
                           DiscretizeMode mode, int resolution, std::uint64_t seed) {
  require(resolution >= 1, "resolution must be >= 1");
  require(r_lo > 0.0 && std::isfinite(r_lo), "r_lo must be positive and finite");
  require(r_hi > r_lo, "discretize needs r_lo < r_hi");
  const double u_lo = std::pow(r_lo, -m.alpha);
  const double u_hi = std::isinf(r_hi) ? 0.0 : std::pow(r_hi, -m.alpha);
  const double band = u_lo - u_hi;
  DiscreteMeasure out(m.dim);
  out.meta.truncation_radius = r_lo;
  std::vector<double> x(m.dim);
  auto emit = [&](ConstCoords dir, double u, double w) {
    const double r = std::pow(u, -1.0 / m.alpha);
    for (std::size_t k = 0; k < m.dim; ++k) x[k] = r * dir[k];
    out.add(x, w);
  };
  if (mode == DiscretizeMode::Quadrature) {
    std::vector<double> dirs, masses;
    m.angular.cells(resolution, dirs, masses);
    const double du = band / resolution;
    for (std::size_t j = 0; j < masses.size(); ++j) {
      const ConstCoords dir{dirs.data() + j * m.dim, m.dim};
      // Stagger the node inside each radial stratum from one angular cell to
      // the next so that images of the grid do not line up.
      const double q = golden_offset(j);
      const double w = masses[j] * du;
      for (int k = 0; k < resolution; ++k) emit(dir, u_lo - (k + q) * du, w);
    }
    return out;
  }
  Rng rng(seed);
  const double w = m.total_angular_mass() * band / resolution;
  for (int k = 0; k < resolution; ++k) {
    const auto dir = m.angular.sample(rng);
    emit(dir, u_lo - rng.uniform01() * band, w);
  }
  out.meta.sample_size = static_cast<std::size_t>(resolution);
  out.meta.seed = seed;
  return out;
}

std::vector<double> sphere_points(std::size_t dim, int count) {
  require(count >= 1, "point count must be >= 1");
  std::vector<double> pts;
  pts.reserve(dim * static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    if (dim == 1) {
      pts.push_back(k % 2 == 0 ? 1.0 : -1.0);
    } else if (dim == 2) {
      const double t = kTwoPi * (k + 0.5) / count;
      pts.insert(pts.end(), {std::cos(t), std::sin(t)});
    } else {
      // Fibonacci lattice on S^2, padded with zeros for dim > 3.
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = kPi * (3.0 - std::sqrt(5.0)) * k;
      pts.insert(pts.end(), {rho * std::cos(phi), rho * std::sin(phi), z});
      for (std::size_t extra = 3; extra < dim; ++extra) pts.push_back(0.0);
    }
  }
  return pts;
}

namespace {

DiscreteMeasure truncate_one(MeasureRef m, int n, const TruncationParams& p) {
  const double r_min = 1.0 / n;
  if (const auto* d = std::get_if<const DiscreteMeasure*>(&m)) {
    const DiscreteMeasure& src = **d;
    DiscreteMeasure out(src.dim());
    for (std::size_t i = 0; i < src.size(); ++i)
      if (norm(src.atom(i)) > r_min) out.add(src.atom(i), src.weight(i));
    out.meta = src.meta;
    out.meta.truncation_radius = r_min;
    return out;
  }
  const HomogeneousMeasure& h = *std::get<const HomogeneousMeasure*>(m);
  const double r_hi = std::isinf(p.outer) ? kInf : p.outer * n;
  return discretize(h, r_min, r_hi, p.mode, p.resolution, p.seed);
}

std::size_t dim_of(MeasureRef m) {
  if (const auto* d = std::get_if<const DiscreteMeasure*>(&m)) return (*d)->dim();
  return std::get<const HomogeneousMeasure*>(m)->dim;
}

}  // namespace

std::pair<DiscreteMeasure, DiscreteMeasure> truncate_and_balance(MeasureRef mu, MeasureRef nu,
                                                                 int n,
                                                                 const TruncationParams& params) {
  require(n >= 1, "truncation index n must be >= 1");
  require(dim_of(mu) == dim_of(nu), "measure dimensions differ");
  DiscreteMeasure a = truncate_one(mu, n, params);
  DiscreteMeasure b = truncate_one(nu, n, params);
  const double ta = a.total();
  const double tb = b.total();
  if (a.empty() && b.empty())
    fail(ErrorCode::EmptyTruncation, "empty truncation: both measures vanish on |x| > 1/n");
  if (ta == tb) return {std::move(a), std::move(b)};

  DiscreteMeasure& light = ta < tb ? a : b;
  const double target = std::max(ta, tb);
  const double delta = target - std::min(ta, tb);
  const std::size_t dim = light.dim();
  const int count = dim == 1 ? 2 : std::max(1, params.resolution);
  const auto dirs = sphere_points(dim, count);
  const double radius = 0.5 / n;
  std::vector<double> x(dim);
  auto place = [&](int k, double w) {
    for (std::size_t c = 0; c < dim; ++c) x[c] = radius * dirs[static_cast<std::size_t>(k) * dim + c];
    light.add(x, w);
  };
  for (int k = 0; k + 1 < count; ++k) place(k, delta / count);
  // The last atom absorbs rounding so both totals agree bit for bit.
  const double head = light.total();
  double w = target - head;
  for (int iter = 0; iter < 64 && head + w != target; ++iter)
    w = std::nextafter(w, head + w < target ? kInf : -kInf);
  place(count - 1, w);
  light.meta.balance_atoms = static_cast<std::size_t>(count);
  if (light.total() != target) fail(ErrorCode::Internal, "balance mass bookkeeping failed");
  return {std::move(a), std::move(b)};
}

}  // namespace zcoup
