/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/regvar.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include "zcoup/oracle.hpp"

namespace zcoup {

namespace {

double ramp(double v) { return std::clamp(v, 0.0, 1.0); }

std::vector<double> scaled_copy(ConstCoords x, double inv) {
  std::vector<double> out(x.begin(), x.end());
  for (double& c : out) c *= inv;
  return out;
}

}  // namespace

// ------------------------------------------------------------------ models

RVModel RVModel::from_config(const Config& cfg) {
  const std::string slow = config_string(cfg, "radial_slowly_varying", std::string("none"));
  const std::string tf = config_string(cfg, "transform", std::string("none"));
  Config base = cfg;
  base.erase("radial_slowly_varying");
  base.erase("transform");
  // The law is a probability, so the angular part always has mass 1.
  base.erase("angular_mass");
  const HomogeneousMeasure h = homogeneous_from_config(base);
  AngularLaw law = h.angular;
  if (law.is_discrete()) {
    auto w = law.atoms().weights;
    const double tot = ordered_sum(w);
    for (double& x : w) x /= tot;
    law = AngularLaw::discrete(h.dim, law.atoms().directions, w);
  } else {
    law = AngularLaw::density(law.density_shape(), 1.0, law.resolution());
  }
  RVModel m{h.dim, h.alpha, std::move(law)};
  if (slow == "log") {
    m.radial = RadialLaw::ParetoLog;
  } else if (slow != "none") {
    fail(ErrorCode::Parse, "radial_slowly_varying must be none or log");
  }
  if (tf == "grad_psi_quartic") {
    if (m.dim != 2) fail(ErrorCode::Parse, "transform grad_psi_quartic needs dim 2");
    m.transform = Transform::GradPsiQuartic;
  } else if (tf != "none") {
    fail(ErrorCode::Parse, "transform must be none or grad_psi_quartic");
  }
  return m;
}

std::vector<double> RVModel::draw(Rng& rng) const {
  auto dir = angular.sample(rng);
  double r = std::pow(rng.uniform_open0(), -1.0 / alpha);
  if (radial == RadialLaw::ParetoLog) r *= std::pow(1.0 + std::log(r), 1.0 / alpha);
  for (double& c : dir) c *= r;
  if (transform == Transform::GradPsiQuartic) {
    auto y = grad_psi_quartic(dir);
    if (!y) fail(ErrorCode::DomainViolation, "sampled point outside the transform's domain");
    return std::move(*y);
  }
  return dir;
}

std::optional<double> RVModel::closed_form_b(double t) const {
  if (radial != RadialLaw::Pareto) return std::nullopt;
  return std::pow(t, 1.0 / alpha);
}

HomogeneousMeasure RVModel::exponent_measure() const { return HomogeneousMeasure(alpha, angular); }

DiscreteMeasure sample(const RVModel& model, std::size_t n, std::uint64_t seed) {
  require(n >= 1, "sample size must be >= 1");
  Rng rng(seed);
  DiscreteMeasure out(model.dim);
  const double w = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out.add(model.draw(rng), w);
  out.meta.sample_size = n;
  out.meta.seed = seed;
  return out;
}

double calibrate_b(const RVModel& model, double t, std::size_t count, std::uint64_t seed) {
  require(t >= 1.0, "t must be >= 1");
  require(count >= 1, "calibration sample must be nonempty");
  Rng rng(seed);
  std::vector<double> radii(count);
  for (auto& r : radii) r = norm(model.draw(rng));
  std::sort(radii.begin(), radii.end());
  const double q = 1.0 - 1.0 / t;
  const auto k = static_cast<long>(std::ceil(q * static_cast<double>(count))) - 1;
  return radii[static_cast<std::size_t>(std::clamp(k, 0L, static_cast<long>(count) - 1))];
}

DiscreteMeasure rescaled_empirical(const DiscreteMeasure& s, double t, double b) {
  require(t > 0.0 && b > 0.0, "t and b must be positive");
  DiscreteMeasure out(s.dim());
  out.meta = s.meta;
  out.meta.dropped_atoms = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto x = scaled_copy(s.atom(i), 1.0 / b);
    if (norm(x) < 1e-12) {
      ++out.meta.dropped_atoms;
      continue;
    }
    out.add(x, s.weight(i) * t);
  }
  return out;
}

ScalingMatrix ScalingMatrix::pareto(double t, double alpha1, double alpha2) {
  require(t > 0.0 && alpha1 > 0.0 && alpha2 > 0.0, "scaling parameters must be positive");
  return {std::pow(t, 1.0 / alpha1), std::pow(t, 1.0 / alpha2), alpha1, alpha2};
}

SupportSet scaled_subdifferential(const SupportSet& s, double b1, double b2) {
  require(b1 > 0.0 && b2 > 0.0, "scaling factors must be positive");
  SupportSet out(s.dim());
  for (std::size_t i = 0; i < s.size(); ++i)
    out.add(scaled_copy(s.x(i), 1.0 / b1), scaled_copy(s.y(i), 1.0 / b2));
  return out;
}

// ------------------------------------------------------------ homogeneity

GradientHomogeneityReport check_gradient_homogeneity(const GradientMap& grad,
                                                     const ValueMap* value, double alpha1,
                                                     double alpha2,
                                                     const std::vector<std::vector<double>>& points,
                                                     const std::vector<double>& lambdas, double tol) {
  require(alpha1 > 0.0 && alpha2 > 0.0, "tail indices must be positive");
  const double order = alpha1 / alpha2;
  GradientHomogeneityReport rep{0.0, std::nullopt, false};
  if (value) rep.max_value_deviation = 0.0;
  auto eval = [&](const std::vector<double>& x) {
    auto g = grad(x);
    if (!g) fail(ErrorCode::DomainViolation, "point outside the gradient's domain");
    return std::move(*g);
  };
  for (const auto& x : points) {
    const auto g = eval(x);
    for (double lam : lambdas) {
      require(lam > 0.0, "scaling factors must be positive");
      const auto lx = scaled_copy(x, lam);
      const auto gl = eval(lx);
      const double f = std::pow(lam, order);
      double dev = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) dev += (gl[k] - f * g[k]) * (gl[k] - f * g[k]);
      rep.max_grad_deviation = std::max(rep.max_grad_deviation, std::sqrt(dev) / std::max(1.0, norm(g)));
      if (value) {
        const double v = (*value)(x);
        const double vl = (*value)(lx);
        const double want = std::pow(lam, order + 1.0) * v;
        *rep.max_value_deviation =
            std::max(*rep.max_value_deviation, std::abs(vl - want) / std::max(1.0, std::abs(v)));
      }
    }
  }
  rep.holds = rep.max_grad_deviation <= tol && (!value || *rep.max_value_deviation <= tol);
  return rep;
}

double coupling_mass(const ZeroCoupling& g, const ProductAnnulus& a) {
  std::vector<double> hit;
  for (const auto& e : g.entries) {
    const double rx = e.src == kOrigin ? 0.0 : norm(g.src_point(e));
    const double ry = e.dst == kOrigin ? 0.0 : norm(g.dst_point(e));
    if (rx >= a.r_lo && rx < a.r_hi && ry >= a.s_lo && ry < a.s_hi) hit.push_back(e.mass);
  }
  return ordered_sum(hit);
}

CouplingHomogeneityReport check_coupling_homogeneity(const ZeroCoupling& g, double alpha1,
                                                     double alpha2,
                                                     const std::vector<double>& lambdas,
                                                     const std::vector<ProductAnnulus>& annuli,
                                                     double tol, std::optional<double> support_tol) {
  require(!g.entries.empty(), "coupling is empty");
  require(alpha1 > 0.0 && alpha2 > 0.0, "tail indices must be positive");
  CouplingHomogeneityReport rep{{}, 0.0, std::nullopt, false};
  for (double lam : lambdas) {
    require(lam > 0.0, "scaling factors must be positive");
    const double fx = std::pow(lam, -1.0 / alpha1);
    const double fy = std::pow(lam, -1.0 / alpha2);
    for (const auto& a : annuli) {
      const ProductAnnulus scaled{a.r_lo * fx, a.r_hi * fx, a.s_lo * fy, a.s_hi * fy};
      const double got = coupling_mass(g, scaled);
      const double want = lam * coupling_mass(g, a);
      double dev = 0.0;
      if (want > 0.0) {
        dev = std::abs(got - want) / want;
      } else if (got > 0.0) {
        dev = kInf;
      }
      rep.rows.push_back({lam, a, got, want, dev});
      rep.max_mass_deviation = std::max(rep.max_mass_deviation, dev);
    }
  }
  bool support_ok = true;
  if (support_tol) {
    rep.support = check_homogeneous_support(coupling_support(g, false), 1.0 / alpha1, 1.0 / alpha2,
                                            lambdas, *support_tol);
    support_ok = rep.support->holds;
  }
  rep.holds = rep.max_mass_deviation <= tol && support_ok;
  return rep;
}

// -------------------------------------------------------------- distances

bool Window::contains(ConstCoords x, ConstCoords y) const {
  const double r = norm(x);
  return r >= r_lo && r <= r_hi && norm(y) <= y_max;
}

SupportSet restrict_support(const SupportSet& s, const Window& w) {
  SupportSet out(s.dim());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (w.contains(s.x(i), s.y(i))) out.add(s.x(i), s.y(i));
  return out;
}

double fell_window_distance(const SupportSet& s, const SupportSet& t, const Window& w) {
  require(s.dim() == t.dim(), "support dimensions differ");
  const auto a = restrict_support(s, w);
  const auto b = restrict_support(t, w);
  if (a.size() == 0 && b.size() == 0) return 0.0;
  if (a.size() == 0 || b.size() == 0) return kInf;
  auto directed = [](const SupportSet& p, const SupportSet& q) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      double best = kInf;
      for (std::size_t j = 0; j < q.size() && best > worst; ++j)
        best = std::min(best, dist2(p.x(i), q.x(j)) + dist2(p.y(i), q.y(j)));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::sqrt(std::max(directed(a, b), directed(b, a)));
}

double m0_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                   const std::vector<double>& r_grid) {
  require(mu.dim() == nu.dim(), "measure dimensions differ");
  require(!r_grid.empty(), "radius grid is empty");
  for (std::size_t k = 0; k < r_grid.size(); ++k)
    require(r_grid[k] > 0.0 && (k == 0 || r_grid[k] > r_grid[k - 1]),
            "radius grid must be positive and increasing");
  const std::size_t d = mu.dim();

  // Cone axes: +-e_k and the diagonals (+-e_k +- e_l) / sqrt 2.
  std::vector<std::vector<double>> axes;
  for (std::size_t k = 0; k < d; ++k)
    for (double sgn : {1.0, -1.0}) {
      std::vector<double> e(d, 0.0);
      e[k] = sgn;
      axes.push_back(std::move(e));
    }
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t l = k + 1; l < d; ++l)
      for (double sk : {1.0, -1.0})
        for (double sl : {1.0, -1.0}) {
          std::vector<double> e(d, 0.0);
          e[k] = sk / std::sqrt(2.0);
          e[l] = sl / std::sqrt(2.0);
          axes.push_back(std::move(e));
        }
  constexpr std::array<double, 6> kShells = {1.0, 1.5, 2.0, 3.0, 5.0, 10.0};

  auto integrals = [&](const DiscreteMeasure& m, double r) {
    const double h = r / 10.0;
    std::vector<double> acc(kShells.size() + axes.size(), 0.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto x = m.atom(i);
      const double rho = norm(x);
      if (!(rho > r)) continue;
      const double w = m.weight(i);
      for (std::size_t s = 0; s < kShells.size(); ++s) acc[s] += w * ramp((rho - kShells[s] * r) / h);
      const double radial = ramp((rho - r) / h);
      for (std::size_t a = 0; a < axes.size(); ++a) {
        const double c = dot(x, axes[a]) / rho;
        acc[kShells.size() + a] += w * radial * ramp((c - 0.5) / 0.1);
      }
    }
    return acc;
  };

  double total = 0.0;
  for (double r : r_grid) {
    const auto a = integrals(mu, r);
    const auto b = integrals(nu, r);
    double bl = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) bl = std::max(bl, std::abs(a[k] - b[k]));
    total += std::exp(-r) * bl / (1.0 + bl);
  }
  return total;
}

PortmanteauReport portmanteau_check(const std::vector<DiscreteMeasure>& seq,
                                    std::variant<const DiscreteMeasure*, const HomogeneousMeasure*> target,
                                    const std::vector<TestSet>& sets) {
  for (const auto& s : sets) {
    require(s.r_lo > 0.0, "test sets must be bounded away from the origin");
    require(s.r_lo <= s.r_hi, "test set needs r_lo <= r_hi");
  }
  auto discrete_mass = [](const DiscreteMeasure& m, const TestSet& s) {
    std::vector<double> hit;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const auto x = m.atom(i);
      const double r = norm(x);
      if (r < s.r_lo || r >= s.r_hi) continue;
      if (s.cone && !(dot(x, s.cone->direction) / (r * norm(s.cone->direction)) > s.cone->eps)) continue;
      hit.push_back(m.weight(i));
    }
    return ordered_sum(hit);
  };
  std::vector<double> exact;
  for (const auto& s : sets) {
    if (const auto* d = std::get_if<const DiscreteMeasure*>(&target)) {
      exact.push_back(discrete_mass(**d, s));
    } else {
      const HomogeneousMeasure& h = *std::get<const HomogeneousMeasure*>(target);
      const double radial = mass_annulus(h, s.r_lo, s.r_hi) / h.total_angular_mass();
      const double ang = s.cone ? h.angular.cap_mass(s.cone->direction, s.cone->eps) : h.total_angular_mass();
      exact.push_back(radial * ang);
    }
  }
  PortmanteauReport rep{{}, 0.0};
  for (std::size_t k = 0; k < sets.size(); ++k) {
    std::vector<double> errs;
    for (const auto& m : seq) errs.push_back(std::abs(discrete_mass(m, sets[k]) - exact[k]));
    if (!errs.empty()) rep.last_max = std::max(rep.last_max, errs.back());
    rep.errors.push_back(std::move(errs));
  }
  return rep;
}

DiscreteMeasure coupling_window_measure(const ZeroCoupling& g, double b1, double b2,
                                        double weight_scale, const Window& w) {
  require(w.r_lo > 0.0, "window must avoid the origin");
  const std::size_t d = g.dim();
  DiscreteMeasure out(2 * d);
  std::vector<double> p(2 * d);
  for (const auto& e : g.entries) {
    std::fill(p.begin(), p.end(), 0.0);
    if (e.src != kOrigin)
      for (std::size_t k = 0; k < d; ++k) p[k] = g.src_point(e)[k] / b1;
    if (e.dst != kOrigin)
      for (std::size_t k = 0; k < d; ++k) p[d + k] = g.dst_point(e)[k] / b2;
    if (w.contains({p.data(), d}, {p.data() + d, d})) out.add(p, e.mass * weight_scale);
  }
  return out;
}

// ------------------------------------------------------------- experiment

ZeroCoupling reference_coupling(const RVModel& p, const RVModel& q, const Window& w,
                                int resolution) {
  require(p.dim == q.dim, "model dimensions differ");
  const double lo = 0.5 * w.r_lo, hi = 2.0 * w.r_hi;
  const auto mu = discretize(p.exponent_measure(), lo, hi, DiscretizeMode::Quadrature, resolution);
  DiscreteMeasure nu = discretize(q.exponent_measure(), lo, hi, DiscretizeMode::Quadrature, resolution);
  if (q.transform == Transform::GradPsiQuartic)
    nu = push_forward(GradientMap([](ConstCoords x) { return grad_psi_quartic(x); }), nu).measure;
  return solve_zero_coupling(mu, nu, true);
}

ExperimentResult tail_coupling_experiment(const ExperimentConfig& cfg) {
  require(cfg.p.dim == cfg.q.dim, "model dimensions differ");
  require(cfg.n >= 1 && cfg.seeds >= 1, "n and seeds must be positive");
  require(!cfg.t_grid.empty(), "t grid is empty");
  for (double t : cfg.t_grid)
    require(t >= 1.0 && t <= static_cast<double>(cfg.n), "t values must lie in [1, n]");

  const ZeroCoupling ref = reference_coupling(cfg.p, cfg.q, cfg.window, cfg.reference_resolution);
  const SupportSet ref_support = coupling_support(ref, false);
  const DiscreteMeasure ref_measure = coupling_window_measure(ref, 1.0, 1.0, 1.0, cfg.window);

  ExperimentResult res;
  std::vector<std::vector<double>> fell(cfg.t_grid.size()), m0(cfg.t_grid.size());
  std::vector<std::vector<ExperimentRow>> by_t(cfg.t_grid.size());
  for (int s = 0; s < cfg.seeds; ++s) {
    const auto k = static_cast<std::uint64_t>(s);
    const auto P = sample(cfg.p, cfg.n, stream_seed(cfg.master_seed, 3 * k + 1));
    const auto Q = sample(cfg.q, cfg.n, stream_seed(cfg.master_seed, 3 * k + 2));
    const std::uint64_t cal_seed = stream_seed(cfg.master_seed, 3 * k + 3);
    // The plan for cost |x/b1 - y/b2|^2 depends on t only through b2/b1, so a
    // solve is reused while that ratio stays put.
    std::optional<double> ratio;
    ZeroCoupling plan{P, Q, {}};
    double left = 0.0;
    SupportSet support(P.dim());
    for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
      const double t = cfg.t_grid[ti];
      auto b_of = [&](const RVModel& m) {
        if (const auto b = m.closed_form_b(t)) return *b;
        return calibrate_b(m, t, 10 * cfg.n, cal_seed);
      };
      const double b1 = b_of(cfg.p);
      const double b2 = b_of(cfg.q);
      if (!ratio || b2 / b1 != *ratio) {
        ratio = b2 / b1;
        if (*ratio == 1.0) {
          plan.entries = solve_zero_coupling(P, Q, false).entries;
        } else {
          DiscreteMeasure scaled_p(P.dim());
          std::vector<double> x(P.dim());
          for (std::size_t i = 0; i < P.size(); ++i) {
            for (std::size_t c = 0; c < P.dim(); ++c) x[c] = P.atom(i)[c] * *ratio;
            scaled_p.add(x, P.weight(i));
          }
          plan.entries = solve_zero_coupling(scaled_p, Q, false).entries;
        }
        left = residual_decomposition(plan).left_residual;
        support = coupling_support(plan, false);
      }
      const SupportSet scaled = scaled_subdifferential(support, b1, b2);
      const DiscreteMeasure window_plan = coupling_window_measure(plan, b1, b2, t, cfg.window);
      std::vector<double> costs;
      for (const auto& e : plan.entries) {
        double c = 0.0;
        for (std::size_t d = 0; d < plan.dim(); ++d) {
          const double x = e.src == kOrigin ? 0.0 : plan.src_point(e)[d] / b1;
          const double y = e.dst == kOrigin ? 0.0 : plan.dst_point(e)[d] / b2;
          c += (x - y) * (x - y);
        }
        costs.push_back(t * e.mass * c);
      }
      ExperimentRow row{t,
                        s,
                        cfg.n,
                        fell_window_distance(scaled, ref_support, cfg.window),
                        m0_distance(window_plan, ref_measure, cfg.r_grid),
                        left,
                        ordered_sum(costs),
                        window_plan.size()};
      fell[ti].push_back(row.fell_dist);
      m0[ti].push_back(row.m0_dist);
      by_t[ti].push_back(row);
    }
  }
  for (auto& rows : by_t) res.rows.insert(res.rows.end(), rows.begin(), rows.end());

  auto& sum = res.summary;
  sum.t_grid = cfg.t_grid;
  sum.reference_pairs = restrict_support(ref_support, cfg.window).size();
  sum.fell_non_increasing = true;
  for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
    sum.median_fell.push_back(median(fell[ti]));
    sum.median_m0.push_back(median(m0[ti]));
    if (ti > 0 && !(sum.median_fell[ti] <= sum.median_fell[ti - 1])) sum.fell_non_increasing = false;
  }
  return res;
}

std::string format_experiment_csv(const std::vector<ExperimentRow>& rows) {
  std::string out = "t,seed,n,fell_dist,m0_dist,left_residual,cost\n";
  for (const auto& r : rows)
    out += format_real(r.t) + ',' + std::to_string(r.seed) + ',' + std::to_string(r.n) + ',' +
           format_real(r.fell_dist) + ',' + format_real(r.m0_dist) + ',' +
           format_real(r.left_residual) + ',' + format_real(r.cost) + '\n';
  return out;
}

Json experiment_summary_json(const ExperimentConfig& cfg, const ExperimentResult& res) {
  Json j;
  j["master_seed"] = cfg.master_seed;
  j["n"] = cfg.n;
  j["seeds"] = cfg.seeds;
  j["window"] = {{"r_lo", cfg.window.r_lo}, {"r_hi", cfg.window.r_hi}, {"y_max", cfg.window.y_max}};
  j["t_grid"] = res.summary.t_grid;
  j["median_fell_dist"] = res.summary.median_fell;
  j["median_m0_dist"] = res.summary.median_m0;
  std::vector<std::size_t> pairs;
  for (std::size_t ti = 0; ti < cfg.t_grid.size(); ++ti) {
    std::vector<double> counts;
    for (const auto& r : res.rows)
      if (r.t == cfg.t_grid[ti]) counts.push_back(static_cast<double>(r.window_pairs));
    pairs.push_back(static_cast<std::size_t>(median(counts)));
  }
  j["median_window_pairs"] = pairs;
  j["reference_window_pairs"] = res.summary.reference_pairs;
  j["fell_non_increasing"] = res.summary.fell_non_increasing;
  return j;
}

}  // namespace zcoup
