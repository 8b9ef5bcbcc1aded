/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <doctest.h>

#include <cmath>

#include "zcoup/io.hpp"
#include "zcoup/oracle.hpp"
#include "zcoup/regvar.hpp"

using namespace zcoup;

namespace {

RVModel uniform_model(double alpha, const std::string& radial = "none") {
  return RVModel::from_config(parse_config("dim = 2\nalpha = " + std::to_string(alpha) +
                                           "\nangular_kind = density\nangular_spec = uniform\n"
                                           "radial_slowly_varying = " + radial + "\n"));
}

double tail_fraction(const DiscreteMeasure& m, double t, double b, double lambda) {
  double hits = 0;
  for (std::size_t i = 0; i < m.size(); ++i) hits += norm(m.atom(i)) / b > lambda;
  return t * hits / static_cast<double>(m.size());
}

}  // namespace

TEST_CASE("pareto tails scale like a power") {
  const auto model = uniform_model(1.5);
  const auto s = sample(model, 200000, 11);
  const double t = 100.0;
  const double b = *model.closed_form_b(t);
  CHECK(b == doctest::Approx(std::pow(t, 1 / 1.5)));
  for (double lam : {0.5, 1.0, 2.0})
    CHECK(tail_fraction(s, t, b, lam) == doctest::Approx(std::pow(lam, -1.5)).epsilon(0.1));
  // Rounding of n equal weights stays within n * eps.
  CHECK(s.total() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("slowly varying factor has no closed form and calibrates empirically") {
  const auto model = uniform_model(1.0, "log");
  CHECK_FALSE(model.closed_form_b(10.0));
  const double t = 50.0;
  const double b = calibrate_b(model, t, 500000, 3);
  const auto s = sample(model, 200000, 4);
  CHECK(tail_fraction(s, t, b, 1.0) == doctest::Approx(1.0).epsilon(0.1));
  CHECK(tail_fraction(s, t, b, 2.0) < 0.7);
  // Exact Pareto calibration recovers the closed form.
  const auto pareto = uniform_model(1.0);
  CHECK(calibrate_b(pareto, t, 400000, 5) == doctest::Approx(t).epsilon(0.05));
}

TEST_CASE("samples are reproducible per seed") {
  const auto m = uniform_model(1.0);
  CHECK(sample(m, 100, 1) == sample(m, 100, 1));
  CHECK_FALSE(sample(m, 100, 1) == sample(m, 100, 2));
}

TEST_CASE("rescaled empirical measure") {
  DiscreteMeasure s(1);
  s.add(std::array{4.0}, 0.5);
  s.add(std::array{-2.0}, 0.5);
  const auto r = rescaled_empirical(s, 10.0, 2.0);
  CHECK(r.atom(0)[0] == 2.0);
  CHECK(r.atom(1)[0] == -1.0);
  CHECK(r.weight(0) == 5.0);
}

TEST_CASE("scaling matrix and the graph of an order one homogeneous gradient") {
  const auto B = ScalingMatrix::pareto(8.0, 1.0, 3.0);
  CHECK(B.b1 == 8.0);
  CHECK(B.b2 == doctest::Approx(2.0).epsilon(1e-15));
  SupportSet graph(2);
  for (int i = 1; i <= 10; ++i)
    for (int j = -5; j <= 5; ++j) {
      const std::array x{0.3 * i, 0.4 * j};
      graph.add(x, *grad_psi_quartic(x));
    }
  for (double lam : {0.5, 2.0}) {
    const auto sc = scaled_subdifferential(graph, lam, lam);
    for (std::size_t k = 0; k < sc.size(); ++k) {
      const auto g = *grad_psi_quartic(sc.x(k));
      for (int c = 0; c < 2; ++c)
        CHECK(std::abs(sc.y(k)[c] - g[c]) <= 1e-12 * std::max(1.0, std::abs(g[c])));
    }
  }
}

TEST_CASE("gradient homogeneity check") {
  std::vector<std::vector<double>> pts;
  for (int i = 1; i <= 10; ++i)
    for (int j = 0; j < 10; ++j) pts.push_back({0.25 * i, -2.0 + 0.4 * j});
  const GradientMap grad = [](ConstCoords p) { return grad_psi_quartic(p); };
  const ValueMap value = [](ConstCoords p) { return psi_quartic(p[0], p[1]).value; };
  const auto ok = check_gradient_homogeneity(grad, &value, 1.0, 1.0, pts, {0.5, 2.0, 10.0}, 1e-12);
  CHECK(ok.holds);
  CHECK(ok.max_grad_deviation <= 1e-12);
  REQUIRE(ok.max_value_deviation);
  CHECK(*ok.max_value_deviation <= 1e-12);
  const GradientMap square = [](ConstCoords p) -> std::optional<std::vector<double>> {
    return std::vector<double>{p[0] * p[0], p[1] * p[1]};
  };
  CHECK_FALSE(check_gradient_homogeneity(square, nullptr, 1.0, 1.0, pts, {2.0}, 1e-6).holds);
  // Order alpha1/alpha2 = 2 makes the square map homogeneous.
  CHECK(check_gradient_homogeneity(square, nullptr, 2.0, 1.0, pts, {2.0}, 1e-12).holds);
}

TEST_CASE("coupling homogeneity on an exactly homogeneous plan") {
  DiscreteMeasure xs(1), ys(1);
  ZeroCoupling g{DiscreteMeasure(1), DiscreteMeasure(1), {}};
  for (int k = -8; k <= 8; ++k) {
    const double r = std::pow(2.0, k);
    g.sources.add(std::array{r}, 1.0 / r);
    g.targets.add(std::array{3.0 * r}, 1.0 / r);
    g.entries.push_back({k + 8, k + 8, 1.0 / r});
  }
  const std::vector<ProductAnnulus> ann = {{1, 4, 0, kInf}, {1, 2, 2, 8}, {0.5, 2, 1.5, 6.5}};
  const auto rep = check_coupling_homogeneity(g, 1.0, 1.0, {0.5, 2.0}, ann, 1e-12, 1e-12);
  CHECK(rep.holds);
  CHECK(rep.max_mass_deviation <= 1e-12);
  REQUIRE(rep.support);
  CHECK(rep.support->holds);
  const auto bad = check_coupling_homogeneity(g, 2.0, 1.0, {2.0}, ann, 1e-6);
  CHECK_FALSE(bad.holds);
}

TEST_CASE("window distance") {
  const Window w;
  SupportSet a(2), b(2), empty(2);
  a.add(std::array{2.0, 0.0}, std::array{2.0, 0.0});
  b.add(std::array{2.0, 0.0}, std::array{2.0, 0.1});
  CHECK(fell_window_distance(empty, empty, w) == 0.0);
  CHECK(std::isinf(fell_window_distance(a, empty, w)));
  CHECK(fell_window_distance(a, a, w) == 0.0);
  CHECK(fell_window_distance(a, b, w) == doctest::Approx(0.1));
  SupportSet outside(2);
  outside.add(std::array{10.0, 0.0}, std::array{0.0, 0.0});
  CHECK(fell_window_distance(outside, empty, w) == 0.0);
}

TEST_CASE("vague distance") {
  DiscreteMeasure a(2), b(2);
  a.add(std::array{2.0, 0.0}, 1.0);
  a.add(std::array{0.0, -5.0}, 2.0);
  b.add(std::array{2.0, 0.0}, 1.0);
  CHECK(m0_distance(a, a, {1, 2, 4}) == 0.0);
  const double d = m0_distance(a, b, {1, 2, 4});
  CHECK(d > 0.0);
  CHECK(d == m0_distance(b, a, {1, 2, 4}));
  // Mass inside the smallest radius is invisible.
  DiscreteMeasure c = b;
  c.add(std::array{0.1, 0.0}, 7.0);
  CHECK(m0_distance(b, c, {1, 2, 4}) == 0.0);
}

TEST_CASE("portmanteau errors shrink along refined discretisations") {
  const auto h = uniform_model(1.0).exponent_measure();
  std::vector<DiscreteMeasure> seq;
  for (int res : {8, 32, 128}) seq.push_back(discretize(h, 0.5, 20.0, DiscretizeMode::Quadrature, res));
  const std::vector<TestSet> sets = {{1, 3, std::nullopt}, {2, 5, Cone({1.0, 0.0}, 0.5)}};
  const auto rep = portmanteau_check(seq, &h, sets);
  for (const auto& e : rep.errors) CHECK(e.back() < e.front());
  CHECK(rep.last_max < 2e-2);
}

TEST_CASE("tail experiment is deterministic and well formed") {
  ExperimentConfig cfg{.p = uniform_model(1.0), .q = uniform_model(1.0)};
  cfg.n = 400;
  cfg.t_grid = {4.0, 8.0};
  cfg.seeds = 2;
  cfg.reference_resolution = 16;
  const auto a = tail_coupling_experiment(cfg);
  const auto b = tail_coupling_experiment(cfg);
  CHECK(format_experiment_csv(a.rows) == format_experiment_csv(b.rows));
  CHECK(a.rows.size() == 4);
  for (const auto& r : a.rows) {
    CHECK(r.n == 400);
    CHECK(r.m0_dist >= 0.0);
    CHECK(r.left_residual >= 0.0);
  }
  cfg.master_seed += 1;
  CHECK(format_experiment_csv(tail_coupling_experiment(cfg).rows) != format_experiment_csv(a.rows));
  const auto j = experiment_summary_json(cfg, a);
  CHECK(j["master_seed"] == cfg.master_seed);
}
