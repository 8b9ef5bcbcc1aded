/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "zcoup/monotone.hpp"
#include "zcoup/onedim.hpp"
#include "zcoup/proper.hpp"
#include "zcoup/transport.hpp"

using namespace zcoup;

namespace {

DiscreteMeasure grid(double lo, double hi, int n, double mass) {
  DiscreteMeasure m(1);
  for (int k = 0; k < n; ++k) m.add(std::array{lo + (hi - lo) * (k + 0.5) / n}, mass / n);
  return m;
}

void check_plan(const ZeroCoupling& g) {
  const auto mr = check_margins(g);
  CHECK(mr.max_left_violation <= 1e-12);
  CHECK(mr.max_right_violation <= 1e-12);
  CHECK(is_cyclically_monotone(coupling_support(g, true), 1e-9).ok);
  // No mass crosses the origin.
  for (const auto& e : g.entries)
    if (e.src != kOrigin && e.dst != kOrigin) CHECK(g.src_point(e)[0] * g.dst_point(e)[0] > 0.0);
}

}  // namespace

TEST_CASE("identical measures give the identity") {
  const auto m = grid(-2, 3, 10, 4);
  const auto g = solve_1d(m, m);
  CHECK(coupling_cost(g) == 0.0);
  for (const auto& e : g.entries) CHECK(e.src == e.dst);
}

TEST_CASE("sign separated grids route through the origin") {
  const auto g = solve_1d(grid(0, 1, 8, 1), grid(-1, 0, 8, 1));
  const auto r = residual_decomposition(g);
  CHECK(r.left_residual == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.right_residual == doctest::Approx(1.0).epsilon(1e-14));
  check_plan(g);
}

TEST_CASE("same side grids are matched by quantiles") {
  const auto mu = grid(1, 2, 16, 1), nu = grid(2, 4, 16, 1);
  const auto g = solve_1d(mu, nu);
  const auto r = residual_decomposition(g);
  CHECK(r.left_residual == 0.0);
  CHECK(r.right_residual == 0.0);
  CHECK(coupling_cost(g) == doctest::Approx(coupling_cost(solve_zero_coupling(mu, nu, true))).epsilon(1e-9));
  check_plan(g);
}

TEST_CASE("residuals vanish on a side iff its masses agree") {
  DiscreteMeasure mu(1), nu(1);
  mu.add(std::array{1.0}, 1.0);
  mu.add(std::array{2.0}, 1.0);
  mu.add(std::array{-1.0}, 2.0);
  nu.add(std::array{1.5}, 2.0);
  nu.add(std::array{-3.0}, 1.0);
  const auto g = solve_1d(mu, nu);
  const auto r = residual_decomposition(g);
  CHECK(r.left_residual == 0.0);
  CHECK(r.right_residual == 1.0);
  // The excess leaves from the innermost negative atom.
  CHECK(r.to_origin[2] == 1.0);
  check_plan(g);
}

TEST_CASE("agreement with the flow solver on random instances") {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> count(1, 50);
  int equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto mu = oracle::random_measure(rng, 1, static_cast<std::size_t>(count(rng)));
    const auto nu = oracle::random_measure(rng, 1, static_cast<std::size_t>(count(rng)));
    const auto g = solve_1d(mu, nu);
    const auto f = solve_zero_coupling(mu, nu, true);
    const double c1 = coupling_cost(g), c2 = coupling_cost(f);
    CHECK(c1 >= c2 * (1 - 1e-9));
    // When the optimum keeps signs separate, both constructions cost the same.
    bool separated = true;
    for (const auto& e : f.entries)
      if (e.src != kOrigin && e.dst != kOrigin && f.src_point(e)[0] * f.dst_point(e)[0] < 0.0)
        separated = false;
    if (separated) {
      CHECK(c1 == doctest::Approx(c2).epsilon(1e-9));
      ++equal;
    }
    check_plan(g);
  }
  CHECK(equal > 0);
}
