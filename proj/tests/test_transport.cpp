/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "zcoup/io.hpp"
#include "zcoup/monotone.hpp"
#include "zcoup/proper.hpp"
#include "zcoup/transport.hpp"

using namespace zcoup;

namespace {

DiscreteMeasure line(std::initializer_list<std::pair<double, double>> atoms) {
  DiscreteMeasure m(1);
  for (auto [x, w] : atoms) m.add(std::vector<double>{x}, w);
  return m;
}

void check_solver_contract(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const ZeroCoupling& g) {
  const auto mr = check_margins(g);
  CHECK(mr.max_left_violation <= 1e-9);
  CHECK(mr.max_right_violation <= 1e-9);
  CHECK(is_cyclically_monotone(coupling_support(g, true), 1e-9).ok);
  // Every source atom is used by some entry.
  std::vector<bool> seen(mu.size(), false);
  for (const auto& e : g.entries) {
    CHECK(e.mass > 0.0);
    CHECK_FALSE((e.src == kOrigin && e.dst == kOrigin));
    if (e.src != kOrigin) seen[static_cast<std::size_t>(e.src)] = true;
  }
  for (bool s : seen) CHECK(s);
  CHECK(coupling_cost(g) <= coupling_cost(trivial_zero_coupling(mu, nu)) * (1 + 1e-12));
  (void)nu;
}

}  // namespace

TEST_CASE("two by two sign separated instance routes everything through the origin") {
  const auto mu = line({{1, 1}, {2, 1}});
  const auto nu = line({{-1, 1}, {-2, 1}});
  const auto g = solve_zero_coupling(mu, nu, true);
  CHECK(coupling_cost(g) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK_FALSE(check_proper(g));
  for (const auto& e : g.entries) CHECK((e.src == kOrigin || e.dst == kOrigin));
  CHECK(coupling_cost(trivial_zero_coupling(mu, nu)) == 10.0);
  CHECK(brute_force_min_cost(mu, nu, true).cost == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("identical measures couple by the identity") {
  std::mt19937_64 rng(3);
  const auto mu = oracle::random_measure(rng, 2, 6);
  const auto g = solve_zero_coupling(mu, mu, false);
  CHECK(coupling_cost(g) == 0.0);
  for (const auto& e : g.entries) CHECK(e.src == e.dst);
}

TEST_CASE("order preserving matching on the line") {
  const auto mu = line({{1, 1}, {2, 1}});
  const auto nu = line({{1.5, 1}, {3, 1}});
  const auto g = solve_zero_coupling(mu, nu, false);
  CHECK(coupling_cost(g) == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("cost of a single origin entry") {
  DiscreteMeasure mu(2), nu(2);
  mu.add(std::vector<double>{3.0, 4.0}, 2.0);
  nu.add(std::vector<double>{1.0, 0.0}, 1.0);
  ZeroCoupling g{mu, nu, {{0, kOrigin, 2.0}}};
  CHECK(coupling_cost(g) == 50.0);
}

TEST_CASE("margins report a dropped arc") {
  const auto mu = line({{1, 2}, {2, 1}});
  const auto nu = line({{-1, 4}});
  auto g = trivial_zero_coupling(mu, nu);
  CHECK(check_margins(g).max_left_violation == 0.0);
  CHECK(check_margins(g).max_right_violation == 0.0);
  g.entries.erase(g.entries.begin());
  const auto r = check_margins(g);
  CHECK(std::max(r.max_left_violation, r.max_right_violation) == doctest::Approx(1.0));
}

TEST_CASE("unbalanced input without reservoir is rejected") {
  const auto mu = line({{1, 1}});
  const auto nu = line({{2, 2}});
  try {
    solve_zero_coupling(mu, nu, false);
    FAIL("expected unbalanced error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Unbalanced);
  }
  // One unit moves 1 -> 2, the origin supplies the other.
  CHECK(coupling_cost(solve_zero_coupling(mu, nu, true)) == doctest::Approx(5.0));
}

TEST_CASE("brute force oracle limit") {
  std::mt19937_64 rng(1);
  const auto mu = oracle::random_measure(rng, 1, 5);
  const auto nu = oracle::random_measure(rng, 1, 5);
  try {
    brute_force_min_cost(mu, nu, true);
    FAIL("expected oracle limit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OracleLimit);
  }
}

TEST_CASE("solver matches the successive shortest path oracle") {
  std::mt19937_64 rng(20260);
  std::uniform_int_distribution<int> count(1, 9);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t d = 1 + static_cast<std::size_t>(trial % 3);
    const auto mu = oracle::random_measure(rng, d, static_cast<std::size_t>(count(rng)));
    const auto nu = oracle::random_measure(rng, d, static_cast<std::size_t>(count(rng)));
    const auto g = solve_zero_coupling(mu, nu, true);
    const double want = oracle::min_cost(mu, nu, true);
    CHECK(coupling_cost(g) == doctest::Approx(want).epsilon(1e-9));
    check_solver_contract(mu, nu, g);
  }
}

TEST_CASE("balanced solve without reservoir matches the oracle") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    auto mu = oracle::random_measure(rng, 2, 5);
    auto nu = oracle::random_measure(rng, 2, 4);
    // Rescale nu to the mass of mu.
    DiscreteMeasure nb(2);
    const double f = mu.total() / nu.total();
    for (std::size_t j = 0; j < nu.size(); ++j) nb.add(nu.atom(j), nu.weight(j) * f);
    if (nb.total() != mu.total()) continue;
    const auto g = solve_zero_coupling(mu, nb, false);
    CHECK(coupling_cost(g) == doctest::Approx(oracle::min_cost(mu, nb, false)).epsilon(1e-9));
    for (const auto& e : g.entries) CHECK((e.src != kOrigin && e.dst != kOrigin));
  }
}

TEST_CASE("sparse path agrees with the dense path") {
  std::mt19937_64 rng(11);
  const auto mu = oracle::random_measure(rng, 2, 300, 10.0);
  const auto nu = oracle::random_measure(rng, 2, 280, 10.0);
  SolveOptions sparse;
  sparse.dense_limit = 0;
  const auto a = solve_zero_coupling(mu, nu, true);
  const auto b = solve_zero_coupling(mu, nu, true, sparse);
  CHECK(coupling_cost(b) == doctest::Approx(coupling_cost(a)).epsilon(1e-9));
  check_solver_contract(mu, nu, b);
}

TEST_CASE("coupling csv round trip") {
  std::mt19937_64 rng(5);
  const auto mu = oracle::random_measure(rng, 2, 4);
  const auto nu = oracle::random_measure(rng, 2, 3);
  const auto g = solve_zero_coupling(mu, nu, true);
  const auto text = format_coupling_csv(g);
  const auto back = parse_coupling_csv(text, mu, nu);
  CHECK(back.entries == g.entries);
  CHECK(format_coupling_csv(back) == text);
  CHECK_THROWS_AS(parse_coupling_csv("src,dst,mass\nO,O,1\n", mu, nu), Error);
  CHECK_THROWS_AS(parse_coupling_csv("src,dst,mass\n0,9,1\n", mu, nu), Error);
}
