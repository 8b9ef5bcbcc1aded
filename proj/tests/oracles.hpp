/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Reference implementations used only by the tests. They share no code with
// the library beyond the measure container.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "zcoup/measures.hpp"

namespace oracle {

inline double sq(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

inline std::vector<std::vector<double>> points_of(const zcoup::DiscreteMeasure& m) {
  std::vector<std::vector<double>> out;
  for (std::size_t i = 0; i < m.size(); ++i) out.emplace_back(m.atom(i).begin(), m.atom(i).end());
  return out;
}

// Minimum quadratic transport cost by successive shortest paths with
// Bellman-Ford on the residual graph. With a reservoir, the origin appears as
// one extra source (supply = total of nu) and one extra sink (demand = total
// of mu). Small dense instances only.
inline double min_cost(const zcoup::DiscreteMeasure& mu, const zcoup::DiscreteMeasure& nu,
                       bool reservoir) {
  auto xs = points_of(mu);
  auto ys = points_of(nu);
  std::vector<double> supply(mu.weights()), demand(nu.weights());
  const std::vector<double> zero(mu.dim(), 0.0);
  if (reservoir) {
    supply.push_back(nu.total());
    demand.push_back(mu.total());
    xs.push_back(zero);
    ys.push_back(zero);
  }
  const std::size_t m = supply.size(), n = demand.size();
  const std::size_t N = m + n;
  std::vector<std::vector<double>> cost(m, std::vector<double>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i][j] = sq(xs[i], ys[j]);
  std::vector<std::vector<double>> flow(m, std::vector<double>(n, 0.0));
  const double eps = 1e-14 * std::max(1.0, std::accumulate(supply.begin(), supply.end(), 0.0));
  const double inf = std::numeric_limits<double>::infinity();
  double cmax = 1.0;
  for (const auto& row : cost)
    for (double c : row) cmax = std::max(cmax, c);
  const double slack = 1e-12 * cmax;

  for (int iter = 0; iter < 10000; ++iter) {
    // Multi-source Bellman-Ford from every node with remaining supply.
    std::vector<double> dist(N, inf);
    std::vector<long> pred(N, -1);
    for (std::size_t i = 0; i < m; ++i)
      if (supply[i] > eps) dist[i] = 0.0;
    for (std::size_t round = 0; round < N; ++round) {
      bool changed = false;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          if (dist[i] + cost[i][j] < dist[m + j] - slack) {
            dist[m + j] = dist[i] + cost[i][j];
            pred[m + j] = static_cast<long>(i);
            changed = true;
          }
          if (flow[i][j] > eps && dist[m + j] - cost[i][j] < dist[i] - slack) {
            dist[i] = dist[m + j] - cost[i][j];
            pred[i] = static_cast<long>(m + j);
            changed = true;
          }
        }
      if (!changed) break;
    }
    long best = -1;
    for (std::size_t j = 0; j < n; ++j)
      if (demand[j] > eps && dist[m + j] < inf && (best < 0 || dist[m + j] < dist[m + best]))
        best = static_cast<long>(j);
    if (best < 0) break;
    // Bottleneck along the path.
    std::vector<std::size_t> path;
    std::size_t v = m + static_cast<std::size_t>(best);
    path.push_back(v);
    while (pred[v] >= 0) {
      v = static_cast<std::size_t>(pred[v]);
      path.push_back(v);
      if (path.size() > N) throw std::runtime_error("oracle: cycle in shortest path tree");
    }
    double amount = std::min(supply[path.back()], demand[static_cast<std::size_t>(best)]);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const std::size_t to = path[k], from = path[k + 1];
      if (from >= m) amount = std::min(amount, flow[to][from - m]);  // backward arc
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const std::size_t to = path[k], from = path[k + 1];
      if (from < m)
        flow[from][to - m] += amount;
      else
        flow[to][from - m] -= amount;
    }
    supply[path.back()] -= amount;
    demand[static_cast<std::size_t>(best)] -= amount;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) total += flow[i][j] * cost[i][j];
  return total;
}

// Cyclical monotonicity by enumerating every permutation: a finite set of
// pairs is cyclically monotone iff the identity maximises sum <x_i, y_s(i)>.
inline bool cyclically_monotone(const std::vector<std::vector<double>>& x,
                                const std::vector<std::vector<double>>& y, double tol) {
  const std::size_t n = x.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  auto inner = [&](std::size_t i, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < x[i].size(); ++k) s += x[i][k] * y[j][k];
    return s;
  };
  double base = 0.0;
  for (std::size_t i = 0; i < n; ++i) base += inner(i, i);
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += inner(i, perm[i]);
    if (s > base + tol) return false;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return true;
}

// Random discrete measure with integer-ish weights in [0.5, 3).
inline zcoup::DiscreteMeasure random_measure(std::mt19937_64& rng, std::size_t dim, std::size_t count,
                                             double spread = 3.0) {
  std::uniform_real_distribution<double> coord(-spread, spread), weight(0.5, 3.0);
  zcoup::DiscreteMeasure m(dim);
  std::vector<double> x(dim);
  while (m.size() < count) {
    for (double& c : x) c = coord(rng);
    if (std::sqrt(std::inner_product(x.begin(), x.end(), x.begin(), 0.0)) < 1e-3) continue;
    m.add(x, weight(rng));
  }
  return m;
}

}  // namespace oracle
