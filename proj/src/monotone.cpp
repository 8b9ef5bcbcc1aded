/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/monotone.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace zcoup {

namespace {

double max_norm_x(const SupportSet& s) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, norm(s.x(i)));
  return m;
}

double max_norm_y(const SupportSet& s) {
  double m = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) m = std::max(m, norm(s.y(i)));
  return m;
}

// Walk predecessors from v until a node repeats and return that cycle in
// forward edge order.
std::vector<std::size_t> extract_cycle(const std::vector<long>& pred, std::size_t v) {
  const std::size_t n = pred.size();
  std::vector<char> seen(n, 0);
  std::size_t u = v;
  while (!seen[u]) {
    seen[u] = 1;
    u = static_cast<std::size_t>(pred[u]);
  }
  std::vector<std::size_t> cyc{u};
  for (std::size_t w = static_cast<std::size_t>(pred[u]); w != u; w = static_cast<std::size_t>(pred[w]))
    cyc.push_back(w);
  std::reverse(cyc.begin(), cyc.end());
  // Rotate so the cycle starts at its smallest index.
  std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
  return cyc;
}

// Whether the predecessor graph contains a cycle; returns a node on it.
std::optional<std::size_t> pred_cycle(const std::vector<long>& pred) {
  const std::size_t n = pred.size();
  std::vector<char> state(n, 0);  // 0 new, 1 on current walk, 2 done
  for (std::size_t s = 0; s < n; ++s) {
    if (state[s]) continue;
    std::size_t u = s;
    std::vector<std::size_t> walk;
    while (true) {
      if (state[u] == 1) return u;
      if (state[u] == 2) break;
      state[u] = 1;
      walk.push_back(u);
      if (pred[u] < 0) break;
      u = static_cast<std::size_t>(pred[u]);
    }
    for (std::size_t w : walk) state[w] = 2;
  }
  return std::nullopt;
}

}  // namespace

double scaled_tolerance(const SupportSet& s, double tol) {
  return tol * std::max(1.0, max_norm_x(s) * max_norm_y(s));
}

MonotoneResult is_monotone(const SupportSet& s, double tol) {
  const double t = scaled_tolerance(s, tol);
  const std::size_t n = s.size(), d = s.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += (s.x(i)[k] - s.x(j)[k]) * (s.y(i)[k] - s.y(j)[k]);
      if (v < -t) return {false, std::pair{i, j}};
    }
  }
  return {true, std::nullopt};
}

double cycle_value(const SupportSet& s, const std::vector<std::size_t>& cycle) {
  double v = 0.0;
  for (std::size_t k = 0; k < cycle.size(); ++k) {
    const std::size_t i = cycle[k];
    const std::size_t j = cycle[(k + 1) % cycle.size()];
    v += dot(s.x(i), s.y(i)) - dot(s.x(i), s.y(j));
  }
  return v;
}

CyclicResult is_cyclically_monotone(const SupportSet& s, double tol) {
  const std::size_t n = s.size(), d = s.dim();
  CyclicResult res{true, {}, 0.0, scaled_tolerance(s, tol)};
  if (n < 2) return res;
  const double t = res.tolerance;

  // Coordinate-major copy of the y's for the inner relaxation loop.
  std::vector<double> ycols(n * d);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < d; ++k) ycols[k * n + j] = s.y(j)[k];
  std::vector<double> self(n);
  for (std::size_t i = 0; i < n; ++i) self[i] = dot(s.x(i), s.y(i)) + t;

  // Label-correcting shortest paths from a virtual source joined to every
  // node at distance 0; FIFO queue, ties resolved towards smaller indices.
  std::vector<double> dist(n, 0.0), w(n);
  std::vector<long> pred(n, -1);
  std::vector<std::size_t> hops(n, 0);
  std::vector<char> queued(n, 1);
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < n; ++i) queue.push_back(i);
  std::size_t relaxations = 0;

  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    const double base = dist[i] + self[i];
    for (std::size_t j = 0; j < n; ++j) w[j] = base;
    for (std::size_t k = 0; k < d; ++k) {
      const double xk = s.x(i)[k];
      const double* yk = ycols.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) w[j] -= xk * yk[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !(w[j] < dist[j])) continue;
      dist[j] = w[j];
      pred[j] = static_cast<long>(i);
      hops[j] = hops[i] + 1;
      ++relaxations;
      const bool long_path = hops[j] >= n;
      // Periodic check of the predecessor graph catches cycles early.
      if (long_path || relaxations % n == 0) {
        if (const auto v = pred_cycle(pred)) {
          res.ok = false;
          res.cycle = extract_cycle(pred, *v);
          res.cycle_value = cycle_value(s, res.cycle);
          return res;
        }
      }
      if (!queued[j]) {
        queued[j] = 1;
        queue.push_back(j);
      }
    }
  }
  return res;
}

void DiscretePotential::add_node(ConstCoords x, double psi, ConstCoords grad) {
  require(x.size() == dim_ && grad.size() == dim_, "potential node dimension mismatch");
  require(std::isfinite(psi), "potential values must be finite");
  xs_.insert(xs_.end(), x.begin(), x.end());
  psi_.push_back(psi);
  gs_.insert(gs_.end(), grad.begin(), grad.end());
}

double DiscretePotential::value(ConstCoords x) const {
  require(!psi_.empty(), "empty potential");
  double best = -kInf;
  for (std::size_t i = 0; i < size(); ++i) {
    double v = psi_[i];
    for (std::size_t k = 0; k < dim_; ++k) v += (x[k] - this->x(i)[k]) * grad(i)[k];
    best = std::max(best, v);
  }
  return best;
}

ConstCoords DiscretePotential::gradient_at(ConstCoords x) const {
  require(!psi_.empty(), "empty potential");
  std::size_t arg = 0;
  double best = -kInf;
  for (std::size_t i = 0; i < size(); ++i) {
    double v = psi_[i];
    for (std::size_t k = 0; k < dim_; ++k) v += (x[k] - this->x(i)[k]) * grad(i)[k];
    if (v > best) {
      best = v;
      arg = i;
    }
  }
  return grad(arg);
}

double DiscretePotential::max_violation() const {
  double worst = -kInf;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = 0; j < size(); ++j) {
      double v = psi_[i] - psi_[j];
      for (std::size_t k = 0; k < dim_; ++k) v += (x(j)[k] - x(i)[k]) * grad(i)[k];
      worst = std::max(worst, v);
    }
  return worst;
}

DiscretePotential rockafellar_potential(const SupportSet& s, std::size_t base_index, double tol) {
  const std::size_t n = s.size(), d = s.dim();
  require(n > 0, "support is empty");
  require(base_index < n, "base index out of range");
  const auto cm = is_cyclically_monotone(s, tol);
  if (!cm.ok)
    fail(ErrorCode::NotCyclicallyMonotone,
         "support is not cyclically monotone (cycle value " + std::to_string(cm.cycle_value) + ")");
  const double t = cm.tolerance;

  // Longest paths with l(i -> j) = <y_i, x_j - x_i>. Only gains above the
  // tolerance count, so near-zero cycles cannot loop forever.
  std::vector<double> xcols(n * d);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t k = 0; k < d; ++k) xcols[k * n + j] = s.x(j)[k];
  std::vector<double> psi(n, -kInf), gain(n);
  std::vector<char> queued(n, 0);
  std::deque<std::size_t> queue{base_index};
  psi[base_index] = 0.0;
  queued[base_index] = 1;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    queued[i] = 0;
    const double base = psi[i] - dot(s.y(i), s.x(i));
    for (std::size_t j = 0; j < n; ++j) gain[j] = base;
    for (std::size_t k = 0; k < d; ++k) {
      const double yk = s.y(i)[k];
      const double* xk = xcols.data() + k * n;
      for (std::size_t j = 0; j < n; ++j) gain[j] += yk * xk[j];
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == base_index) continue;
      if (std::isfinite(psi[j]) && !(gain[j] > psi[j] + t)) continue;
      psi[j] = gain[j];
      if (!queued[j]) {
        queued[j] = 1;
        queue.push_back(j);
      }
    }
  }
  DiscretePotential p(d);
  for (std::size_t i = 0; i < n; ++i) p.add_node(s.x(i), psi[i], s.y(i));
  p.base_index = base_index;
  return p;
}

bool subdifferential_contains(const DiscretePotential& p, ConstCoords x, ConstCoords v,
                              double tol) {
  require(x.size() == p.dim() && v.size() == p.dim(), "pair dimension mismatch");
  if (p.size() == 0) return true;
  const double psi_x = p.value(x);
  for (std::size_t j = 0; j < p.size(); ++j) {
    double rhs = psi_x;
    for (std::size_t k = 0; k < p.dim(); ++k) rhs += (p.x(j)[k] - x[k]) * v[k];
    if (p.psi(j) < rhs - tol) return false;
  }
  return true;
}

namespace {

template <class Map>
PushForward push_impl(const Map& map, const DiscreteMeasure& m) {
  PushForward out{DiscreteMeasure(m.dim()), 0.0};
  std::vector<double> origin_masses;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const std::vector<double> y = map(i);
    require(y.size() == m.dim(), "map output has the wrong dimension");
    bool at_origin = true;
    for (double c : y) {
      if (!std::isfinite(c))
        fail(ErrorCode::DomainViolation, "atom " + std::to_string(i) + " maps to a non-finite point");
      if (c != 0.0) at_origin = false;
    }
    if (at_origin) {
      origin_masses.push_back(m.weight(i));
    } else {
      out.measure.add(y, m.weight(i));
    }
  }
  out.origin_residual = ordered_sum(origin_masses);
  out.measure.meta = m.meta;
  return out;
}

}  // namespace

PushForward push_forward(const DiscretePotential& p, const DiscreteMeasure& m) {
  require(p.dim() == m.dim(), "potential and measure dimensions differ");
  require(p.size() > 0, "empty potential");
  return push_impl(
      [&](std::size_t i) {
        const auto g = p.gradient_at(m.atom(i));
        return std::vector<double>(g.begin(), g.end());
      },
      m);
}

PushForward push_forward(const GradientMap& map, const DiscreteMeasure& m) {
  return push_impl(
      [&](std::size_t i) {
        auto y = map(m.atom(i));
        if (!y) {
          std::string where;
          for (double c : m.atom(i)) where += (where.empty() ? "" : ", ") + std::to_string(c);
          fail(ErrorCode::DomainViolation,
               "domain violation: atom " + std::to_string(i) + " at (" + where + ")");
        }
        return std::move(*y);
      },
      m);
}

}  // namespace zcoup
