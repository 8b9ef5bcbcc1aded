/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <utility>

#include "zcoup/network_simplex.hpp"

namespace zcoup {

namespace {

constexpr double kBalanceTol = 1e-9;

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(mu.dim() == nu.dim(), "measure dimensions differ");
}

void sort_entries(std::vector<CouplingEntry>& entries) {
  // Origin sorts last on both coordinates.
  auto key = [](long v) { return v == kOrigin ? std::numeric_limits<long>::max() : v; };
  std::sort(entries.begin(), entries.end(), [&](const CouplingEntry& a, const CouplingEntry& b) {
    return std::pair(key(a.src), key(a.dst)) < std::pair(key(b.src), key(b.dst));
  });
}

}  // namespace

ConstCoords ZeroCoupling::src_point(const CouplingEntry& e) const {
  return e.src == kOrigin ? ConstCoords{} : sources.atom(static_cast<std::size_t>(e.src));
}

ConstCoords ZeroCoupling::dst_point(const CouplingEntry& e) const {
  return e.dst == kOrigin ? ConstCoords{} : targets.atom(static_cast<std::size_t>(e.dst));
}

void SupportSet::add(ConstCoords x, ConstCoords y) {
  require(x.size() == dim_ && y.size() == dim_, "support pair dimension mismatch");
  xs_.insert(xs_.end(), x.begin(), x.end());
  ys_.insert(ys_.end(), y.begin(), y.end());
}

ZeroCoupling trivial_zero_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_pair(mu, nu);
  ZeroCoupling g{mu, nu, {}};
  for (std::size_t i = 0; i < mu.size(); ++i)
    g.entries.push_back({static_cast<long>(i), kOrigin, mu.weight(i)});
  for (std::size_t j = 0; j < nu.size(); ++j)
    g.entries.push_back({kOrigin, static_cast<long>(j), nu.weight(j)});
  sort_entries(g.entries);
  return g;
}

double coupling_cost(const ZeroCoupling& g) {
  double c = 0.0;
  for (const auto& e : g.entries) {
    const auto x = g.src_point(e);
    const auto y = g.dst_point(e);
    double d2;
    if (x.empty() && y.empty())
      d2 = 0.0;
    else if (x.empty())
      d2 = norm2(y);
    else if (y.empty())
      d2 = norm2(x);
    else
      d2 = dist2(x, y);
    c += e.mass * d2;
  }
  return c;
}

MarginReport check_margins(const ZeroCoupling& g) {
  std::vector<double> left(g.sources.size(), 0.0), right(g.targets.size(), 0.0);
  for (const auto& e : g.entries) {
    if (e.src != kOrigin) left[static_cast<std::size_t>(e.src)] += e.mass;
    if (e.dst != kOrigin) right[static_cast<std::size_t>(e.dst)] += e.mass;
  }
  MarginReport r{0.0, 0.0};
  for (std::size_t i = 0; i < left.size(); ++i)
    r.max_left_violation =
        std::max(r.max_left_violation, std::abs(left[i] - g.sources.weight(i)) / g.sources.weight(i));
  for (std::size_t j = 0; j < right.size(); ++j)
    r.max_right_violation =
        std::max(r.max_right_violation, std::abs(right[j] - g.targets.weight(j)) / g.targets.weight(j));
  return r;
}

SupportSet coupling_support(const ZeroCoupling& g, bool with_origin) {
  const std::size_t d = g.dim();
  SupportSet s(d);
  const std::vector<double> zero(d, 0.0);
  for (const auto& e : g.entries) {
    const auto x = g.src_point(e);
    const auto y = g.dst_point(e);
    s.add(x.empty() ? ConstCoords(zero) : x, y.empty() ? ConstCoords(zero) : y);
  }
  if (with_origin) s.add(zero, zero);
  return s;
}

// ---------------------------------------------------------------- solver

namespace {

/// k nearest rows of `to` for every row of `from` (brute force).
std::vector<std::vector<int>> nearest(const DiscreteMeasure& from, const DiscreteMeasure& to, int k) {
  const std::size_t m = from.size(), n = to.size();
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  std::vector<std::vector<int>> out(m);
  if (kk == 0) return out;
  // Sweep outward from the query along the first coordinate; the gap in that
  // coordinate bounds the distance of everything further out. Keeps the k
  // smallest (distance, index) pairs, as a full scan would.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> key(n);
  for (std::size_t j = 0; j < n; ++j) key[j] = to.atom(j)[0];
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return key[static_cast<std::size_t>(a)] < key[static_cast<std::size_t>(b)];
  });
  std::vector<double> sorted(n);
  for (std::size_t r = 0; r < n; ++r) sorted[r] = key[static_cast<std::size_t>(order[r])];

  std::vector<std::pair<double, int>> heap;
  auto offer = [&](const std::pair<double, int>& c) {
    if (heap.size() < kk) {
      heap.push_back(c);
      std::push_heap(heap.begin(), heap.end());
    } else if (c < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = c;
      std::push_heap(heap.begin(), heap.end());
    }
  };
  for (std::size_t i = 0; i < m; ++i) {
    heap.clear();
    const auto x = from.atom(i);
    const auto mid = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), x[0]) - sorted.begin());
    std::size_t up = mid, down = mid;
    bool up_open = up < n, down_open = down > 0;
    while (up_open || down_open) {
      const double gap_up = up_open ? sorted[up] - x[0] : kInf;
      const double gap_down = down_open ? x[0] - sorted[down - 1] : kInf;
      const bool go_up = gap_up <= gap_down;
      const double gap = go_up ? gap_up : gap_down;
      if (heap.size() == kk && gap * gap > heap.front().first) break;
      const std::size_t r = go_up ? up++ : --down;
      const int j = order[r];
      offer({dist2(x, to.atom(static_cast<std::size_t>(j))), j});
      up_open = up < n;
      down_open = down > 0;
    }
    std::sort_heap(heap.begin(), heap.end());
    for (const auto& [d, j] : heap) out[i].push_back(j);
  }
  return out;
}

}  // namespace

ZeroCoupling solve_zero_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                 bool reservoir, const SolveOptions& opts) {
  check_pair(mu, nu);
  ZeroCoupling g{mu, nu, {}};
  const std::size_t m = mu.size(), n = nu.size();
  const double tmu = mu.total(), tnu = nu.total();
  if (!reservoir) {
    const double scale = std::max({tmu, tnu, std::numeric_limits<double>::min()});
    if (std::abs(tmu - tnu) > kBalanceTol * scale)
      fail(ErrorCode::Unbalanced, "unbalanced: source mass and target mass differ");
  }
  if (m == 0 && n == 0) return g;
  if (!reservoir && (m == 0 || n == 0)) return g;

  const int mi = static_cast<int>(m), ni = static_cast<int>(n);
  std::vector<double> supply;
  supply.reserve(m + n + 2);
  for (std::size_t i = 0; i < m; ++i) supply.push_back(mu.weight(i));
  for (std::size_t j = 0; j < n; ++j) supply.push_back(-nu.weight(j));
  const int o_src = mi + ni, o_sink = mi + ni + 1;
  if (reservoir) {
    supply.push_back(tnu);
    supply.push_back(-tmu);
  }
  const double reach = mu.max_norm() + nu.max_norm();
  const double max_cost = std::max(1.0, reach * reach);
  const double eps = 1e-12 * max_cost;
  NetworkSimplex ns(std::move(supply), eps);

  auto cost = [&](std::size_t i, std::size_t j) { return dist2(mu.atom(i), nu.atom(j)); };

  // Arc bookkeeping: id -> (i, j) with -1 marking origin nodes.
  std::vector<std::pair<int, int>> arc_ends;
  auto add = [&](int i, int j) {
    const int s = i < 0 ? o_src : i;
    const int t = j < 0 ? o_sink : mi + j;
    double c;
    if (i < 0 && j < 0)
      c = 0.0;
    else if (i < 0)
      c = norm2(nu.atom(static_cast<std::size_t>(j)));
    else if (j < 0)
      c = norm2(mu.atom(static_cast<std::size_t>(i)));
    else
      c = cost(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    ns.add_arc(s, t, c);
    arc_ends.emplace_back(i, j);
  };
  if (reservoir) {
    for (int i = 0; i < mi; ++i) add(i, -1);
    for (int j = 0; j < ni; ++j) add(-1, j);
    add(-1, -1);
  }

  const bool dense = m * n <= opts.dense_limit;
  if (dense) {
    for (int i = 0; i < mi; ++i)
      for (int j = 0; j < ni; ++j) add(i, j);
    ns.run();
  } else {
    std::vector<std::pair<int, int>> cand;
    if (opts.neighbours > 0) {
    const auto fwd = nearest(mu, nu, opts.neighbours);
    for (int i = 0; i < mi; ++i)
      for (int j : fwd[static_cast<std::size_t>(i)]) cand.emplace_back(i, j);
    const auto bwd = nearest(nu, mu, opts.neighbours);
    for (int j = 0; j < ni; ++j)
      for (int i : bwd[static_cast<std::size_t>(j)]) cand.emplace_back(i, j);
    }
    // North-west corner rule on radius-sorted atoms: a feasible plan whose
    // arcs keep the restricted problem free of artificial flow.
    if (!reservoir) {
      std::vector<int> ri(m), rj(n);
      std::iota(ri.begin(), ri.end(), 0);
      std::iota(rj.begin(), rj.end(), 0);
      std::vector<double> ni_norm(m), nj_norm(n);
      for (std::size_t i = 0; i < m; ++i) ni_norm[i] = norm2(mu.atom(i));
      for (std::size_t j = 0; j < n; ++j) nj_norm[j] = norm2(nu.atom(j));
      std::stable_sort(ri.begin(), ri.end(), [&](int a, int b) { return ni_norm[static_cast<std::size_t>(a)] < ni_norm[static_cast<std::size_t>(b)]; });
      std::stable_sort(rj.begin(), rj.end(), [&](int a, int b) { return nj_norm[static_cast<std::size_t>(a)] < nj_norm[static_cast<std::size_t>(b)]; });
      std::size_t p = 0, q = 0;
      double left = mu.weight(static_cast<std::size_t>(ri[0]));
      double right = nu.weight(static_cast<std::size_t>(rj[0]));
      while (p < m && q < n) {
        cand.emplace_back(ri[p], rj[q]);
        const bool advance_row = q + 1 == n || (p + 1 < m && left < right);
        if (advance_row) {
          right -= left;
          if (++p < m) left = mu.weight(static_cast<std::size_t>(ri[p]));
        } else {
          left -= right;
          if (++q < n) right = nu.weight(static_cast<std::size_t>(rj[q]));
        }
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (const auto& [i, j] : cand) add(i, j);

    // Column generation: price every implicit arc against the current
    // potentials and add the most violated ones per row.
    const std::size_t d = mu.dim();
    std::vector<double> ycols(d * n);  // coordinate-major copy of the targets
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < d; ++k) ycols[k * n + j] = nu.atom(j)[k];
    std::vector<double> bias(n), pa_t(n), rc(n);
    std::vector<std::pair<double, int>> best;
    const auto kpr = static_cast<std::size_t>(std::max(1, opts.arcs_per_row));
    const std::size_t round_limit = opts.round_limit > 0 ? opts.round_limit : std::numeric_limits<std::size_t>::max();
    int start = 0;
    for (;;) {
      ns.run();
      std::size_t added = 0;
      double pa_lo = kInf, pa_hi = -kInf;
      for (std::size_t j = 0; j < n; ++j) {
        const int node = mi + static_cast<int>(j);
        pa_t[j] = ns.potential_art(node);
        pa_lo = std::min(pa_lo, pa_t[j]);
        pa_hi = std::max(pa_hi, pa_t[j]);
        bias[j] = norm2(nu.atom(j)) - ns.potential(node);
      }
      // Rows are priced from a rotating start and the round ends once enough
      // arcs have joined; only a full pass that finds nothing ends the loop.
      int step = 0;
      for (; step < mi && added < round_limit; ++step) {
        const int i = (start + step) % mi;
        const auto x = mu.atom(static_cast<std::size_t>(i));
        const double base = norm2(x) + ns.potential(i);
        const double pa = ns.potential_art(i);
        if (d == 2) {
          const double ax = -2.0 * x[0], ay = -2.0 * x[1];
          const double* y0 = ycols.data();
          const double* y1 = ycols.data() + n;
          const double* bj = bias.data();
          double* out = rc.data();
          for (std::size_t j = 0; j < n; ++j) out[j] = base + bj[j] + ax * y0[j] + ay * y1[j];
        } else {
          for (std::size_t j = 0; j < n; ++j) rc[j] = base + bias[j];
          for (std::size_t k = 0; k < d; ++k) {
            const double xk = -2.0 * x[k];
            const double* yk = ycols.data() + k * n;
            for (std::size_t j = 0; j < n; ++j) rc[j] += xk * yk[j];
          }
        }
        best.clear();
        const bool flat = pa == pa_hi && pa == pa_lo;
        for (std::size_t j = 0; j < n; ++j) {
          double key = rc[j];
          if (flat) {
            if (!(key < -eps)) continue;
          } else {
            const double a = pa - pa_t[j];
            if (a > 0.5) continue;
            if (a < -0.5) key = -kInf;
          }
          if (!(key < -eps)) continue;
          if (best.size() < kpr) {
            best.emplace_back(key, static_cast<int>(j));
            std::push_heap(best.begin(), best.end());
          } else if (key < best.front().first) {
            std::pop_heap(best.begin(), best.end());
            best.back() = {key, static_cast<int>(j)};
            std::push_heap(best.begin(), best.end());
          }
        }
        std::sort(best.begin(), best.end());
        for (const auto& [key, j] : best) {
          add(i, j);
          ++added;
        }
      }
      if (added == 0) break;
      start = (start + step) % mi;
    }
  }
  ns.recompute_flows();
  if (!reservoir && ns.artificial_flow() > kBalanceTol * std::max(tmu, tnu) + 1e-300)
    fail(ErrorCode::Internal, "solver ended with infeasible basis");

  const double floor = 1e-15 * std::max(tmu, tnu);
  for (std::size_t a = 0; a < arc_ends.size(); ++a) {
    const double f = ns.flow(static_cast<int>(a));
    if (!(f > floor)) continue;
    const auto [i, j] = arc_ends[a];
    if (i < 0 && j < 0) continue;
    g.entries.push_back({i < 0 ? kOrigin : i, j < 0 ? kOrigin : j, f});
  }
  sort_entries(g.entries);
  return g;
}

// ---------------------------------------------------------------- oracle

namespace {

struct Edge {
  int u, v;      // u in [0, rows), v in [0, cols)
  double cost;
};

class BasisEnumerator {
 public:
  BasisEnumerator(std::vector<double> row_supply, std::vector<double> col_demand, std::vector<Edge> edges)
      : rows_(static_cast<int>(row_supply.size())),
        cols_(static_cast<int>(col_demand.size())),
        row_(std::move(row_supply)),
        col_(std::move(col_demand)),
        edges_(std::move(edges)),
        parent_(static_cast<std::size_t>(rows_ + cols_)),
        rank_(static_cast<std::size_t>(rows_ + cols_), 0) {
    std::iota(parent_.begin(), parent_.end(), 0);
    const double scale = std::max(std::accumulate(row_.begin(), row_.end(), 0.0), 1e-300);
    tol_ = 1e-12 * scale;
  }

  void run() {
    chosen_.clear();
    recurse(0);
  }

  double best_cost = kInf;
  std::vector<std::pair<int, double>> best_flows;  // (edge index, flow)

 private:
  int find(int x) const {
    while (parent_[static_cast<std::size_t>(x)] != x) x = parent_[static_cast<std::size_t>(x)];
    return x;
  }

  void recurse(std::size_t next) {
    const std::size_t need = static_cast<std::size_t>(rows_ + cols_ - 1);
    if (chosen_.size() == need) {
      evaluate();
      return;
    }
    if (next == edges_.size() || edges_.size() - next < need - chosen_.size()) return;
    const Edge& e = edges_[next];
    const int a = find(e.u), b = find(rows_ + e.v);
    if (a != b) {
      // Union by rank with rollback.
      int ra = a, rb = b;
      if (rank_[static_cast<std::size_t>(ra)] < rank_[static_cast<std::size_t>(rb)]) std::swap(ra, rb);
      const bool bump = rank_[static_cast<std::size_t>(ra)] == rank_[static_cast<std::size_t>(rb)];
      parent_[static_cast<std::size_t>(rb)] = ra;
      if (bump) ++rank_[static_cast<std::size_t>(ra)];
      chosen_.push_back(static_cast<int>(next));
      recurse(next + 1);
      chosen_.pop_back();
      if (bump) --rank_[static_cast<std::size_t>(ra)];
      parent_[static_cast<std::size_t>(rb)] = rb;
    }
    recurse(next + 1);
  }

  void evaluate() {
    // Leaf elimination on the spanning tree.
    const auto nn = static_cast<std::size_t>(rows_ + cols_);
    std::vector<double> excess(nn);
    for (int r = 0; r < rows_; ++r) excess[static_cast<std::size_t>(r)] = row_[static_cast<std::size_t>(r)];
    for (int c = 0; c < cols_; ++c) excess[static_cast<std::size_t>(rows_ + c)] = -col_[static_cast<std::size_t>(c)];
    std::vector<int> degree(nn, 0);
    std::vector<char> used(chosen_.size(), 0);
    for (int k : chosen_) {
      ++degree[static_cast<std::size_t>(edges_[static_cast<std::size_t>(k)].u)];
      ++degree[static_cast<std::size_t>(rows_ + edges_[static_cast<std::size_t>(k)].v)];
    }
    std::vector<double> flow(chosen_.size(), 0.0);
    for (std::size_t step = 0; step < chosen_.size(); ++step) {
      std::size_t pick = chosen_.size();
      int leaf = -1;
      for (std::size_t q = 0; q < chosen_.size() && pick == chosen_.size(); ++q) {
        if (used[q]) continue;
        const Edge& e = edges_[static_cast<std::size_t>(chosen_[q])];
        if (degree[static_cast<std::size_t>(e.u)] == 1) {
          pick = q;
          leaf = e.u;
        } else if (degree[static_cast<std::size_t>(rows_ + e.v)] == 1) {
          pick = q;
          leaf = rows_ + e.v;
        }
      }
      const Edge& e = edges_[static_cast<std::size_t>(chosen_[pick])];
      const int other = leaf == e.u ? rows_ + e.v : e.u;
      // Flow runs from the row node to the column node.
      const double f = leaf == e.u ? excess[static_cast<std::size_t>(leaf)] : -excess[static_cast<std::size_t>(leaf)];
      if (f < -tol_) return;
      flow[pick] = f;
      excess[static_cast<std::size_t>(leaf)] = 0.0;
      if (leaf == e.u)
        excess[static_cast<std::size_t>(other)] += f;
      else
        excess[static_cast<std::size_t>(other)] -= f;
      used[pick] = 1;
      --degree[static_cast<std::size_t>(leaf)];
      --degree[static_cast<std::size_t>(other)];
    }
    double c = 0.0;
    for (std::size_t q = 0; q < chosen_.size(); ++q)
      c += std::max(0.0, flow[q]) * edges_[static_cast<std::size_t>(chosen_[q])].cost;
    if (c < best_cost) {
      best_cost = c;
      best_flows.clear();
      for (std::size_t q = 0; q < chosen_.size(); ++q) best_flows.emplace_back(chosen_[q], std::max(0.0, flow[q]));
    }
  }

  int rows_, cols_;
  std::vector<double> row_, col_;
  std::vector<Edge> edges_;
  std::vector<int> parent_, rank_;
  std::vector<int> chosen_;
  double tol_;
};

}  // namespace

BruteForceResult brute_force_min_cost(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                      bool reservoir) {
  check_pair(mu, nu);
  const std::size_t m = mu.size(), n = nu.size();
  if ((m + 1) * (n + 1) > 30) fail(ErrorCode::OracleLimit, "oracle limit exceeded");
  const double tmu = mu.total(), tnu = nu.total();
  if (!reservoir && std::abs(tmu - tnu) > kBalanceTol * std::max({tmu, tnu, 1e-300}))
    fail(ErrorCode::Unbalanced, "unbalanced: source mass and target mass differ");

  ZeroCoupling g{mu, nu, {}};
  if (m == 0 && n == 0) return {0.0, g};
  if (!reservoir && (m == 0 || n == 0)) return {0.0, g};

  // Rows: sources (+ origin supply), columns: targets (+ origin demand).
  std::vector<double> rows(mu.weights()), cols(nu.weights());
  if (reservoir) {
    rows.push_back(tnu);
    cols.push_back(tmu);
  }
  const int R = static_cast<int>(rows.size()), C = static_cast<int>(cols.size());
  std::vector<Edge> edges;
  for (int r = 0; r < R; ++r)
    for (int c = 0; c < C; ++c) {
      const bool ro = r == static_cast<int>(m), co = c == static_cast<int>(n);
      double cost;
      if (ro && co)
        cost = 0.0;
      else if (ro)
        cost = norm2(nu.atom(static_cast<std::size_t>(c)));
      else if (co)
        cost = norm2(mu.atom(static_cast<std::size_t>(r)));
      else
        cost = dist2(mu.atom(static_cast<std::size_t>(r)), nu.atom(static_cast<std::size_t>(c)));
      edges.push_back({r, c, cost});
    }
  BasisEnumerator en(rows, cols, edges);
  en.run();
  if (std::isinf(en.best_cost)) fail(ErrorCode::Internal, "oracle found no feasible basis");
  for (const auto& [k, f] : en.best_flows) {
    if (!(f > 0.0)) continue;
    const Edge& e = edges[static_cast<std::size_t>(k)];
    const bool ro = e.u == static_cast<int>(m), co = e.v == static_cast<int>(n);
    if (ro && co) continue;
    g.entries.push_back({ro ? kOrigin : e.u, co ? kOrigin : e.v, f});
  }
  sort_entries(g.entries);
  return {coupling_cost(g), g};
}

}  // namespace zcoup
