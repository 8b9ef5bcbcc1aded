/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/network_simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zcoup/error.hpp"

namespace zcoup {

NetworkSimplex::NetworkSimplex(std::vector<double> supply, double eps)
    : nodes_(static_cast<int>(supply.size())), root_(nodes_), eps_(eps), supply_(std::move(supply)) {
  const auto n = static_cast<std::size_t>(nodes_);
  parent_.assign(n + 1, -1);
  pred_.assign(n + 1, -1);
  thread_.assign(n + 1, 0);
  rev_thread_.assign(n + 1, 0);
  succ_num_.assign(n + 1, 1);
  last_succ_.assign(n + 1, 0);
  pred_dir_.assign(n + 1, kUp);
  pi_a_.assign(n + 1, 0.0);
  pi_c_.assign(n + 1, 0.0);
  src_.resize(n);
  tgt_.resize(n);
  cost_.assign(n, 0.0);
  flow_.assign(n, 0.0);
  state_.assign(n, kTree);

  parent_[n] = -1;
  pred_[n] = -1;
  thread_[n] = 0;
  rev_thread_[0] = root_;
  succ_num_[n] = nodes_ + 1;
  last_succ_[n] = root_ - 1;
  if (nodes_ == 0) {
    thread_[n] = root_;
    rev_thread_[n] = root_;
    last_succ_[n] = root_;
  }
  for (int u = 0; u < nodes_; ++u) {
    const auto su = static_cast<std::size_t>(u);
    parent_[su] = root_;
    pred_[su] = u;
    thread_[su] = u + 1;
    rev_thread_[su + 1] = u;
    succ_num_[su] = 1;
    last_succ_[su] = u;
    if (supply_[su] >= 0.0) {
      pred_dir_[su] = kUp;
      src_[su] = u;
      tgt_[su] = root_;
      flow_[su] = supply_[su];
      pi_a_[su] = 0.0;
    } else {
      pred_dir_[su] = kDown;
      src_[su] = root_;
      tgt_[su] = u;
      flow_[su] = -supply_[su];
      pi_a_[su] = 1.0;
    }
  }
}

int NetworkSimplex::add_arc(int source, int target, double cost) {
  require(source >= 0 && source < nodes_ && target >= 0 && target < nodes_, "arc endpoint out of range");
  src_.push_back(source);
  tgt_.push_back(target);
  cost_.push_back(cost);
  flow_.push_back(0.0);
  state_.push_back(kLower);
  return static_cast<int>(src_.size()) - 1 - nodes_;
}

double NetworkSimplex::artificial_flow() const {
  double s = 0.0;
  for (int e = 0; e < nodes_; ++e) s += flow_[static_cast<std::size_t>(e)];
  return s;
}

bool NetworkSimplex::find_entering() {
  const int first = nodes_;
  const int end = static_cast<int>(src_.size());
  const int count = end - first;
  if (count <= 0) return false;
  const int block = std::max(10, static_cast<int>(std::sqrt(static_cast<double>(count))));
  if (next_arc_ < first || next_arc_ >= end) next_arc_ = first;

  double min_a = 0.0, min_c = 0.0;
  bool found = false;
  int cnt = block;
  int e = next_arc_;
  for (int visited = 0; visited < count; ++visited) {
    const auto se = static_cast<std::size_t>(e);
    if (state_[se] == kLower) {
      const auto s = static_cast<std::size_t>(src_[se]);
      const auto t = static_cast<std::size_t>(tgt_[se]);
      const double a = pi_a_[s] - pi_a_[t];
      const double c = cost_[se] + pi_c_[s] - pi_c_[t];
      const bool negative = a < -0.5 || (a < 0.5 && c < -eps_);
      if (negative && (!found || a < min_a - 0.5 || (std::abs(a - min_a) < 0.5 && c < min_c))) {
        found = true;
        min_a = a;
        min_c = c;
        in_arc_ = e;
      }
    }
    if (++e == end) e = first;
    if (--cnt == 0) {
      if (found) break;
      cnt = block;
    }
  }
  next_arc_ = e;
  return found;
}

bool NetworkSimplex::find_join_and_leaving() {
  const auto in = static_cast<std::size_t>(in_arc_);
  int u = src_[in], v = tgt_[in];
  while (u != v) {
    if (succ_num_[static_cast<std::size_t>(u)] < succ_num_[static_cast<std::size_t>(v)])
      u = parent_[static_cast<std::size_t>(u)];
    else
      v = parent_[static_cast<std::size_t>(v)];
  }
  join_ = u;

  const int first = src_[in];
  const int second = tgt_[in];
  delta_ = std::numeric_limits<double>::infinity();
  u_out_ = -1;
  int result = 0;
  for (int w = first; w != join_; w = parent_[static_cast<std::size_t>(w)]) {
    const auto sw = static_cast<std::size_t>(w);
    if (pred_dir_[sw] == kUp) {
      const double d = flow_[static_cast<std::size_t>(pred_[sw])];
      if (d < delta_) {
        delta_ = d;
        u_out_ = w;
        result = 1;
      }
    }
  }
  for (int w = second; w != join_; w = parent_[static_cast<std::size_t>(w)]) {
    const auto sw = static_cast<std::size_t>(w);
    if (pred_dir_[sw] == kDown) {
      const double d = flow_[static_cast<std::size_t>(pred_[sw])];
      if (d <= delta_) {
        delta_ = d;
        u_out_ = w;
        result = 2;
      }
    }
  }
  if (result == 0) return false;
  if (result == 1) {
    u_in_ = first;
    v_in_ = second;
  } else {
    u_in_ = second;
    v_in_ = first;
  }
  return true;
}

void NetworkSimplex::change_flow(bool change) {
  const auto in = static_cast<std::size_t>(in_arc_);
  if (delta_ > 0.0) {
    const double val = delta_;
    flow_[in] += val;
    for (int u = src_[in]; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto su = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[su])] -= pred_dir_[su] * val;
    }
    for (int u = tgt_[in]; u != join_; u = parent_[static_cast<std::size_t>(u)]) {
      const auto su = static_cast<std::size_t>(u);
      flow_[static_cast<std::size_t>(pred_[su])] += pred_dir_[su] * val;
    }
  }
  if (change) {
    state_[in] = kTree;
    const auto out = static_cast<std::size_t>(pred_[static_cast<std::size_t>(u_out_)]);
    state_[out] = kLower;
    flow_[out] = 0.0;
  }
}

void NetworkSimplex::update_tree() {
  auto& parent = parent_;
  auto& thread = thread_;
  auto& rev = rev_thread_;
  auto& succ = succ_num_;
  auto& last = last_succ_;
  auto at = [](int x) { return static_cast<std::size_t>(x); };

  const int old_rev_thread = rev[at(u_out_)];
  const int old_succ_num = succ[at(u_out_)];
  const int old_last_succ = last[at(u_out_)];
  v_out_ = parent[at(u_out_)];

  if (u_in_ == u_out_) {
    parent[at(u_in_)] = v_in_;
    pred_[at(u_in_)] = in_arc_;
    pred_dir_[at(u_in_)] = u_in_ == src_[at(in_arc_)] ? kUp : kDown;
    if (thread[at(v_in_)] != u_out_) {
      int after = thread[at(old_last_succ)];
      thread[at(old_rev_thread)] = after;
      rev[at(after)] = old_rev_thread;
      after = thread[at(v_in_)];
      thread[at(v_in_)] = u_out_;
      rev[at(u_out_)] = v_in_;
      thread[at(old_last_succ)] = after;
      rev[at(after)] = old_last_succ;
    }
  } else {
    const int thread_continue =
        old_rev_thread == v_in_ ? thread[at(old_last_succ)] : thread[at(v_in_)];

    // Re-hang the stem u_in .. u_out below v_in.
    int stem = u_in_;
    int par_stem = v_in_;
    int next_stem;
    int lst = last[at(u_in_)];
    int before, after = thread[at(lst)];
    thread[at(v_in_)] = u_in_;
    dirty_revs_.clear();
    dirty_revs_.push_back(v_in_);
    while (stem != u_out_) {
      next_stem = parent[at(stem)];
      thread[at(lst)] = next_stem;
      dirty_revs_.push_back(lst);

      before = rev[at(stem)];
      thread[at(before)] = after;
      rev[at(after)] = before;

      parent[at(stem)] = par_stem;
      par_stem = stem;
      stem = next_stem;

      lst = last[at(stem)] == last[at(par_stem)] ? rev[at(par_stem)] : last[at(stem)];
      after = thread[at(lst)];
    }
    parent[at(u_out_)] = par_stem;
    thread[at(lst)] = thread_continue;
    rev[at(thread_continue)] = lst;
    last[at(u_out_)] = lst;

    if (old_rev_thread != v_in_) {
      thread[at(old_rev_thread)] = after;
      rev[at(after)] = old_rev_thread;
    }
    for (int u : dirty_revs_) rev[at(thread[at(u)])] = u;

    int tmp_sc = 0;
    const int tmp_ls = last[at(u_out_)];
    for (int u = u_out_, p = parent[at(u)]; u != u_in_; u = p, p = parent[at(u)]) {
      pred_[at(u)] = pred_[at(p)];
      pred_dir_[at(u)] = -pred_dir_[at(p)];
      tmp_sc += succ[at(u)] - succ[at(p)];
      succ[at(u)] = tmp_sc;
      last[at(p)] = tmp_ls;
    }
    pred_[at(u_in_)] = in_arc_;
    pred_dir_[at(u_in_)] = u_in_ == src_[at(in_arc_)] ? kUp : kDown;
    succ[at(u_in_)] = old_succ_num;
  }

  const int up_limit_out = last[at(join_)] == v_in_ ? join_ : -1;
  const int last_succ_out = last[at(u_out_)];
  for (int u = v_in_; u != -1 && last[at(u)] == v_in_; u = parent[at(u)]) last[at(u)] = last_succ_out;

  if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
    for (int u = v_out_; u != up_limit_out && last[at(u)] == old_last_succ; u = parent[at(u)])
      last[at(u)] = old_rev_thread;
  } else if (last_succ_out != old_last_succ) {
    for (int u = v_out_; u != up_limit_out && last[at(u)] == old_last_succ; u = parent[at(u)])
      last[at(u)] = last_succ_out;
  }

  for (int u = v_in_; u != join_; u = parent[at(u)]) succ[at(u)] += old_succ_num;
  for (int u = v_out_; u != join_; u = parent[at(u)]) succ[at(u)] -= old_succ_num;
}

void NetworkSimplex::update_potential() {
  const auto ui = static_cast<std::size_t>(u_in_);
  const auto vi = static_cast<std::size_t>(v_in_);
  const auto in = static_cast<std::size_t>(in_arc_);
  const int dir = pred_dir_[ui];
  const double sig_a = pi_a_[vi] - pi_a_[ui] - dir * cost_art(in_arc_);
  const double sig_c = pi_c_[vi] - pi_c_[ui] - dir * cost_[in];
  const int end = thread_[static_cast<std::size_t>(last_succ_[ui])];
  for (int u = u_in_; u != end; u = thread_[static_cast<std::size_t>(u)]) {
    pi_a_[static_cast<std::size_t>(u)] += sig_a;
    pi_c_[static_cast<std::size_t>(u)] += sig_c;
  }
}

std::size_t NetworkSimplex::run() {
  std::size_t pivots = 0;
  while (find_entering()) {
    if (!find_join_and_leaving()) fail(ErrorCode::Internal, "network simplex: unbounded cycle");
    const bool change = u_out_ != -1 && pred_[static_cast<std::size_t>(u_out_)] != in_arc_;
    change_flow(change);
    if (change) {
      update_tree();
      update_potential();
    }
    ++pivots;
  }
  return pivots;
}

void NetworkSimplex::recompute_flows() {
  const auto n = static_cast<std::size_t>(nodes_);
  std::vector<int> order;
  order.reserve(n);
  for (int u = thread_[n]; u != root_; u = thread_[static_cast<std::size_t>(u)]) order.push_back(u);
  std::vector<double> acc(supply_);
  acc.push_back(0.0);
  for (std::size_t e = n; e < flow_.size(); ++e)
    if (state_[e] != kTree) flow_[e] = 0.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto u = static_cast<std::size_t>(*it);
    const auto e = static_cast<std::size_t>(pred_[u]);
    const double f = pred_dir_[u] == kUp ? acc[u] : -acc[u];
    flow_[e] = std::max(0.0, f);
    acc[static_cast<std::size_t>(parent_[u])] += acc[u];
  }
}

bool NetworkSimplex::tree_consistent() const {
  const auto n = static_cast<std::size_t>(nodes_);
  // The thread must visit every node exactly once, parents before children.
  std::vector<char> seen(n + 1, 0);
  int u = root_;
  std::size_t visited = 0;
  do {
    if (seen[static_cast<std::size_t>(u)]) return false;
    seen[static_cast<std::size_t>(u)] = 1;
    if (u != root_ && !seen[static_cast<std::size_t>(parent_[static_cast<std::size_t>(u)])]) return false;
    ++visited;
    const int nx = thread_[static_cast<std::size_t>(u)];
    if (rev_thread_[static_cast<std::size_t>(nx)] != u) return false;
    u = nx;
  } while (u != root_ && visited <= n + 1);
  if (visited != n + 1) return false;
  for (std::size_t v = 0; v < n; ++v) {
    const auto e = static_cast<std::size_t>(pred_[v]);
    const int p = parent_[v];
    if (state_[e] != kTree) return false;
    const bool up = src_[e] == static_cast<int>(v) && tgt_[e] == p;
    const bool down = src_[e] == p && tgt_[e] == static_cast<int>(v);
    if (!(pred_dir_[v] == kUp ? up : down)) return false;
    const double ra = cost_art(static_cast<int>(e)) + pi_a_[static_cast<std::size_t>(src_[e])] -
                      pi_a_[static_cast<std::size_t>(tgt_[e])];
    const double rc = cost_[e] + pi_c_[static_cast<std::size_t>(src_[e])] - pi_c_[static_cast<std::size_t>(tgt_[e])];
    if (std::abs(ra) > 0.5 || std::abs(rc) > 1e-6 * (1.0 + std::abs(cost_[e]))) return false;
  }
  // Subtree sizes.
  std::vector<int> size(n + 1, 1);
  std::vector<int> order;
  for (int w = thread_[n]; w != root_; w = thread_[static_cast<std::size_t>(w)]) order.push_back(w);
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    size[static_cast<std::size_t>(parent_[static_cast<std::size_t>(*it)])] += size[static_cast<std::size_t>(*it)];
  for (std::size_t v = 0; v <= n; ++v)
    if (size[v] != succ_num_[v]) return false;
  return true;
}

}  // namespace zcoup
