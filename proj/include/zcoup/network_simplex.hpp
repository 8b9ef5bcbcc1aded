/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <cstddef>
#include <vector>

namespace zcoup {

/// Primal network simplex for uncapacitated min-cost flow with node supplies
/// summing to zero. Spanning trees are strongly feasible and rooted at an
/// artificial node; artificial arcs carry a lexicographically dominant unit
/// cost instead of a big-M constant. Arcs may be appended between calls to
/// run(), which then restarts from the current basis.
class NetworkSimplex {
 public:
  NetworkSimplex(std::vector<double> supply, double eps);

  /// Returns the index of the new arc.
  int add_arc(int source, int target, double cost);
  /// Pivot until no arc has negative reduced cost. Returns the pivot count.
  std::size_t run();
  /// Recompute tree flows from the node supplies (removes drift).
  void recompute_flows();

  int node_count() const noexcept { return nodes_; }
  std::size_t arc_count() const noexcept { return src_.size() - static_cast<std::size_t>(nodes_); }
  int source(int arc) const { return src_[idx(arc)]; }
  int target(int arc) const { return tgt_[idx(arc)]; }
  double cost(int arc) const { return cost_[idx(arc)]; }
  double flow(int arc) const { return flow_[idx(arc)]; }
  /// Lexicographic potential: artificial part and cost part.
  double potential_art(int node) const { return pi_a_[static_cast<std::size_t>(node)]; }
  double potential(int node) const { return pi_c_[static_cast<std::size_t>(node)]; }
  /// Total flow left on artificial arcs (zero iff the arc set is feasible).
  double artificial_flow() const;
  /// Structural self-check used by tests.
  bool tree_consistent() const;

 private:
  static constexpr signed char kTree = 0;
  static constexpr signed char kLower = 1;
  static constexpr int kUp = 1;
  static constexpr int kDown = -1;

  std::size_t idx(int arc) const { return static_cast<std::size_t>(arc + nodes_); }
  double cost_art(int e) const { return (e < nodes_ && src_[static_cast<std::size_t>(e)] == root_) ? 1.0 : 0.0; }
  bool find_entering();
  bool find_join_and_leaving();
  void change_flow(bool change);
  void update_tree();
  void update_potential();

  int nodes_;
  int root_;
  double eps_;
  std::vector<double> supply_;

  std::vector<int> src_, tgt_;
  std::vector<double> cost_, flow_;
  std::vector<signed char> state_;

  std::vector<int> parent_, pred_, thread_, rev_thread_, succ_num_, last_succ_, pred_dir_;
  std::vector<double> pi_a_, pi_c_;
  std::vector<int> dirty_revs_;

  int next_arc_ = 0;
  int in_arc_ = -1, join_ = -1, u_in_ = -1, v_in_ = -1, u_out_ = -1, v_out_ = -1;
  double delta_ = 0.0;
};

}  // namespace zcoup
