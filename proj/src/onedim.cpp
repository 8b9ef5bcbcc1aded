/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include "zcoup/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace zcoup {

namespace {

// Atom indices on one side of the origin, farthest first; ties by index.
std::vector<std::size_t> side(const DiscreteMeasure& m, int sign) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size(); ++i)
    if ((m.atom(i)[0] > 0.0) == (sign > 0)) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(m.atom(a)[0]) > std::abs(m.atom(b)[0]);
  });
  return idx;
}

void match_side(const DiscreteMeasure& mu, const DiscreteMeasure& nu, int sign,
                std::vector<CouplingEntry>& out) {
  const auto s = side(mu, sign);
  const auto t = side(nu, sign);
  std::size_t i = 0, j = 0;
  double a = s.empty() ? 0.0 : mu.weight(s[0]);
  double b = t.empty() ? 0.0 : nu.weight(t[0]);
  while (i < s.size() && j < t.size()) {
    const double m = std::min(a, b);
    out.push_back({static_cast<long>(s[i]), static_cast<long>(t[j]), m});
    a -= m;
    b -= m;
    if (a <= 0.0 && ++i < s.size()) a = mu.weight(s[i]);
    if (b <= 0.0 && ++j < t.size()) b = nu.weight(t[j]);
  }
  for (; i < s.size(); ++i) {
    if (a > 0.0) out.push_back({static_cast<long>(s[i]), kOrigin, a});
    if (i + 1 < s.size()) a = mu.weight(s[i + 1]);
  }
  for (; j < t.size(); ++j) {
    if (b > 0.0) out.push_back({kOrigin, static_cast<long>(t[j]), b});
    if (j + 1 < t.size()) b = nu.weight(t[j + 1]);
  }
}

}  // namespace

ZeroCoupling solve_1d(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  require(mu.dim() == 1 && nu.dim() == 1, "solve_1d needs one-dimensional measures");
  ZeroCoupling g{mu, nu, {}};
  match_side(mu, nu, +1, g.entries);
  match_side(mu, nu, -1, g.entries);
  auto key = [](long v) { return v == kOrigin ? std::numeric_limits<long>::max() : v; };
  std::sort(g.entries.begin(), g.entries.end(), [&](const CouplingEntry& x, const CouplingEntry& y) {
    return std::pair(key(x.src), key(x.dst)) < std::pair(key(y.src), key(y.dst));
  });
  return g;
}

}  // namespace zcoup
