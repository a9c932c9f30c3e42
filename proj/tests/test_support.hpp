#pragma once

// Random instance generators and brute-force oracles shared by the unit and
// acceptance suites. Nothing here calls into the code it is used to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "tce/core.hpp"

namespace tce::oracle {

using Table = std::vector<std::vector<unsigned>>;

inline Table random_table(std::mt19937_64& g, std::size_t users, std::size_t instants, unsigned zones) {
  std::uniform_int_distribution<unsigned> z(0, zones - 1);
  Table t(users, std::vector<unsigned>(instants));
  for (auto& row : t)
    for (auto& v : row) v = z(g);
  return t;
}

inline LabelTable to_labels(const Table& t) {
  LabelTable l(t.size(), t.front().size());
  for (std::size_t u = 0; u < t.size(); ++u)
    for (std::size_t k = 0; k < t[u].size(); ++k) l(u, k) = t[u][k];
  return l;
}

// Double-loop transition tally over instants [first, last] for users in
// [user_begin, user_end).
inline std::vector<std::vector<std::uint64_t>> naive_counts(const Table& t, unsigned zones, std::size_t first,
                                                             std::size_t last, std::size_t user_begin,
                                                             std::size_t user_end) {
  std::vector<std::vector<std::uint64_t>> c(zones, std::vector<std::uint64_t>(zones, 0));
  for (unsigned from = 0; from < zones; ++from)
    for (unsigned to = 0; to < zones; ++to)
      for (std::size_t u = user_begin; u < user_end; ++u)
        for (std::size_t k = first; k < last; ++k)
          if (t[u][k] == from && t[u][k + 1] == to) ++c[from][to];
  return c;
}

inline std::vector<std::vector<std::uint64_t>> naive_counts(const Table& t, unsigned zones) {
  return naive_counts(t, zones, 0, t.front().size() - 1, 0, t.size());
}

// Linear scan over every centroid; ties resolved to the lowest id.
inline std::size_t linear_scan_nearest(Vec2 p, const std::vector<Vec2>& cs) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const double d = std::sqrt((p.x - cs[i].x) * (p.x - cs[i].x) + (p.y - cs[i].y) * (p.y - cs[i].y));
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

}  // namespace tce::oracle
