#pragma once

// Fixed spatial zones. One K-Means instance clusters every in-precinct sample
// of every user at every instant; an independent instance clusters the
// out-of-precinct samples. Outside zone ids follow the inside ids.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "tce/core.hpp"
#include "tce/rng.hpp"

namespace tce {

struct KMeansResult {
  std::vector<Vec2> centroids;
  std::vector<std::size_t> assignment;
  // Within-cluster sum of squares after each assignment step.
  std::vector<double> objective;
  std::size_t iterations = 0;
};

inline constexpr std::size_t kMaxLloydIterations = 300;

// Nearest centroid by Euclidean distance; ties go to the lowest index.
inline std::size_t nearest_centroid(Vec2 p, std::span<const Vec2> centroids) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    const double d = squared_distance(p, centroids[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

inline std::size_t count_distinct(std::span<const Vec2> points) {
  std::set<std::pair<double, double>> seen;
  for (const auto& p : points) seen.emplace(p.x, p.y);
  return seen.size();
}

// Lloyd's algorithm with k-means++ seeding. Stops when no assignment changes
// or after kMaxLloydIterations. Centroids are returned sorted by (x, y).
inline KMeansResult kmeans(std::span<const Vec2> points, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error(ErrorKind::invalid_input, "kmeans: k must be positive");
  if (count_distinct(points) < k)
    throw Error(ErrorKind::infeasible, "kmeans: fewer than " + std::to_string(k) + " distinct points");

  const std::size_t n = points.size();
  Rng rng(seed);
  KMeansResult res;
  auto& c = res.centroids;

  // k-means++ seeding: D^2 sampling.
  c.push_back(points[rng.index(n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], c[0]);
  while (c.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    const double r = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > r) break;
    }
    c.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], squared_distance(points[i], c.back()));
  }

  auto& assign = res.assignment;
  assign.assign(n, k);
  std::vector<std::size_t> sizes(k);
  std::vector<Vec2> sums(k);
  for (std::size_t iter = 0; iter < kMaxLloydIterations; ++iter) {
    bool changed = false;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = nearest_centroid(points[i], c);
      if (a != assign[i]) {
        assign[i] = a;
        changed = true;
      }
      objective += squared_distance(points[i], c[a]);
    }
    res.objective.push_back(objective);
    res.iterations = iter + 1;
    if (!changed) break;

    std::fill(sizes.begin(), sizes.end(), 0);
    std::fill(sums.begin(), sums.end(), Vec2{});
    for (std::size_t i = 0; i < n; ++i) {
      ++sizes[assign[i]];
      sums[assign[i]] = sums[assign[i]] + points[i];
    }
    for (std::size_t j = 0; j < k; ++j) {
      if (sizes[j] > 0) {
        c[j] = (1.0 / static_cast<double>(sizes[j])) * sums[j];
        continue;
      }
      // Empty cluster: reseed at the member of the largest cluster farthest
      // from that cluster's centroid.
      const auto largest = static_cast<std::size_t>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
      const Vec2 lc = (1.0 / static_cast<double>(sizes[largest])) * sums[largest];
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i)
        if (assign[i] == largest) {
          const double d = squared_distance(points[i], lc);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
      c[j] = points[far];
      assign[far] = j;
      --sizes[largest];
      sums[largest] = sums[largest] - points[far];
      sizes[j] = 1;
      sums[j] = points[far];
    }
  }

  // Canonical ordering so zone ids do not depend on seeding order.
  std::vector<std::size_t> order(k);
  for (std::size_t j = 0; j < k; ++j) order[j] = j;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::tie(c[a].x, c[a].y) < std::tie(c[b].x, c[b].y);
  });
  std::vector<std::size_t> rank(k);
  std::vector<Vec2> sorted(k);
  for (std::size_t j = 0; j < k; ++j) {
    rank[order[j]] = j;
    sorted[j] = c[order[j]];
  }
  c = std::move(sorted);
  for (auto& a : assign) a = rank[a];
  return res;
}

class Zoning {
 public:
  Zoning(std::vector<Vec2> inside, std::vector<Vec2> outside, LabelTable labels)
      : inside_(std::move(inside)), outside_(std::move(outside)), labels_(std::move(labels)) {
    if (inside_.empty()) throw Error(ErrorKind::invalid_input, "zoning: no inside centroids");
    for (auto z : labels_.data())
      if (z >= zone_count()) throw Error(ErrorKind::invalid_input, "zoning: label out of range");
  }

  const std::vector<Vec2>& inside_centroids() const { return inside_; }
  const std::vector<Vec2>& outside_centroids() const { return outside_; }
  std::size_t zone_count() const { return inside_.size() + outside_.size(); }
  bool is_outside_zone(ZoneId z) const { return z >= inside_.size(); }
  Vec2 centroid(ZoneId z) const {
    if (z >= zone_count()) throw Error(ErrorKind::invalid_input, "zoning: zone id out of range");
    return z < inside_.size() ? inside_[z] : outside_[z - inside_.size()];
  }
  const LabelTable& labels() const { return labels_; }

 private:
  std::vector<Vec2> inside_;
  std::vector<Vec2> outside_;
  LabelTable labels_;
};

// Zone of a position among the centroids of its own region class.
inline ZoneId assign_zone(Vec2 p, std::span<const Vec2> inside, std::span<const Vec2> outside, const Venue& venue) {
  if (classify_position(p, venue) == Region::inside) return static_cast<ZoneId>(nearest_centroid(p, inside));
  if (outside.empty()) throw Error(ErrorKind::no_zone, "assign: outside point but no outside centroids");
  return static_cast<ZoneId>(inside.size() + nearest_centroid(p, outside));
}

inline ZoneId assign(Vec2 p, const Zoning& zoning, const Venue& venue) {
  return assign_zone(p, zoning.inside_centroids(), zoning.outside_centroids(), venue);
}

// Labels every (user, instant) against fixed centroids.
inline LabelTable label_traces(const TraceSet& traces, std::span<const Vec2> inside, std::span<const Vec2> outside,
                               const Venue& venue) {
  LabelTable labels(traces.user_count(), traces.instant_count());
  for (std::size_t u = 0; u < traces.user_count(); ++u)
    for (std::size_t t = 0; t < traces.instant_count(); ++t)
      labels(u, t) = assign_zone(traces.position(u, t), inside, outside, venue);
  return labels;
}

inline Zoning cluster(const TraceSet& traces, const Venue& venue, std::size_t k_inside, std::size_t k_outside,
                      std::uint64_t seed) {
  std::vector<Vec2> in_pts;
  std::vector<Vec2> out_pts;
  for (const auto& p : traces.positions().data())
    (classify_position(p, venue) == Region::inside ? in_pts : out_pts).push_back(p);
  if (in_pts.empty()) throw Error(ErrorKind::infeasible, "cluster: no in-precinct positions");

  auto inside = kmeans(in_pts, k_inside, derive_seed(seed, 10)).centroids;
  std::vector<Vec2> outside;
  if (!out_pts.empty()) {
    if (k_outside == 0) throw Error(ErrorKind::infeasible, "cluster: outside positions exist but k_outside is 0");
    outside = kmeans(out_pts, k_outside, derive_seed(seed, 11)).centroids;
  }
  auto labels = label_traces(traces, inside, outside, venue);
  return Zoning(std::move(inside), std::move(outside), std::move(labels));
}

}  // namespace tce
