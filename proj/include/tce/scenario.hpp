#pragma once

// Synthetic festival traces: Random Waypoint where each waypoint is drawn
// from a weighted set of attractor rectangles, plus tiered constant traffic.

#include <cmath>
#include <cstdint>
#include <deque>
#include <numeric>
#include <string>
#include <vector>

#include "tce/core.hpp"
#include "tce/rng.hpp"

namespace tce {

struct Attractor {
  Rect region;
  double weight = 1.0;
  std::string label;
};

struct MobilityParams {
  double speed_min = 0.0;  // m/s
  double speed_max = 0.08;  // m/s
  std::vector<Attractor> attractors;
  std::size_t pause_instants = 0;
  // Mass given to uniform waypoints anywhere in the precinct.
  double background_weight = 0.0;
};

struct TrafficTier {
  double fraction;
  double rate;  // Mbit/s
};

struct TrafficTiers {
  std::vector<TrafficTier> tiers;
};

// Largest-remainder apportionment of user_count over the tier fractions.
// Remainder ties go to the lower tier index.
inline std::vector<std::size_t> tier_counts(std::size_t user_count, const TrafficTiers& traffic) {
  const auto& tiers = traffic.tiers;
  if (tiers.empty()) throw Error(ErrorKind::invalid_input, "traffic tiers: empty tier list");
  double sum = 0.0;
  for (const auto& t : tiers) {
    if (!(t.fraction > 0.0 && t.fraction <= 1.0))
      throw Error(ErrorKind::invalid_input, "traffic tiers: fraction must be in (0, 1]");
    if (!(t.rate >= 0.0) || !std::isfinite(t.rate))
      throw Error(ErrorKind::invalid_input, "traffic tiers: rate must be >= 0");
    sum += t.fraction;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorKind::invalid_input, "traffic tiers: fractions must sum to 1");

  std::vector<std::size_t> counts(tiers.size());
  std::vector<double> remainder(tiers.size());
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < tiers.size(); ++i) {
    const double quota = tiers[i].fraction * static_cast<double>(user_count);
    // Nudge so quotas like 3 * (1/3) land on the integer.
    counts[i] = static_cast<std::size_t>(std::floor(quota + 1e-9));
    remainder[i] = quota - static_cast<double>(counts[i]);
    assigned += counts[i];
  }
  std::vector<std::size_t> order(tiers.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < user_count; ++k, ++assigned) ++counts[order[k % order.size()]];
  while (assigned > user_count) {
    // Only reachable through rounding on oversubscribed quotas.
    for (auto it = order.rbegin(); it != order.rend() && assigned > user_count; ++it)
      if (counts[*it] > 0) {
        --counts[*it];
        --assigned;
      }
  }
  return counts;
}

namespace detail {

// Region index: -1 for the precinct, otherwise an outside-region index.
using RegionIndex = int;

struct VenueRouting {
  const Venue& venue;
  std::vector<Rect> gates;  // precinct ∩ outside region, per outside region

  explicit VenueRouting(const Venue& v) : venue(v) {
    for (const auto& r : v.outside_regions()) gates.push_back(v.precinct().intersection(r));
  }

  const Rect& rect(RegionIndex r) const {
    return r < 0 ? venue.precinct() : venue.outside_regions()[static_cast<std::size_t>(r)];
  }

  RegionIndex host_of(const Rect& area) const {
    if (area.within(venue.precinct())) return -1;
    const auto& out = venue.outside_regions();
    for (std::size_t i = 0; i < out.size(); ++i)
      if (area.within(out[i])) return static_cast<RegionIndex>(i);
    throw Error(ErrorKind::invalid_input, "attractor region is not inside the venue");
  }
};

struct Leg {
  Vec2 to;
  RegionIndex region;
};

struct Waypoint {
  Vec2 p;
  RegionIndex region;
};

}  // namespace detail

// Generates user_count traces on the grid. Legs between the precinct and an
// outside region pass through the shared edge, so every sampled position
// lies inside the declared venue.
inline TraceSet generate_scenario(const Venue& venue, const TimeGrid& grid, std::size_t user_count,
                                  const MobilityParams& mobility, const TrafficTiers& traffic, std::uint64_t seed) {
  using detail::Leg;
  using detail::RegionIndex;
  using detail::Waypoint;

  if (user_count == 0) throw Error(ErrorKind::invalid_input, "generate_scenario: user_count must be positive");
  if (mobility.attractors.empty()) throw Error(ErrorKind::invalid_input, "generate_scenario: empty attractor list");
  if (!(mobility.speed_min >= 0.0 && mobility.speed_min <= mobility.speed_max) || !std::isfinite(mobility.speed_max))
    throw Error(ErrorKind::invalid_input, "generate_scenario: need 0 <= speed_min <= speed_max");
  if (!(mobility.background_weight >= 0.0))
    throw Error(ErrorKind::invalid_input, "generate_scenario: background_weight must be >= 0");
  const auto counts = tier_counts(user_count, traffic);

  const detail::VenueRouting routing(venue);
  std::vector<RegionIndex> hosts;
  std::vector<double> cumulative;
  double total_weight = 0.0;
  for (const auto& a : mobility.attractors) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
      throw Error(ErrorKind::invalid_input, "attractor '" + a.label + "': weight must be positive");
    if (!a.region.valid()) throw Error(ErrorKind::invalid_input, "attractor '" + a.label + "': malformed region");
    const auto host = routing.host_of(a.region);
    if (host >= 0 && !venue.outside_regions()[static_cast<std::size_t>(host)].touches(venue.precinct()))
      throw Error(ErrorKind::invalid_input,
                  "attractor '" + a.label + "': its outside region is not reachable from the precinct");
    hosts.push_back(host);
    total_weight += a.weight;
    cumulative.push_back(total_weight);
  }
  total_weight += mobility.background_weight;

  auto draw_waypoint = [&](Rng& rng) -> Waypoint {
    const double r = rng.uniform01() * total_weight;
    std::size_t k = 0;
    while (k < cumulative.size() && r >= cumulative[k]) ++k;
    const Rect area = k < cumulative.size() ? mobility.attractors[k].region : venue.precinct();
    const RegionIndex host = k < cumulative.size() ? hosts[k] : -1;
    const Vec2 p{rng.uniform(area.min.x, area.max.x), rng.uniform(area.min.y, area.max.y)};
    return {area.clamp(p), host};
  };

  auto route = [&](Vec2 from, RegionIndex from_region, const Waypoint& to) {
    std::deque<Leg> legs;
    const Vec2 mid = 0.5 * (from + to.p);
    if (from_region != to.region) {
      if (from_region >= 0)
        legs.push_back({routing.gates[static_cast<std::size_t>(from_region)].clamp(mid), from_region});
      if (to.region >= 0) legs.push_back({routing.gates[static_cast<std::size_t>(to.region)].clamp(mid), -1});
    }
    legs.push_back({to.p, to.region});
    return legs;
  };

  const double step = grid.step_seconds();
  const double scale = venue.index_scale();
  Matrix<Vec2> positions(user_count, grid.instant_count());

  for (std::size_t u = 0; u < user_count; ++u) {
    Rng rng(derive_seed(seed, 1, u));
    const Waypoint start = draw_waypoint(rng);
    Vec2 pos = start.p;
    RegionIndex region = start.region;
    std::deque<Leg> path;
    double speed = 0.0;
    std::size_t pausing = 0;
    positions(u, 0) = pos;

    for (std::size_t t = 1; t < grid.instant_count(); ++t) {
      if (pausing > 0) {
        --pausing;
        positions(u, t) = pos;
        continue;
      }
      double time_left = step;
      for (int guard = 0; time_left > 0.0 && guard < 10000; ++guard) {
        if (path.empty()) {
          const Waypoint next = draw_waypoint(rng);
          path = route(pos, region, next);
          speed = rng.uniform(mobility.speed_min, mobility.speed_max);
        }
        if (!(speed > 0.0)) break;
        const Leg& leg = path.front();
        const double d = distance(pos, leg.to);
        const double reach = d * scale / speed;
        if (reach <= time_left) {
          pos = leg.to;
          region = leg.region;
          time_left -= reach;
          path.pop_front();
          if (path.empty() && mobility.pause_instants > 0) {
            pausing = mobility.pause_instants;
            break;
          }
        } else {
          const double f = (time_left * speed / scale) / d;
          pos = routing.rect(leg.region).clamp(pos + f * (leg.to - pos));
          time_left = 0.0;
        }
      }
      positions(u, t) = pos;
    }
  }

  // Tier membership: seeded shuffle of user ids, then consecutive blocks.
  std::vector<std::size_t> order(user_count);
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle(derive_seed(seed, 2));
  for (std::size_t i = user_count; i > 1; --i) std::swap(order[i - 1], order[shuffle.index(i)]);
  std::vector<double> rates(user_count, 0.0);
  std::size_t next = 0;
  for (std::size_t k = 0; k < counts.size(); ++k)
    for (std::size_t c = 0; c < counts[k]; ++c) rates[order[next++]] = traffic.tiers[k].rate;

  return TraceSet(std::move(positions), std::move(rates));
}

// Festival layout used for the reference scenario: 80 x 50 precinct with a
// 10 x 50 strip beyond the right edge holding the entrance/exit.
inline Venue festival_venue() {
  return Venue(Rect{{0.0, 0.0}, {80.0, 50.0}}, {Rect{{80.0, 0.0}, {90.0, 50.0}}}, 1.0);
}

// Stage middle-left; food, drinks, toilets and a Ferris wheel along the top
// and bottom edges; entrance in the outside strip. Stage weight 0.5, the
// remainder split equally. These weights are defaults, not measured values.
inline MobilityParams festival_mobility() {
  MobilityParams m;
  m.speed_min = 0.0;
  m.speed_max = 0.08;
  m.attractors = {
      {Rect{{2.0, 15.0}, {17.0, 35.0}}, 0.5, "stage"},
      {Rect{{20.0, 42.0}, {40.0, 50.0}}, 0.1, "food"},
      {Rect{{55.0, 42.0}, {70.0, 50.0}}, 0.1, "toilets"},
      {Rect{{20.0, 0.0}, {40.0, 8.0}}, 0.1, "drinks"},
      {Rect{{55.0, 0.0}, {70.0, 8.0}}, 0.1, "ferris_wheel"},
      {Rect{{82.0, 20.0}, {90.0, 30.0}}, 0.1, "entrance"},
  };
  return m;
}

// Tier list as printed for the reference event: 0, 10 and 10 Mbit/s thirds.
inline TrafficTiers festival_traffic() {
  return {{{1.0 / 3.0, 0.0}, {1.0 / 3.0, 10.0}, {1.0 / 3.0, 10.0}}};
}

}  // namespace tce
