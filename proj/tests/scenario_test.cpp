#include <gtest/gtest.h>

#include <map>
#include <random>

#include "tce/scenario.hpp"

using namespace tce;

namespace {

const TimeGrid kGrid(300, 60);

double max_step_m(const TraceSet& tr, const Venue& v) {
  double worst = 0.0;
  for (std::size_t u = 0; u < tr.user_count(); ++u)
    for (std::size_t t = 0; t + 1 < tr.instant_count(); ++t)
      worst = std::max(worst, distance(tr.position(u, t + 1), tr.position(u, t)) * v.index_scale());
  return worst;
}

}  // namespace

TEST(TierCounts, ThreeUsersThreeTiers) {
  const TrafficTiers tiers{{{1.0 / 3, 0.0}, {1.0 / 3, 5.0}, {1.0 / 3, 10.0}}};
  EXPECT_EQ(tier_counts(3, tiers), (std::vector<std::size_t>{1, 1, 1}));
  const auto tr = generate_scenario(festival_venue(), kGrid, 3, festival_mobility(), tiers, 5);
  std::map<double, int> per_rate;
  for (double r : tr.mean_traffic()) ++per_rate[r];
  EXPECT_EQ(per_rate, (std::map<double, int>{{0.0, 1}, {5.0, 1}, {10.0, 1}}));
}

TEST(TierCounts, LargestRemainder) {
  // 10 users over (0.5, 0.3, 0.2) -> exact; 7 users over thirds -> 3,2,2.
  EXPECT_EQ(tier_counts(10, {{{0.5, 0}, {0.3, 1}, {0.2, 2}}}), (std::vector<std::size_t>{5, 3, 2}));
  EXPECT_EQ(tier_counts(7, festival_traffic()), (std::vector<std::size_t>{3, 2, 2}));
  // quotas 1.4, 1.8, 1.8 -> floors 1,1,1 and remainders go to tiers 1 and 2
  EXPECT_EQ(tier_counts(5, {{{0.28, 0}, {0.36, 1}, {0.36, 2}}}), (std::vector<std::size_t>{1, 2, 2}));
  EXPECT_THROW(tier_counts(3, {{{0.5, 0}, {0.4, 1}}}), Error);
  EXPECT_THROW(tier_counts(3, {{{1.0, -1}}}), Error);
}

TEST(GenerateScenario, ZeroSpeedIsStatic) {
  auto m = festival_mobility();
  m.speed_max = 0.0;
  const auto tr = generate_scenario(festival_venue(), kGrid, 20, m, festival_traffic(), 1);
  for (std::size_t u = 0; u < tr.user_count(); ++u)
    for (std::size_t t = 1; t < tr.instant_count(); ++t) EXPECT_EQ(tr.position(u, t), tr.position(u, 0));
}

TEST(GenerateScenario, DeterministicForSeed) {
  const auto a = generate_scenario(festival_venue(), kGrid, 50, festival_mobility(), festival_traffic(), 42);
  const auto b = generate_scenario(festival_venue(), kGrid, 50, festival_mobility(), festival_traffic(), 42);
  const auto c = generate_scenario(festival_venue(), kGrid, 50, festival_mobility(), festival_traffic(), 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(GenerateScenario, KinematicsAndContainment) {
  const auto v = festival_venue();
  const auto tr = generate_scenario(v, kGrid, 300, festival_mobility(), festival_traffic(), 7);
  EXPECT_LE(max_step_m(tr, v), 0.08 * 300 + 1e-9);
  for (const auto& p : tr.positions().data()) ASSERT_TRUE(v.contains(p)) << p.x << "," << p.y;
}

TEST(GenerateScenario, StageAttractsMostOccupancy) {
  const auto v = festival_venue();
  const auto m = festival_mobility();
  const auto tr = generate_scenario(v, kGrid, 2000, m, festival_traffic(), 11);
  std::map<std::string, std::size_t> hits;
  for (const auto& p : tr.positions().data())
    for (const auto& a : m.attractors)
      if (a.region.contains(p)) ++hits[a.label];
  for (const auto& a : m.attractors) {
    if (a.label != "stage") {
      EXPECT_GT(hits["stage"], hits[a.label]) << a.label;
    }
  }
  EXPECT_GT(hits["entrance"], 0u);  // the outside strip is actually visited
}

TEST(GenerateScenario, PausesHoldPosition) {
  auto m = festival_mobility();
  m.pause_instants = 3;
  const auto v = festival_venue();
  const auto tr = generate_scenario(v, kGrid, 30, m, festival_traffic(), 3);
  std::size_t still = 0;
  for (std::size_t u = 0; u < tr.user_count(); ++u)
    for (std::size_t t = 1; t < tr.instant_count(); ++t) still += tr.position(u, t) == tr.position(u, t - 1);
  EXPECT_GT(still, tr.user_count() * 10);
  EXPECT_LE(max_step_m(tr, v), 0.08 * 300 + 1e-9);
}

TEST(GenerateScenario, MultipleOutsideRegionsRouteThroughThePrecinct) {
  const Venue v(Rect{{0, 0}, {40, 40}}, {Rect{{40, 0}, {50, 40}}, Rect{{-10, 10}, {0, 30}}, Rect{{0, 40}, {40, 45}}},
                2.0);
  MobilityParams m;
  m.speed_max = 0.5;
  m.attractors = {{Rect{{42, 5}, {50, 35}}, 1.0, "east"},
                  {Rect{{-10, 12}, {-2, 28}}, 1.0, "west"},
                  {Rect{{5, 41}, {35, 45}}, 1.0, "north"},
                  {Rect{{10, 10}, {30, 30}}, 1.0, "middle"}};
  m.background_weight = 0.5;
  const TimeGrid grid(60, 200);
  const auto tr = generate_scenario(v, grid, 40, m, {{{1.0, 1.0}}}, 17);
  for (const auto& p : tr.positions().data()) ASSERT_TRUE(v.contains(p)) << p.x << "," << p.y;
  EXPECT_LE(max_step_m(tr, v), 0.5 * 60 + 1e-9);
}

TEST(GenerateScenario, RejectsBadParameters) {
  const auto v = festival_venue();
  auto expect_invalid = [&](std::size_t users, const MobilityParams& m) {
    try {
      generate_scenario(v, kGrid, users, m, festival_traffic(), 1);
      ADD_FAILURE() << "expected invalid-input";
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
    }
  };
  expect_invalid(0, festival_mobility());
  MobilityParams empty;
  expect_invalid(5, empty);
  auto outside = festival_mobility();
  outside.attractors.push_back({Rect{{100, 0}, {110, 10}}, 1.0, "nowhere"});
  expect_invalid(5, outside);
  auto slow = festival_mobility();
  slow.speed_min = 1.0;
  expect_invalid(5, slow);
}
