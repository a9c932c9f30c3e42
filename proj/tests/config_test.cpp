#include <gtest/gtest.h>

#include <sstream>

#include "tce/config.hpp"

using namespace tce;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ErrorKind parse_error(const std::string& text) {
  try {
    validate(parse(text));
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::invalid_input;  // sentinel: accepted
}

}  // namespace

TEST(Config, EmptyFileIsTheReferenceRun) {
  const auto c = parse("");
  EXPECT_EQ(c.user_count, 200u);
  EXPECT_EQ(c.instant_count, 60u);
  EXPECT_EQ(c.step_seconds, 300.0);
  EXPECT_EQ(c.mobility.speed_max, 0.08);
  EXPECT_EQ(c.k_outside, 1u);
  EXPECT_EQ(c.run_count, 5u);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, ParsesEverySection) {
  const auto c = parse(R"(
[venue]
precinct = 0 0 40 30
outside_regions = 40 0 45 30; 0 30 40 35
index_scale = 2
[grid]
step_seconds = 60
instant_count = 40
[generator]
user_count = 12
attractors = stage 0.5 1 1 10 10; bar 0.5 20 20 30 30
traffic_tiers = 1/3 0; 1/3 5; 1/3 10
pause_instants = 2
[zoning]
k_inside = 3
k_outside = 2
[prediction]
window_size = 20
scope = general
metric = per_axis
[output]
plot_users = 0 3 7
run_count = 2
base_seed = 99
histogram_bins = 10
)");
  EXPECT_EQ(c.precinct.max.x, 40.0);
  ASSERT_EQ(c.outside_regions.size(), 2u);
  EXPECT_EQ(c.outside_regions[1].max.y, 35.0);
  EXPECT_EQ(c.index_scale, 2.0);
  ASSERT_EQ(c.mobility.attractors.size(), 2u);
  EXPECT_EQ(c.mobility.attractors[1].label, "bar");
  EXPECT_EQ(c.traffic.tiers[2].rate, 10.0);
  EXPECT_EQ(c.window.scope, WindowScope::general);
  EXPECT_EQ(c.metric, ErrorMetric::per_axis);
  EXPECT_EQ(c.plot_users, (std::vector<std::size_t>{0, 3, 7}));
  EXPECT_EQ(c.base_seed, 99u);
  EXPECT_NO_THROW(validate(c));
}

TEST(Config, ErrorsAreConfigErrors) {
  EXPECT_EQ(parse_error("[venue]\nbogus = 1\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("[grid]\ninstant_count = x\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("[prediction]\nwindow_size = 60\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("[prediction]\nscope = sideways\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("[generator]\ntraffic_tiers = 0.5 1; 0.4 2\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("[input]\nmode = load\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("[venue]\nprecinct = 0 0 10 10\noutside_regions = 5 5 20 20\n"), ErrorKind::config);
  EXPECT_EQ(parse_error("stray = 1\n"), ErrorKind::config);
}

TEST(Config, CanonicalTextIgnoresOutputDirectory) {
  auto a = parse("");
  auto b = parse("[output]\nout_dir = elsewhere\n");
  EXPECT_EQ(canonical_text(a), canonical_text(b));
  b.base_seed = 2;
  EXPECT_NE(canonical_text(a), canonical_text(b));
  // canonical text parses back to an equivalent configuration
  auto round = parse(canonical_text(a));
  EXPECT_EQ(canonical_text(round), canonical_text(a));
}
