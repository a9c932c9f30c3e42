#pragma once

// Run configuration: flat `key = value` INI with [section] headers. Every
// key is optional; an empty file reproduces the reference festival run.

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "tce/core.hpp"
#include "tce/csv.hpp"
#include "tce/markov.hpp"
#include "tce/metrics.hpp"
#include "tce/scenario.hpp"

namespace tce {

enum class InputMode { generate, load, waypoints };

struct RunConfig {
  Rect precinct{{0.0, 0.0}, {80.0, 50.0}};
  std::vector<Rect> outside_regions{Rect{{80.0, 0.0}, {90.0, 50.0}}};
  double index_scale = 1.0;

  double step_seconds = 300.0;
  std::size_t instant_count = 60;

  InputMode input = InputMode::generate;
  std::string trace_path;
  std::string traffic_path;
  std::string waypoint_path;

  std::size_t user_count = 200;
  MobilityParams mobility = festival_mobility();
  TrafficTiers traffic = festival_traffic();

  std::size_t k_inside = 5;
  std::size_t k_outside = 1;

  WindowConfig window{10, WindowScope::per_user};
  ErrorMetric metric = ErrorMetric::euclidean;

  std::vector<std::size_t> plot_users{0};
  std::size_t run_count = 5;
  std::uint64_t base_seed = 1;
  std::string out_dir = "tce-out";
  std::size_t histogram_bins = 20;

  Venue venue() const { return Venue(precinct, outside_regions, index_scale); }
  TimeGrid grid() const { return TimeGrid(step_seconds, instant_count); }
};

struct ConfigKey {
  const char* key;
  const char* help;
};

// Documented keys, printed by `tce --help`.
inline const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"venue.precinct", "precinct rectangle 'x0 y0 x1 y1' in index units (default 0 0 80 50)"},
      {"venue.outside_regions", "outside rectangles 'x0 y0 x1 y1; ...' (default 80 0 90 50)"},
      {"venue.index_scale", "meters per index unit (default 1)"},
      {"grid.step_seconds", "seconds between instants (default 300)"},
      {"grid.instant_count", "number of instants, >= 2 (default 60)"},
      {"input.mode", "generate | load | waypoints (default generate)"},
      {"input.trace_path", "trace CSV user_id,t,x,y (load mode)"},
      {"input.traffic_path", "traffic CSV user_id,mean_traffic_mbps (load and waypoints modes)"},
      {"input.waypoint_path", "waypoint lines 't x y ...' per user (waypoints mode)"},
      {"generator.user_count", "users to generate (default 200)"},
      {"generator.speed_min", "minimum leg speed in m/s (default 0)"},
      {"generator.speed_max", "maximum leg speed in m/s (default 0.08)"},
      {"generator.pause_instants", "instants spent at each reached waypoint (default 0)"},
      {"generator.background_weight", "weight of uniform precinct waypoints (default 0)"},
      {"generator.attractors", "'label weight x0 y0 x1 y1; ...' (default festival layout)"},
      {"generator.traffic_tiers", "'fraction rate; ...', fractions may be written a/b (default 1/3 0; 1/3 10; 1/3 10)"},
      {"zoning.k_inside", "in-precinct zones (default 5)"},
      {"zoning.k_outside", "out-of-precinct zones (default 1)"},
      {"prediction.window_size", "sliding window length W in instants (default 10)"},
      {"prediction.scope", "per_user | general (default per_user)"},
      {"prediction.metric", "euclidean | per_axis (default euclidean)"},
      {"output.plot_users", "user ids to plot, space separated (default 0)"},
      {"output.run_count", "independent seeded prediction runs (default 5)"},
      {"output.base_seed", "seed of run 0; run r uses base_seed + r (default 1)"},
      {"output.out_dir", "output directory (default tce-out)"},
      {"output.histogram_bins", "error histogram bins over [0, 1] (default 20)"},
  };
  return keys;
}

namespace detail {

[[noreturn]] inline void config_fail(const std::string& key, const std::string& why) {
  throw Error(ErrorKind::config, "config key '" + key + "': " + why);
}

inline double parse_real(const std::string& key, const std::string& tok) {
  const auto slash = tok.find('/');
  if (slash != std::string::npos) {
    const auto a = csv::parse_double(tok.substr(0, slash));
    const auto b = csv::parse_double(tok.substr(slash + 1));
    if (!a || !b || *b == 0.0) config_fail(key, "bad fraction '" + tok + "'");
    return *a / *b;
  }
  const auto v = csv::parse_double(tok);
  if (!v || !std::isfinite(*v)) config_fail(key, "bad number '" + tok + "'");
  return *v;
}

inline std::uint64_t parse_count(const std::string& key, const std::string& tok) {
  const auto v = csv::parse_uint(csv::trim(tok));
  if (!v) config_fail(key, "expected a non-negative integer, got '" + tok + "'");
  return *v;
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream ss(s);
  std::vector<std::string> out;
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

inline std::vector<std::string> items(const std::string& s) {
  std::vector<std::string> out;
  for (auto& part : csv::split(s, ';'))
    if (!part.empty()) out.push_back(part);
  return out;
}

inline Rect parse_rect(const std::string& key, const std::vector<std::string>& w, std::size_t at) {
  if (w.size() < at + 4) config_fail(key, "expected 'x0 y0 x1 y1'");
  const Rect r{{parse_real(key, w[at]), parse_real(key, w[at + 1])},
               {parse_real(key, w[at + 2]), parse_real(key, w[at + 3])}};
  if (!r.valid()) config_fail(key, "rectangle min exceeds max");
  return r;
}

inline std::string rect_text(const Rect& r) {
  return csv::fmt(r.min.x) + " " + csv::fmt(r.min.y) + " " + csv::fmt(r.max.x) + " " + csv::fmt(r.max.y);
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorKind::config, std::string("config: ") + e.what());
  }

  std::set<std::string> known;
  for (const auto& k : config_keys()) known.insert(k.key);
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw Error(ErrorKind::config, "config: key '" + section + "' outside any section");
    for (const auto& [key, value] : body) {
      const auto full = section + "." + key;
      if (!known.count(full)) throw Error(ErrorKind::config, "config: unknown key '" + full + "'");
    }
  }

  RunConfig c;
  auto get = [&](const char* key) -> std::optional<std::string> {
    if (auto v = tree.get_optional<std::string>(pt::ptree::path_type(key, '.'))) return csv::trim(*v);
    return std::nullopt;
  };
  using namespace detail;

  if (auto v = get("venue.precinct")) c.precinct = parse_rect("venue.precinct", words(*v), 0);
  if (auto v = get("venue.outside_regions")) {
    c.outside_regions.clear();
    for (const auto& it : items(*v)) c.outside_regions.push_back(parse_rect("venue.outside_regions", words(it), 0));
  }
  if (auto v = get("venue.index_scale")) c.index_scale = parse_real("venue.index_scale", *v);
  if (auto v = get("grid.step_seconds")) c.step_seconds = parse_real("grid.step_seconds", *v);
  if (auto v = get("grid.instant_count")) c.instant_count = parse_count("grid.instant_count", *v);
  if (auto v = get("input.mode")) {
    if (*v == "generate") c.input = InputMode::generate;
    else if (*v == "load") c.input = InputMode::load;
    else if (*v == "waypoints") c.input = InputMode::waypoints;
    else config_fail("input.mode", "expected generate, load or waypoints");
  }
  if (auto v = get("input.trace_path")) c.trace_path = *v;
  if (auto v = get("input.traffic_path")) c.traffic_path = *v;
  if (auto v = get("input.waypoint_path")) c.waypoint_path = *v;
  if (auto v = get("generator.user_count")) c.user_count = parse_count("generator.user_count", *v);
  if (auto v = get("generator.speed_min")) c.mobility.speed_min = parse_real("generator.speed_min", *v);
  if (auto v = get("generator.speed_max")) c.mobility.speed_max = parse_real("generator.speed_max", *v);
  if (auto v = get("generator.pause_instants")) c.mobility.pause_instants = parse_count("generator.pause_instants", *v);
  if (auto v = get("generator.background_weight"))
    c.mobility.background_weight = parse_real("generator.background_weight", *v);
  if (auto v = get("generator.attractors")) {
    c.mobility.attractors.clear();
    for (const auto& it : items(*v)) {
      const auto w = words(it);
      if (w.size() != 6) config_fail("generator.attractors", "expected 'label weight x0 y0 x1 y1'");
      c.mobility.attractors.push_back({parse_rect("generator.attractors", w, 2),
                                       parse_real("generator.attractors", w[1]), w[0]});
    }
  }
  if (auto v = get("generator.traffic_tiers")) {
    c.traffic.tiers.clear();
    for (const auto& it : items(*v)) {
      const auto w = words(it);
      if (w.size() != 2) config_fail("generator.traffic_tiers", "expected 'fraction rate'");
      c.traffic.tiers.push_back({parse_real("generator.traffic_tiers", w[0]), parse_real("generator.traffic_tiers", w[1])});
    }
  }
  if (auto v = get("zoning.k_inside")) c.k_inside = parse_count("zoning.k_inside", *v);
  if (auto v = get("zoning.k_outside")) c.k_outside = parse_count("zoning.k_outside", *v);
  if (auto v = get("prediction.window_size")) c.window.window_size = parse_count("prediction.window_size", *v);
  if (auto v = get("prediction.scope")) {
    if (*v == "per_user") c.window.scope = WindowScope::per_user;
    else if (*v == "general") c.window.scope = WindowScope::general;
    else config_fail("prediction.scope", "expected per_user or general");
  }
  if (auto v = get("prediction.metric")) {
    if (*v == "euclidean") c.metric = ErrorMetric::euclidean;
    else if (*v == "per_axis") c.metric = ErrorMetric::per_axis;
    else config_fail("prediction.metric", "expected euclidean or per_axis");
  }
  if (auto v = get("output.plot_users")) {
    c.plot_users.clear();
    for (const auto& w : words(*v)) c.plot_users.push_back(parse_count("output.plot_users", w));
  }
  if (auto v = get("output.run_count")) c.run_count = parse_count("output.run_count", *v);
  if (auto v = get("output.base_seed")) c.base_seed = parse_count("output.base_seed", *v);
  if (auto v = get("output.out_dir")) c.out_dir = *v;
  if (auto v = get("output.histogram_bins")) c.histogram_bins = parse_count("output.histogram_bins", *v);
  return c;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config '" + path + "'");
  return parse_config(in);
}

// Checks everything that can be checked before data is read.
inline void validate(const RunConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::config, "config: " + why); };
  try {
    (void)c.venue();
    (void)c.grid();
  } catch (const Error& e) {
    fail(e.what());
  }
  if (c.k_inside == 0) fail("zoning.k_inside must be >= 1");
  if (c.window.window_size == 0 || c.window.window_size >= c.instant_count)
    fail("prediction.window_size must satisfy 1 <= W < instant_count");
  if (c.run_count == 0) fail("output.run_count must be >= 1");
  if (c.histogram_bins == 0) fail("output.histogram_bins must be >= 1");
  if (c.out_dir.empty()) fail("output.out_dir is empty");
  switch (c.input) {
    case InputMode::generate:
      if (c.user_count == 0) fail("generator.user_count must be >= 1");
      if (c.mobility.attractors.empty()) fail("generator.attractors is empty");
      try {
        (void)tier_counts(c.user_count, c.traffic);
      } catch (const Error& e) {
        fail(e.what());
      }
      break;
    case InputMode::load:
      if (c.trace_path.empty() || c.traffic_path.empty()) fail("load mode needs input.trace_path and input.traffic_path");
      break;
    case InputMode::waypoints:
      if (c.waypoint_path.empty() || c.traffic_path.empty())
        fail("waypoints mode needs input.waypoint_path and input.traffic_path");
      break;
  }
}

// Canonical text of the resolved configuration, hashed into the manifest.
// The output directory is left out so reruns elsewhere hash identically.
inline std::string canonical_text(const RunConfig& c) {
  using detail::rect_text;
  std::ostringstream o;
  o << "[venue]\nprecinct = " << rect_text(c.precinct) << "\noutside_regions = ";
  for (std::size_t i = 0; i < c.outside_regions.size(); ++i) o << (i ? "; " : "") << rect_text(c.outside_regions[i]);
  o << "\nindex_scale = " << csv::fmt(c.index_scale) << "\n[grid]\nstep_seconds = " << csv::fmt(c.step_seconds)
    << "\ninstant_count = " << c.instant_count << "\n[input]\nmode = "
    << (c.input == InputMode::generate ? "generate" : c.input == InputMode::load ? "load" : "waypoints")
    << "\ntrace_path = " << c.trace_path << "\ntraffic_path = " << c.traffic_path
    << "\nwaypoint_path = " << c.waypoint_path << "\n[generator]\nuser_count = " << c.user_count
    << "\nspeed_min = " << csv::fmt(c.mobility.speed_min) << "\nspeed_max = " << csv::fmt(c.mobility.speed_max)
    << "\npause_instants = " << c.mobility.pause_instants
    << "\nbackground_weight = " << csv::fmt(c.mobility.background_weight) << "\nattractors = ";
  for (std::size_t i = 0; i < c.mobility.attractors.size(); ++i) {
    const auto& a = c.mobility.attractors[i];
    o << (i ? "; " : "") << a.label << ' ' << csv::fmt(a.weight) << ' ' << rect_text(a.region);
  }
  o << "\ntraffic_tiers = ";
  for (std::size_t i = 0; i < c.traffic.tiers.size(); ++i)
    o << (i ? "; " : "") << csv::fmt(c.traffic.tiers[i].fraction) << ' ' << csv::fmt(c.traffic.tiers[i].rate);
  o << "\n[zoning]\nk_inside = " << c.k_inside << "\nk_outside = " << c.k_outside
    << "\n[prediction]\nwindow_size = " << c.window.window_size
    << "\nscope = " << (c.window.scope == WindowScope::general ? "general" : "per_user")
    << "\nmetric = " << (c.metric == ErrorMetric::euclidean ? "euclidean" : "per_axis") << "\n[output]\nplot_users =";
  for (auto u : c.plot_users) o << ' ' << u;
  o << "\nrun_count = " << c.run_count << "\nbase_seed = " << c.base_seed << "\nhistogram_bins = " << c.histogram_bins << '\n';
  return o.str();
}

}  // namespace tce
