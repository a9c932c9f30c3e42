#pragma once

// Trace (`user_id,t,x,y`) and traffic (`user_id,mean_traffic_mbps`) files,
// plus the whitespace waypoint-line import used by external mobility
// generators (one line per user, repeating `t x y` triples, t in seconds).

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tce/core.hpp"
#include "tce/csv.hpp"

namespace tce {

inline constexpr std::string_view kTraceHeader = "user_id,t,x,y";
inline constexpr std::string_view kTrafficHeader = "user_id,mean_traffic_mbps";

inline void write_trace_csv(const TraceSet& traces, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (std::size_t u = 0; u < traces.user_count(); ++u)
    for (std::size_t t = 0; t < traces.instant_count(); ++t) {
      const auto p = traces.position(u, t);
      out << u << ',' << t << ',' << csv::fmt(p.x) << ',' << csv::fmt(p.y) << '\n';
    }
}

inline void write_traffic_csv(const TraceSet& traces, std::ostream& out) {
  out << kTrafficHeader << '\n';
  for (std::size_t u = 0; u < traces.user_count(); ++u)
    out << u << ',' << csv::fmt(traces.mean_traffic(u)) << '\n';
}

namespace detail {

inline std::string row_ref(const std::string& path, std::size_t line_no) {
  return path + " line " + std::to_string(line_no);
}

inline std::vector<double> read_traffic(std::istream& in, const std::string& path) {
  csv::expect_header(in, path, kTrafficHeader);
  std::vector<double> traffic;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 2) throw Error(ErrorKind::load, row_ref(path, line_no) + ": expected 2 fields");
    const auto uid = csv::parse_uint(f[0]);
    const auto rate = csv::parse_double(f[1]);
    if (!uid || !rate) throw Error(ErrorKind::load, row_ref(path, line_no) + ": parse failure");
    if (*uid != traffic.size())
      throw Error(ErrorKind::load, row_ref(path, line_no) + ": expected user " +
                                       std::to_string(traffic.size()) + ", found " + std::to_string(*uid));
    if (!(*rate >= 0.0) || !std::isfinite(*rate))
      throw Error(ErrorKind::load, row_ref(path, line_no) + ": negative or non-finite traffic for user " +
                                       std::to_string(*uid));
    traffic.push_back(*rate);
  }
  return traffic;
}

}  // namespace detail

// Parses a trace/traffic pair. Rows must be sorted by user then instant and
// cover every (user, instant); any gap is reported with user and instant.
inline TraceSet read_trace(std::istream& trace_in, const std::string& trace_name, std::istream& traffic_in,
                           const std::string& traffic_name, const TimeGrid& grid) {
  csv::expect_header(trace_in, trace_name, kTraceHeader);
  const std::size_t n = grid.instant_count();
  std::vector<Vec2> flat;
  std::string line;
  std::size_t line_no = 1;
  std::size_t expect_user = 0;
  std::size_t expect_t = 0;
  auto missing = [&](std::size_t user, std::size_t t, std::size_t at_line) {
    return Error(ErrorKind::load, detail::row_ref(trace_name, at_line) + ": missing user " +
                                      std::to_string(user) + " instant " + std::to_string(t));
  };
  while (std::getline(trace_in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    if (f.size() != 4) throw Error(ErrorKind::load, detail::row_ref(trace_name, line_no) + ": expected 4 fields");
    const auto uid = csv::parse_uint(f[0]);
    const auto t = csv::parse_uint(f[1]);
    const auto x = csv::parse_double(f[2]);
    const auto y = csv::parse_double(f[3]);
    if (!uid || !t || !x || !y || !std::isfinite(*x) || !std::isfinite(*y))
      throw Error(ErrorKind::load, detail::row_ref(trace_name, line_no) + ": parse failure");
    if (*uid != expect_user) {
      if (*uid == expect_user + 1 && expect_t == n) {
        ++expect_user;
        expect_t = 0;
      } else if (*uid > expect_user) {
        if (expect_t == n) throw missing(expect_user + 1, 0, line_no);
        throw missing(expect_user, expect_t, line_no);
      } else {
        throw Error(ErrorKind::load, detail::row_ref(trace_name, line_no) + ": rows not sorted by user_id");
      }
    }
    if (*t >= n)
      throw Error(ErrorKind::load, detail::row_ref(trace_name, line_no) + ": instant " + std::to_string(*t) +
                                       " beyond the time grid");
    if (*t != expect_t) {
      if (*t > expect_t) throw missing(expect_user, expect_t, line_no);
      throw Error(ErrorKind::load, detail::row_ref(trace_name, line_no) + ": duplicate or unsorted instant");
    }
    flat.push_back({*x, *y});
    ++expect_t;
  }
  if (flat.empty()) throw Error(ErrorKind::load, trace_name + ": no rows");
  if (expect_t != n) throw missing(expect_user, expect_t, line_no);

  const std::size_t users = expect_user + 1;
  auto traffic = detail::read_traffic(traffic_in, traffic_name);
  if (traffic.size() != users)
    throw Error(ErrorKind::load, traffic_name + ": covers " + std::to_string(traffic.size()) + " users, trace has " +
                                     std::to_string(users));
  Matrix<Vec2> positions(users, n);
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t k = 0; k < n; ++k) positions(u, k) = flat[u * n + k];
  return TraceSet(std::move(positions), std::move(traffic));
}

inline TraceSet load_trace(const std::string& trace_path, const std::string& traffic_path, const Venue& /*venue*/,
                           const TimeGrid& grid) {
  auto tin = csv::open_in(trace_path);
  auto fin = csv::open_in(traffic_path);
  return read_trace(tin, trace_path, fin, traffic_path, grid);
}

// Waypoint lines resampled onto the grid by linear interpolation; instants
// before the first or after the last waypoint hold the nearest endpoint.
inline Matrix<Vec2> read_waypoint_lines(std::istream& in, const std::string& name, const TimeGrid& grid) {
  struct Waypoint {
    double t;
    Vec2 p;
  };
  std::vector<std::vector<Waypoint>> users;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty() || csv::trim(line).front() == '#') continue;
    std::istringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (ss >> tok) {
      const auto v = csv::parse_double(tok);
      if (!v || !std::isfinite(*v)) throw Error(ErrorKind::load, detail::row_ref(name, line_no) + ": bad number '" + tok + "'");
      vals.push_back(*v);
    }
    if (vals.empty() || vals.size() % 3 != 0)
      throw Error(ErrorKind::load, detail::row_ref(name, line_no) + ": expected repeating 't x y' triples");
    std::vector<Waypoint> w;
    for (std::size_t i = 0; i < vals.size(); i += 3) {
      if (!w.empty() && vals[i] < w.back().t)
        throw Error(ErrorKind::load, detail::row_ref(name, line_no) + ": waypoint times decrease");
      w.push_back({vals[i], {vals[i + 1], vals[i + 2]}});
    }
    users.push_back(std::move(w));
  }
  if (users.empty()) throw Error(ErrorKind::load, name + ": no users");

  Matrix<Vec2> out(users.size(), grid.instant_count());
  for (std::size_t u = 0; u < users.size(); ++u) {
    const auto& w = users[u];
    std::size_t seg = 0;
    for (std::size_t k = 0; k < grid.instant_count(); ++k) {
      const double t = grid.time_of(k);
      if (t <= w.front().t) {
        out(u, k) = w.front().p;
        continue;
      }
      if (t >= w.back().t) {
        out(u, k) = w.back().p;
        continue;
      }
      while (w[seg + 1].t < t) ++seg;
      const auto& a = w[seg];
      const auto& b = w[seg + 1];
      const double span = b.t - a.t;
      const double f = span > 0.0 ? (t - a.t) / span : 1.0;
      out(u, k) = a.p + f * (b.p - a.p);
    }
  }
  return out;
}

}  // namespace tce
