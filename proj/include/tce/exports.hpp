#pragma once

// CSV interchange for zones, labels, matrices, predictions, zone series,
// errors and histograms.

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tce/aggregation.hpp"
#include "tce/csv.hpp"
#include "tce/markov.hpp"
#include "tce/metrics.hpp"
#include "tce/zoning.hpp"

namespace tce {

inline void write_zones_csv(const Zoning& z, std::ostream& out) {
  out << "zone_id,region,cx,cy\n";
  for (ZoneId id = 0; id < z.zone_count(); ++id) {
    const auto c = z.centroid(id);
    out << id << ',' << (z.is_outside_zone(id) ? "outside" : "inside") << ',' << csv::fmt(c.x) << ','
        << csv::fmt(c.y) << '\n';
  }
}

struct Centroids {
  std::vector<Vec2> inside;
  std::vector<Vec2> outside;
};

inline Centroids read_zones_csv(std::istream& in, const std::string& name) {
  csv::expect_header(in, name, "zone_id,region,cx,cy");
  Centroids c;
  std::string line;
  std::size_t line_no = 1;
  std::size_t next_id = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    const auto where = name + " line " + std::to_string(line_no);
    if (f.size() != 4) throw Error(ErrorKind::load, where + ": expected 4 fields");
    const auto id = csv::parse_uint(f[0]);
    const auto x = csv::parse_double(f[2]);
    const auto y = csv::parse_double(f[3]);
    if (!id || !x || !y) throw Error(ErrorKind::load, where + ": parse failure");
    if (*id != next_id++) throw Error(ErrorKind::load, where + ": zone ids must be contiguous from 0");
    if (f[1] == "inside") {
      if (!c.outside.empty()) throw Error(ErrorKind::load, where + ": inside zone after outside zones");
      c.inside.push_back({*x, *y});
    } else if (f[1] == "outside") {
      c.outside.push_back({*x, *y});
    } else {
      throw Error(ErrorKind::load, where + ": region must be inside or outside");
    }
  }
  if (c.inside.empty()) throw Error(ErrorKind::load, name + ": no inside zones");
  return c;
}

inline void write_labels_csv(const LabelTable& labels, std::ostream& out) {
  out << "user_id,t,zone_id\n";
  for (std::size_t u = 0; u < labels.rows(); ++u)
    for (std::size_t t = 0; t < labels.cols(); ++t) out << u << ',' << t << ',' << labels(u, t) << '\n';
}

template <typename T>
void write_zone_matrix_csv(const Matrix<T>& m, std::ostream& out) {
  out << "zone";
  for (std::size_t c = 0; c < m.cols(); ++c) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << r;
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if constexpr (std::is_floating_point_v<T>)
        out << ',' << csv::fmt(m(r, c));
      else
        out << ',' << m(r, c);
    }
    out << '\n';
  }
}

inline void write_predictions_csv(const LabelTable& real, const PredictionRun& run, std::ostream& out) {
  out << "user_id,t,real_zone,predicted_zone\n";
  for (std::size_t u = 0; u < real.rows(); ++u)
    for (std::size_t t = 0; t < real.cols(); ++t)
      out << u << ',' << t << ',' << real(u, t) << ',' << run.predicted(u, t) << '\n';
}

// Predicted labels for a known table shape; real_zone must agree with the
// labels derived from the traces.
inline PredictionRun read_predictions_csv(std::istream& in, const std::string& name, const LabelTable& real,
                                          std::size_t first_predicted, std::uint64_t seed) {
  csv::expect_header(in, name, "user_id,t,real_zone,predicted_zone");
  PredictionRun run{seed, first_predicted, LabelTable(real.rows(), real.cols(), 0)};
  std::vector<char> seen(real.rows() * real.cols(), 0);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    const auto f = csv::split(line);
    const auto where = name + " line " + std::to_string(line_no);
    if (f.size() != 4) throw Error(ErrorKind::load, where + ": expected 4 fields");
    const auto u = csv::parse_uint(f[0]);
    const auto t = csv::parse_uint(f[1]);
    const auto r = csv::parse_uint(f[2]);
    const auto p = csv::parse_uint(f[3]);
    if (!u || !t || !r || !p) throw Error(ErrorKind::load, where + ": parse failure");
    if (*u >= real.rows() || *t >= real.cols()) throw Error(ErrorKind::load, where + ": user or instant out of range");
    if (*r != real(*u, *t)) throw Error(ErrorKind::load, where + ": real_zone disagrees with the zoning");
    run.predicted(*u, *t) = static_cast<ZoneId>(*p);
    seen[*u * real.cols() + *t] = 1;
  }
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw Error(ErrorKind::load, name + ": missing user " + std::to_string(i / real.cols()) + " instant " +
                                       std::to_string(i % real.cols()));
  return run;
}

inline void write_zone_series_csv(const ZoneSeries& s, std::ostream& out) {
  out << "zone_id,t,users_real,users_pred,traffic_real,traffic_pred\n";
  for (std::size_t z = 0; z < s.users_real.rows(); ++z)
    for (std::size_t t = 0; t < s.users_real.cols(); ++t)
      out << z << ',' << t << ',' << s.users_real(z, t) << ',' << s.users_pred(z, t) << ','
          << csv::fmt(s.traffic_real(z, t)) << ',' << csv::fmt(s.traffic_pred(z, t)) << '\n';
}

inline void write_errors_csv(const ErrorSeries& e, std::ostream& out) {
  out << "user_id,t,error\n";
  for (std::size_t u = 0; u < e.e.rows(); ++u)
    for (std::size_t k = 0; k < e.e.cols(); ++k)
      out << u << ',' << e.first_instant + k << ',' << csv::fmt(e.e(u, k)) << '\n';
}

inline void write_histogram_csv(const std::vector<std::vector<std::uint64_t>>& runs, std::ostream& out) {
  out << "run_id,bin_lo,bin_hi,count\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const double bins = static_cast<double>(runs[r].size());
    for (std::size_t b = 0; b < runs[r].size(); ++b)
      out << r << ',' << csv::fmt(static_cast<double>(b) / bins) << ',' << csv::fmt(static_cast<double>(b + 1) / bins)
          << ',' << runs[r][b] << '\n';
  }
}

}  // namespace tce
