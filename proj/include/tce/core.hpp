#pragma once

// Geometry, time grid and trace containers shared by every stage of the
// pipeline. Positions are held in index units; meters appear only through
// real_distance().

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tce {

enum class ErrorKind {
  invalid_input,
  load,
  config,
  infeasible,
  no_zone,
  not_enough_history,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::load: return "load";
    case ErrorKind::config: return "config";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::no_zone: return "no-zone";
    case ErrorKind::not_enough_history: return "not-enough-history";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Vec2 a, Vec2 b) = default;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }
inline double squared_distance(Vec2 a, Vec2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}
inline bool is_finite(Vec2 v) { return std::isfinite(v.x) && std::isfinite(v.y); }

// Closed axis-aligned rectangle.
struct Rect {
  Vec2 min;
  Vec2 max;

  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
  bool valid() const { return min.x <= max.x && min.y <= max.y; }
  Vec2 clamp(Vec2 p) const {
    return {std::clamp(p.x, min.x, max.x), std::clamp(p.y, min.y, max.y)};
  }
  Vec2 center() const { return 0.5 * (min + max); }
  // Positive-area overlap; rectangles that only share an edge do not overlap.
  bool overlaps(const Rect& o) const {
    return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y;
  }
  // Closed intersection, possibly degenerate (edge or corner).
  bool touches(const Rect& o) const {
    return min.x <= o.max.x && o.min.x <= max.x && min.y <= o.max.y && o.min.y <= max.y;
  }
  Rect intersection(const Rect& o) const {
    return {{std::max(min.x, o.min.x), std::max(min.y, o.min.y)},
            {std::min(max.x, o.max.x), std::min(max.y, o.max.y)}};
  }
  bool within(const Rect& o) const { return o.contains(min) && o.contains(max); }
};

enum class Region { inside, outside };

class Venue {
 public:
  Venue(Rect precinct, std::vector<Rect> outside_regions, double index_scale)
      : precinct_(precinct), outside_(std::move(outside_regions)), index_scale_(index_scale) {
    if (!(precinct_.min.x < precinct_.max.x && precinct_.min.y < precinct_.max.y))
      throw Error(ErrorKind::invalid_input, "venue: precinct_min must be < precinct_max");
    if (!(index_scale_ > 0.0) || !std::isfinite(index_scale_))
      throw Error(ErrorKind::invalid_input, "venue: index_scale must be positive");
    for (const auto& r : outside_) {
      if (!r.valid()) throw Error(ErrorKind::invalid_input, "venue: malformed outside region");
      if (r.overlaps(precinct_))
        throw Error(ErrorKind::invalid_input, "venue: outside region overlaps the precinct");
    }
  }

  const Rect& precinct() const { return precinct_; }
  const std::vector<Rect>& outside_regions() const { return outside_; }
  double index_scale() const { return index_scale_; }

  // Declared venue footprint: precinct or any outside region.
  bool contains(Vec2 p) const {
    if (precinct_.contains(p)) return true;
    return std::any_of(outside_.begin(), outside_.end(),
                       [&](const Rect& r) { return r.contains(p); });
  }

 private:
  Rect precinct_;
  std::vector<Rect> outside_;
  double index_scale_;
};

// Real distance in meters from a distance in index units (d = i * D).
inline double real_distance(double system_distance, const Venue& venue) {
  return venue.index_scale() * system_distance;
}

inline Region classify_position(Vec2 p, const Venue& venue) {
  if (!is_finite(p)) throw Error(ErrorKind::invalid_input, "classify_position: non-finite coordinates");
  return venue.precinct().contains(p) ? Region::inside : Region::outside;
}

class TimeGrid {
 public:
  TimeGrid(double step_seconds, std::size_t instant_count)
      : step_seconds_(step_seconds), instant_count_(instant_count) {
    if (!(step_seconds_ > 0.0) || !std::isfinite(step_seconds_))
      throw Error(ErrorKind::invalid_input, "time grid: step_seconds must be positive");
    if (instant_count_ < 2) throw Error(ErrorKind::invalid_input, "time grid: need at least 2 instants");
  }

  double step_seconds() const { return step_seconds_; }
  std::size_t instant_count() const { return instant_count_; }
  double time_of(std::size_t t) const { return step_seconds_ * static_cast<double>(t); }

 private:
  double step_seconds_;
  std::size_t instant_count_;
};

// Dense row-major matrix.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  const std::vector<T>& data() const { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

// Per-user position sequences plus per-user constant mean traffic (Mbit/s).
class TraceSet {
 public:
  TraceSet(Matrix<Vec2> positions, std::vector<double> mean_traffic)
      : positions_(std::move(positions)), traffic_(std::move(mean_traffic)) {
    if (positions_.rows() == 0) throw Error(ErrorKind::invalid_input, "trace set: no users");
    if (traffic_.size() != positions_.rows())
      throw Error(ErrorKind::invalid_input, "trace set: traffic entry count differs from user count");
    for (double v : traffic_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw Error(ErrorKind::invalid_input, "trace set: mean traffic must be finite and >= 0");
    for (const auto& p : positions_.data())
      if (!is_finite(p)) throw Error(ErrorKind::invalid_input, "trace set: non-finite position");
  }

  std::size_t user_count() const { return positions_.rows(); }
  std::size_t instant_count() const { return positions_.cols(); }
  Vec2 position(std::size_t user, std::size_t t) const { return positions_(user, t); }
  std::span<const Vec2> trajectory(std::size_t user) const { return positions_.row(user); }
  const Matrix<Vec2>& positions() const { return positions_; }
  double mean_traffic(std::size_t user) const { return traffic_[user]; }
  const std::vector<double>& mean_traffic() const { return traffic_; }
  double total_traffic() const {
    double s = 0.0;
    for (double v : traffic_) s += v;
    return s;
  }

  friend bool operator==(const TraceSet&, const TraceSet&) = default;

 private:
  Matrix<Vec2> positions_;
  std::vector<double> traffic_;
};

// Bounding box of every observed position, outside-precinct samples included.
inline Rect observed_extent(const TraceSet& traces) {
  const auto& all = traces.positions().data();
  Rect box{all.front(), all.front()};
  for (const auto& p : all) {
    box.min.x = std::min(box.min.x, p.x);
    box.min.y = std::min(box.min.y, p.y);
    box.max.x = std::max(box.max.x, p.x);
    box.max.y = std::max(box.max.y, p.y);
  }
  return box;
}

using ZoneId = std::uint32_t;

// Per-user, per-instant zone ids.
using LabelTable = Matrix<ZoneId>;

}  // namespace tce
