#pragma once

// Normalized centroid-distance forecast error and histogram binning.

#include <algorithm>
#include <cmath>
#include <vector>

#include "tce/core.hpp"
#include "tce/markov.hpp"
#include "tce/zoning.hpp"

namespace tce {

enum class ErrorMetric {
  // Centroid distance over the extent diagonal.
  euclidean,
  // Per-axis distance over per-axis extent, then the norm divided by sqrt(2).
  per_axis,
};

inline double prediction_error(ZoneId real_zone, ZoneId pred_zone, const Zoning& zoning, Vec2 extent_min,
                               Vec2 extent_max, ErrorMetric metric = ErrorMetric::euclidean) {
  const Vec2 span = extent_max - extent_min;
  const Vec2 d = zoning.centroid(real_zone) - zoning.centroid(pred_zone);
  switch (metric) {
    case ErrorMetric::euclidean: {
      const double diag = norm(span);
      if (!(diag > 0.0) || !std::isfinite(diag))
        throw Error(ErrorKind::invalid_input, "prediction_error: degenerate extent");
      return norm(d) / diag;
    }
    case ErrorMetric::per_axis: {
      if (!(span.x > 0.0 && span.y > 0.0))
        throw Error(ErrorKind::invalid_input, "prediction_error: per-axis metric needs a positive extent on both axes");
      return std::hypot(d.x / span.x, d.y / span.y) / std::sqrt(2.0);
    }
  }
  return 0.0;
}

struct ErrorSeries {
  std::size_t first_instant = 0;
  // users x (instant_count - first_instant)
  Matrix<double> e;
  Vec2 extent_min;
  Vec2 extent_max;
};

inline ErrorSeries compute_errors(const TraceSet& traces, const Zoning& zoning, const PredictionRun& run,
                                  ErrorMetric metric = ErrorMetric::euclidean) {
  const auto extent = observed_extent(traces);
  const auto& real = zoning.labels();
  const std::size_t users = real.rows();
  const std::size_t instants = real.cols();
  ErrorSeries s{run.first_predicted, Matrix<double>(users, instants - run.first_predicted, 0.0), extent.min,
                extent.max};
  for (std::size_t u = 0; u < users; ++u)
    for (std::size_t t = run.first_predicted; t < instants; ++t)
      s.e(u, t - run.first_predicted) =
          prediction_error(real(u, t), run.predicted(u, t), zoning, extent.min, extent.max, metric);
  return s;
}

inline double mean_error(const ErrorSeries& s) {
  const auto& v = s.e.data();
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

inline double median_error(const ErrorSeries& s) {
  auto v = s.e.data();
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Equal-width bins over [0, 1]; the last bin is closed on the right.
inline std::vector<std::uint64_t> histogram(const std::vector<double>& values, std::size_t bin_count) {
  if (bin_count == 0) throw Error(ErrorKind::invalid_input, "histogram: bin_count must be >= 1");
  std::vector<std::uint64_t> counts(bin_count, 0);
  for (double v : values) {
    const double scaled = std::clamp(v, 0.0, 1.0) * static_cast<double>(bin_count);
    const auto bin = std::min(static_cast<std::size_t>(scaled), bin_count - 1);
    ++counts[bin];
  }
  return counts;
}

// One count vector per run, so overlaid multi-run histograms can be drawn.
inline std::vector<std::vector<std::uint64_t>> error_histogram(const std::vector<ErrorSeries>& runs,
                                                               std::size_t bin_count) {
  std::vector<std::vector<std::uint64_t>> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(histogram(r.e.data(), bin_count));
  return out;
}

}  // namespace tce
