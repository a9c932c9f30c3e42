#pragma once

// Zone-to-zone transition matrices and the sliding-window forecaster.
//
// The general matrix describes the whole event and is never used to forecast;
// run_prediction() only ever builds window matrices from observed labels.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tce/core.hpp"
#include "tce/rng.hpp"
#include "tce/zoning.hpp"

namespace tce {

class TransitionMatrix {
 public:
  explicit TransitionMatrix(Matrix<std::uint64_t> counts) : counts_(std::move(counts)) {
    if (counts_.rows() == 0 || counts_.rows() != counts_.cols())
      throw Error(ErrorKind::invalid_input, "transition matrix: counts must be square and non-empty");
    const std::size_t z = counts_.rows();
    probs_ = Matrix<double>(z, z, 0.0);
    for (std::size_t r = 0; r < z; ++r) {
      std::uint64_t sum = 0;
      for (auto v : counts_.row(r)) sum += v;
      if (sum == 0) continue;
      for (std::size_t c = 0; c < z; ++c)
        probs_(r, c) = static_cast<double>(counts_(r, c)) / static_cast<double>(sum);
    }
  }

  std::size_t zone_count() const { return counts_.rows(); }
  const Matrix<std::uint64_t>& counts() const { return counts_; }
  const Matrix<double>& probs() const { return probs_; }
  std::span<const double> row(ZoneId r) const { return probs_.row(r); }
  std::uint64_t row_total(ZoneId r) const {
    std::uint64_t s = 0;
    for (auto v : counts_.row(r)) s += v;
    return s;
  }

 private:
  Matrix<std::uint64_t> counts_;
  Matrix<double> probs_;
};

enum class WindowScope { general, per_user };

struct WindowConfig {
  std::size_t window_size = 1;  // instants of observed data per window
  WindowScope scope = WindowScope::per_user;
};

namespace detail {

inline void check_labels(const LabelTable& labels, std::size_t zone_count) {
  if (zone_count == 0) throw Error(ErrorKind::invalid_input, "zone_count must be positive");
  if (labels.rows() == 0 || labels.cols() == 0) throw Error(ErrorKind::invalid_input, "label table is empty");
  for (auto z : labels.data())
    if (z >= zone_count)
      throw Error(ErrorKind::invalid_input, "zone id " + std::to_string(z) + " out of range for " +
                                                std::to_string(zone_count) + " zones");
}

// Tallies transitions t -> t+1 for t in [first, last) over the given users.
inline void tally(const LabelTable& labels, std::size_t user_begin, std::size_t user_end, std::size_t first,
                  std::size_t last, Matrix<std::uint64_t>& counts) {
  for (std::size_t u = user_begin; u < user_end; ++u)
    for (std::size_t t = first; t < last; ++t) ++counts(labels(u, t), labels(u, t + 1));
}

}  // namespace detail

// Every user, every consecutive pair of instants.
inline TransitionMatrix build_general_matrix(const LabelTable& labels, std::size_t zone_count) {
  detail::check_labels(labels, zone_count);
  Matrix<std::uint64_t> counts(zone_count, zone_count, 0);
  detail::tally(labels, 0, labels.rows(), 0, labels.cols() - 1, counts);
  return TransitionMatrix(std::move(counts));
}

namespace detail {
// Unchecked window tally; callers validate the label table once.
inline TransitionMatrix window_matrix(const LabelTable& labels, std::size_t zone_count, std::size_t window_size,
                                      std::size_t end_instant, std::optional<std::size_t> user) {
  Matrix<std::uint64_t> counts(zone_count, zone_count, 0);
  const std::size_t first = end_instant + 1 - window_size;
  if (user)
    tally(labels, *user, *user + 1, first, end_instant, counts);
  else
    tally(labels, 0, labels.rows(), first, end_instant, counts);
  return TransitionMatrix(std::move(counts));
}
}  // namespace detail

// Window of W observed instants ending at end_instant inclusive, i.e. instants
// [end - W + 1, end] and W - 1 transitions per covered user. It forecasts
// instant end + 1.
inline TransitionMatrix build_window_matrix(const LabelTable& labels, std::size_t zone_count, const WindowConfig& cfg,
                                            std::size_t end_instant, std::optional<std::size_t> user = std::nullopt) {
  detail::check_labels(labels, zone_count);
  if (cfg.window_size == 0) throw Error(ErrorKind::invalid_input, "window_size must be >= 1");
  if (end_instant >= labels.cols()) throw Error(ErrorKind::invalid_input, "window end beyond the label table");
  if (end_instant + 1 < cfg.window_size)
    throw Error(ErrorKind::not_enough_history, "window of " + std::to_string(cfg.window_size) +
                                                   " instants not yet full at instant " + std::to_string(end_instant));
  if ((cfg.scope == WindowScope::per_user) != user.has_value())
    throw Error(ErrorKind::invalid_input, "a user id is required for per-user scope and only for it");
  if (user && *user >= labels.rows()) throw Error(ErrorKind::invalid_input, "user id out of range");

  return detail::window_matrix(labels, zone_count, cfg.window_size, end_instant, user);
}

// Interval sampling on row current_zone: [0, 1) is cut into consecutive
// left-closed, right-open intervals whose widths are the row probabilities,
// and the column whose interval holds u is returned. The last positive
// interval is closed at 1.0. A row with no observed transitions stays put.
inline ZoneId predict_next(ZoneId current_zone, const TransitionMatrix& matrix, double u) {
  if (current_zone >= matrix.zone_count()) throw Error(ErrorKind::invalid_input, "predict_next: zone out of range");
  if (!(u >= 0.0 && u < 1.0)) throw Error(ErrorKind::invalid_input, "predict_next: u must be in [0, 1)");
  if (matrix.row_total(current_zone) == 0) return current_zone;

  const auto row = matrix.row(current_zone);
  std::size_t last_positive = 0;
  for (std::size_t c = 0; c < row.size(); ++c)
    if (row[c] > 0.0) last_positive = c;
  double upper = 0.0;
  for (std::size_t c = 0; c < last_positive; ++c) {
    upper += row[c];
    if (u < upper) return static_cast<ZoneId>(c);
  }
  return static_cast<ZoneId>(last_positive);
}

struct PredictionRun {
  std::uint64_t seed = 0;
  std::size_t first_predicted = 0;  // == window_size
  // Predicted zone per (user, instant); instants before first_predicted hold
  // the observed zone.
  LabelTable predicted;
};

// Per-user stream for the forecaster; users are independent given the labels.
inline std::uint64_t prediction_stream_seed(std::uint64_t seed, std::size_t user) {
  return derive_seed(seed, 20, user);
}

// For every instant t >= W: learn a window matrix from observed labels
// in [t - W, t - 1], then move the user one step from its previous predicted
// zone (the observed zone at W - 1 on the first step).
inline PredictionRun run_prediction(const Zoning& zoning, const WindowConfig& cfg, std::uint64_t seed) {
  const auto& labels = zoning.labels();
  const std::size_t users = labels.rows();
  const std::size_t instants = labels.cols();
  const std::size_t zones = zoning.zone_count();
  detail::check_labels(labels, zones);
  if (cfg.window_size == 0) throw Error(ErrorKind::invalid_input, "window_size must be >= 1");
  if (instants <= cfg.window_size)
    throw Error(ErrorKind::not_enough_history, "run_prediction: " + std::to_string(instants) +
                                                   " instants do not exceed window size " +
                                                   std::to_string(cfg.window_size));

  PredictionRun run;
  run.seed = seed;
  run.first_predicted = cfg.window_size;
  run.predicted = labels;

  std::vector<Rng> streams;
  streams.reserve(users);
  for (std::size_t u = 0; u < users; ++u) streams.emplace_back(prediction_stream_seed(seed, u));

  for (std::size_t t = cfg.window_size; t < instants; ++t) {
    std::optional<TransitionMatrix> shared;
    if (cfg.scope == WindowScope::general) shared = detail::window_matrix(labels, zones, cfg.window_size, t - 1, {});
    for (std::size_t u = 0; u < users; ++u) {
      const ZoneId current = run.predicted(u, t - 1);
      const double draw = streams[u].uniform01();
      if (shared) {
        run.predicted(u, t) = predict_next(current, *shared, draw);
      } else {
        const auto m = detail::window_matrix(labels, zones, cfg.window_size, t - 1, u);
        run.predicted(u, t) = predict_next(current, m, draw);
      }
    }
  }
  return run;
}

}  // namespace tce
