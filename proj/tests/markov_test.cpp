#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>

#include "tce/markov.hpp"
#include "test_support.hpp"

using namespace tce;
using tce::oracle::Table;

namespace {

Zoning zoning_for(const Table& t, std::size_t zones) {
  std::vector<Vec2> cs;
  for (std::size_t z = 0; z < zones; ++z) cs.push_back({static_cast<double>(z), 0.0});
  return Zoning(cs, {}, oracle::to_labels(t));
}

Matrix<std::uint64_t> to_matrix(const std::vector<std::vector<std::uint64_t>>& v) {
  Matrix<std::uint64_t> m(v.size(), v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r][c];
  return m;
}

}  // namespace

TEST(TransitionMatrix, WorkedRowNormalization) {
  Matrix<std::uint64_t> counts(3, 3, 0);
  counts(0, 0) = 1;
  counts(0, 1) = 1;
  counts(0, 2) = 2;
  const TransitionMatrix m(counts);
  EXPECT_EQ(m.probs()(0, 0), 0.25);
  EXPECT_EQ(m.probs()(0, 1), 0.25);
  EXPECT_EQ(m.probs()(0, 2), 0.5);
  EXPECT_EQ(m.probs()(1, 1), 0.0);
}

TEST(GeneralMatrix, WorkedRowFromTrajectories) {
  // From zone 0: one stay, one move to 1, two moves to 2.
  const Table t{{0, 0, 1}, {0, 2, 2}, {1, 0, 2}};
  const auto m = build_general_matrix(oracle::to_labels(t), 3);
  EXPECT_EQ(m.counts()(0, 0), 1u);
  EXPECT_EQ(m.counts()(0, 1), 1u);
  EXPECT_EQ(m.counts()(0, 2), 2u);
  EXPECT_EQ(m.probs()(0, 0), 0.25);
  EXPECT_EQ(m.probs()(0, 1), 0.25);
  EXPECT_EQ(m.probs()(0, 2), 0.5);
}

TEST(GeneralMatrix, AbsorbingSingleState) {
  const Table t{{2, 2, 2, 2, 2}};
  const auto m = build_general_matrix(oracle::to_labels(t), 4);
  EXPECT_EQ(m.probs()(2, 2), 1.0);
  for (ZoneId r = 0; r < 4; ++r) {
    if (r != 2) {
      EXPECT_EQ(m.row_total(r), 0u);
    }
  }
}

TEST(GeneralMatrix, MatchesNaiveTallyAndIsRowStochastic) {
  std::mt19937_64 g(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto t = oracle::random_table(g, 5, 10, 3);
    const auto m = build_general_matrix(oracle::to_labels(t), 3);
    EXPECT_EQ(m.counts(), to_matrix(oracle::naive_counts(t, 3)));
    for (ZoneId r = 0; r < 3; ++r) {
      if (m.row_total(r) == 0) continue;
      double s = 0;
      for (double p : m.row(r)) s += p;
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(GeneralMatrix, RejectsOutOfRangeLabels) {
  const Table t{{0, 3}};
  try {
    build_general_matrix(oracle::to_labels(t), 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_input);
  }
}

TEST(WindowMatrix, SlidingUsesObservedLabels) {
  // W = 3: instants 0,1,2 forecast 3; then instants 1,2,3 forecast 4.
  const Table t{{0, 1, 1, 2, 0}};
  const auto labels = oracle::to_labels(t);
  const WindowConfig cfg{3, WindowScope::per_user};
  const auto first = build_window_matrix(labels, 3, cfg, 2, 0);
  EXPECT_EQ(first.counts()(0, 1), 1u);
  EXPECT_EQ(first.counts()(1, 1), 1u);
  EXPECT_EQ(first.row_total(1) + first.row_total(0) + first.row_total(2), 2u);
  const auto next = build_window_matrix(labels, 3, cfg, 3, 0);
  EXPECT_EQ(next.counts()(1, 1), 1u);
  EXPECT_EQ(next.counts()(1, 2), 1u);  // the real label at instant 3
  EXPECT_EQ(next.counts()(0, 1), 0u);
}

TEST(WindowMatrix, ConstantWindow) {
  const Table t{{1, 0, 0, 0, 0, 2}};
  const auto m = build_window_matrix(oracle::to_labels(t), 3, {4, WindowScope::per_user}, 4, 0);
  EXPECT_EQ(m.probs()(0, 0), 1.0);
  EXPECT_EQ(m.row_total(0), 3u);
}

TEST(WindowMatrix, EqualsNaiveTallyOnTheWindowAtEveryStep) {
  std::mt19937_64 g(2);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t users = 1 + trial % 6, instants = 2 + trial % 9;
    const auto t = oracle::random_table(g, users, instants, 3);
    const auto labels = oracle::to_labels(t);
    for (std::size_t w = 1; w < instants; ++w)
      for (std::size_t end = w - 1; end < instants; ++end) {
        const auto gen = build_window_matrix(labels, 3, {w, WindowScope::general}, end);
        EXPECT_EQ(gen.counts(), to_matrix(oracle::naive_counts(t, 3, end + 1 - w, end, 0, users)));
        for (std::size_t u = 0; u < users; ++u) {
          const auto per = build_window_matrix(labels, 3, {w, WindowScope::per_user}, end, u);
          EXPECT_EQ(per.counts(), to_matrix(oracle::naive_counts(t, 3, end + 1 - w, end, u, u + 1)));
        }
      }
  }
}

TEST(WindowMatrix, Errors) {
  const auto labels = oracle::to_labels(Table{{0, 1, 2, 0}});
  auto kind = [&](const WindowConfig& c, std::size_t end, std::optional<std::size_t> u) {
    try {
      build_window_matrix(labels, 3, c, end, u);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::config;  // sentinel: no error
  };
  EXPECT_EQ(kind({3, WindowScope::per_user}, 1, 0), ErrorKind::not_enough_history);
  EXPECT_EQ(kind({3, WindowScope::per_user}, 2, std::nullopt), ErrorKind::invalid_input);
  EXPECT_EQ(kind({3, WindowScope::general}, 2, 0), ErrorKind::invalid_input);
  EXPECT_EQ(kind({3, WindowScope::general}, 4, std::nullopt), ErrorKind::invalid_input);
  EXPECT_EQ(kind({3, WindowScope::general}, 2, std::nullopt), ErrorKind::config);
}

TEST(PredictNext, WorkedDraw) {
  Matrix<std::uint64_t> counts(3, 3, 0);
  counts(0, 0) = 1;
  counts(0, 1) = 1;
  counts(0, 2) = 2;
  const TransitionMatrix m(counts);
  EXPECT_EQ(predict_next(0, m, 0.49), 1u);
  EXPECT_EQ(predict_next(0, m, 0.0), 0u);
  EXPECT_EQ(predict_next(0, m, 0.2499999), 0u);
  EXPECT_EQ(predict_next(0, m, 0.25), 1u);  // left-closed intervals
  EXPECT_EQ(predict_next(0, m, 0.5), 2u);
  EXPECT_EQ(predict_next(0, m, std::nextafter(1.0, 0.0)), 2u);
  EXPECT_THROW(predict_next(0, m, 1.0), Error);
  EXPECT_THROW(predict_next(3, m, 0.1), Error);
}

TEST(PredictNext, DeterministicRowAndEmptyRowFallback) {
  Matrix<std::uint64_t> counts(3, 3, 0);
  counts(0, 1) = 7;
  const TransitionMatrix m(counts);
  for (double u : {0.0, 0.3, 0.999999}) EXPECT_EQ(predict_next(0, m, u), 1u);
  EXPECT_EQ(predict_next(2, m, 0.7), 2u);  // no data: stay
}

TEST(PredictNext, RoundingDriftNeverFallsPastLastInterval) {
  // Thirds sum to slightly less than 1 in floating point.
  Matrix<std::uint64_t> counts(3, 3, 1);
  const TransitionMatrix m(counts);
  EXPECT_EQ(predict_next(0, m, std::nextafter(1.0, 0.0)), 2u);
  Matrix<std::uint64_t> tail(4, 4, 0);
  tail(1, 0) = 1;
  tail(1, 1) = 2;  // last column has zero mass
  EXPECT_EQ(predict_next(1, TransitionMatrix(tail), std::nextafter(1.0, 0.0)), 1u);
}

TEST(PredictNext, MonteCarloFrequencies) {
  Matrix<std::uint64_t> counts(3, 3, 0);
  counts(0, 0) = 1;
  counts(0, 1) = 1;
  counts(0, 2) = 2;
  const TransitionMatrix m(counts);
  Rng rng(123);
  constexpr std::size_t N = 1'000'000;
  std::array<double, 3> hits{};
  for (std::size_t i = 0; i < N; ++i) ++hits[predict_next(0, m, rng.uniform01())];
  const double p[3] = {0.25, 0.25, 0.5};
  for (int c = 0; c < 3; ++c) EXPECT_LE(std::abs(hits[c] - N * p[c]), 3 * std::sqrt(N * p[c] * (1 - p[c])));
}

TEST(RunPrediction, LearningPrefixMatchesRealSeries) {
  std::mt19937_64 g(8);
  const auto t = oracle::random_table(g, 6, 40, 3);
  const auto z = zoning_for(t, 3);
  for (auto scope : {WindowScope::per_user, WindowScope::general}) {
    const auto run = run_prediction(z, {20, scope}, 5);
    EXPECT_EQ(run.first_predicted, 20u);
    for (std::size_t u = 0; u < 6; ++u)
      for (std::size_t k = 0; k < 20; ++k) EXPECT_EQ(run.predicted(u, k), z.labels()(u, k));
  }
}

TEST(RunPrediction, FrozenUserIsPredictedExactly) {
  const Table t{{1, 1, 1, 1, 1, 1, 1, 1}, {0, 2, 0, 2, 0, 2, 0, 2}};
  const auto run = run_prediction(zoning_for(t, 3), {3, WindowScope::per_user}, 1);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(run.predicted(0, k), 1u);
  // Deterministic alternation is also learned exactly.
  for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(run.predicted(1, k), t[1][k]);
}

TEST(RunPrediction, PredictionCountIsInstantsMinusWindow) {
  std::mt19937_64 g(4);
  for (std::size_t n = 2; n <= 10; ++n)
    for (std::size_t w = 1; w < n; ++w) {
      const auto t = oracle::random_table(g, 3, n, 3);
      const auto run = run_prediction(zoning_for(t, 3), {w, WindowScope::per_user}, 9);
      EXPECT_EQ(run.first_predicted, w);
      std::size_t predicted = 0;
      for (std::size_t k = 0; k < n; ++k) predicted += k >= run.first_predicted;
      EXPECT_EQ(predicted, n - w);
      if (w == n - 1) {
        EXPECT_EQ(predicted, 1u);
      }
    }
  const auto t = oracle::random_table(g, 2, 5, 3);
  try {
    run_prediction(zoning_for(t, 3), {5, WindowScope::per_user}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_enough_history);
  }
}

// Replays the forecaster by hand: window matrices from TRUE labels only, the
// current state is the previous prediction, draws from the per-user stream.
TEST(RunPrediction, ChainsPredictionsAndLearnsOnlyFromObservations) {
  std::mt19937_64 g(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto t = oracle::random_table(g, 4, 12, 3);
    const auto z = zoning_for(t, 3);
    for (auto scope : {WindowScope::per_user, WindowScope::general}) {
      const WindowConfig cfg{4, scope};
      const auto run = run_prediction(z, cfg, trial);
      for (std::size_t u = 0; u < 4; ++u) {
        Rng rng(prediction_stream_seed(trial, u));
        ZoneId state = t[u][3];
        for (std::size_t k = 4; k < 12; ++k) {
          const auto m = scope == WindowScope::general ? build_window_matrix(z.labels(), 3, cfg, k - 1)
                                                       : build_window_matrix(z.labels(), 3, cfg, k - 1, u);
          state = predict_next(state, m, rng.uniform01());
          ASSERT_EQ(run.predicted(u, k), state);
        }
      }
    }
  }
}

TEST(RunPrediction, SameSeedSameRun) {
  std::mt19937_64 g(1);
  const auto z = zoning_for(oracle::random_table(g, 10, 30, 4), 4);
  const auto a = run_prediction(z, {5, WindowScope::per_user}, 77);
  const auto b = run_prediction(z, {5, WindowScope::per_user}, 77);
  const auto c = run_prediction(z, {5, WindowScope::per_user}, 78);
  EXPECT_EQ(a.predicted, b.predicted);
  EXPECT_NE(a.predicted, c.predicted);
}
