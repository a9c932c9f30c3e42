#pragma once

// End-to-end driver: input -> zoning -> general matrix -> seeded prediction
// runs -> aggregation -> errors -> exports and plots -> manifest.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tce/aggregation.hpp"
#include "tce/config.hpp"
#include "tce/core.hpp"
#include "tce/exports.hpp"
#include "tce/markov.hpp"
#include "tce/metrics.hpp"
#include "tce/scenario.hpp"
#include "tce/svg.hpp"
#include "tce/trace_io.hpp"
#include "tce/zoning.hpp"

namespace tce {

// An Error raised inside a named pipeline stage.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause)
      : Error(cause.kind(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// 0 success, 2 config error, 3 data error, 4 numeric/infeasibility error.
inline int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::load:
    case ErrorKind::invalid_input: return 3;
    case ErrorKind::infeasible:
    case ErrorKind::no_zone:
    case ErrorKind::not_enough_history: return 4;
  }
  return 1;
}

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

template <typename F>
decltype(auto) stage(const std::string& name, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e);
  }
}

// Collects output files; everything written is removed again unless
// commit() is called.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {}
  OutputDir(const OutputDir&) = delete;
  OutputDir& operator=(const OutputDir&) = delete;
  ~OutputDir() {
    if (!committed_) rollback();
  }

  const std::filesystem::path& root() const { return root_; }

  void write(const std::string& rel, const std::string& content) {
    namespace fs = std::filesystem;
    const auto path = root_ / rel;
    make_dirs(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::load, "cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw Error(ErrorKind::load, "short write on '" + path.string() + "'");
    files_[rel] = fnv1a64(content);
  }

  template <typename Writer>
  void write_with(const std::string& rel, Writer&& w) {
    std::ostringstream o;
    w(o);
    write(rel, o.str());
  }

  const std::map<std::string, std::uint64_t>& files() const { return files_; }

  void commit() { committed_ = true; }

  void rollback() {
    std::error_code ec;
    for (const auto& [rel, hash] : files_) std::filesystem::remove(root_ / rel, ec);
    for (auto it = dirs_.rbegin(); it != dirs_.rend(); ++it) std::filesystem::remove(*it, ec);
    files_.clear();
    dirs_.clear();
  }

 private:
  void make_dirs(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (dir.empty() || fs::exists(dir)) return;
    make_dirs(dir.parent_path());
    std::error_code ec;
    fs::create_directory(dir, ec);
    if (ec) throw Error(ErrorKind::load, "cannot create directory '" + dir.string() + "'");
    dirs_.push_back(dir);
  }

  std::filesystem::path root_;
  std::map<std::string, std::uint64_t> files_;
  std::vector<std::filesystem::path> dirs_;
  bool committed_ = false;
};

struct RunStats {
  std::size_t run_id = 0;
  std::uint64_t seed = 0;
  double mean_error = 0.0;
  double median_error = 0.0;
};

// Outputs of one seeded prediction run.
struct RunResult {
  PredictionRun prediction;
  ZoneSeries series;
  ErrorSeries errors;
  RunStats stats;
};

struct PipelineResult {
  std::string config_hash;
  std::vector<RunStats> runs;
  double mean_error = 0.0;
  std::map<std::string, std::uint64_t> files;
};

inline std::uint64_t run_seed(const RunConfig& cfg, std::size_t run_index) { return cfg.base_seed + run_index; }

inline std::string run_dir(std::size_t r) { return "run_" + std::to_string(r); }

// ---- stages ---------------------------------------------------------------

inline TraceSet read_input(const RunConfig& cfg) {
  const auto venue = cfg.venue();
  const auto grid = cfg.grid();
  switch (cfg.input) {
    case InputMode::generate:
      return generate_scenario(venue, grid, cfg.user_count, cfg.mobility, cfg.traffic, cfg.base_seed);
    case InputMode::load:
      return load_trace(cfg.trace_path, cfg.traffic_path, venue, grid);
    case InputMode::waypoints: {
      auto in = csv::open_in(cfg.waypoint_path);
      auto positions = read_waypoint_lines(in, cfg.waypoint_path, grid);
      auto fin = csv::open_in(cfg.traffic_path);
      auto traffic = detail::read_traffic(fin, cfg.traffic_path);
      if (traffic.size() != positions.rows())
        throw Error(ErrorKind::load, cfg.traffic_path + ": covers " + std::to_string(traffic.size()) +
                                         " users, waypoint file has " + std::to_string(positions.rows()));
      return TraceSet(std::move(positions), std::move(traffic));
    }
  }
  throw Error(ErrorKind::config, "unknown input mode");
}

inline void check_plot_users(const RunConfig& cfg, std::size_t user_count) {
  for (auto u : cfg.plot_users)
    if (u >= user_count)
      throw Error(ErrorKind::config, "output.plot_users: unknown user id " + std::to_string(u) + " (" +
                                         std::to_string(user_count) + " users)");
}

inline void write_traces(const TraceSet& traces, OutputDir& out) {
  out.write_with("traces.csv", [&](std::ostream& o) { write_trace_csv(traces, o); });
  out.write_with("traffic.csv", [&](std::ostream& o) { write_traffic_csv(traces, o); });
}

inline void write_zoning(const Zoning& zoning, OutputDir& out) {
  out.write_with("zones.csv", [&](std::ostream& o) { write_zones_csv(zoning, o); });
  out.write_with("labels.csv", [&](std::ostream& o) { write_labels_csv(zoning.labels(), o); });
}

inline void write_general_matrix(const TransitionMatrix& m, OutputDir& out) {
  out.write_with("general_matrix_probs.csv", [&](std::ostream& o) { write_zone_matrix_csv(m.probs(), o); });
  out.write_with("general_matrix_counts.csv", [&](std::ostream& o) { write_zone_matrix_csv(m.counts(), o); });
}

// Aggregates and scores one prediction run.
inline RunResult evaluate_run(const RunConfig& cfg, const TraceSet& traces, const Zoning& zoning,
                              PredictionRun prediction, std::size_t run_id) {
  RunResult r;
  r.series = aggregate(traces, zoning.labels(), prediction.predicted, zoning.zone_count());
  r.errors = compute_errors(traces, zoning, prediction, cfg.metric);
  r.stats = {run_id, prediction.seed, mean_error(r.errors), median_error(r.errors)};
  r.prediction = std::move(prediction);
  return r;
}

// Runs run_count seeded predictions concurrently; results are in run order.
inline std::vector<RunResult> predict_runs(const RunConfig& cfg, const TraceSet& traces, const Zoning& zoning) {
  std::vector<std::future<RunResult>> jobs;
  for (std::size_t r = 0; r < cfg.run_count; ++r)
    jobs.push_back(std::async(std::launch::async, [&, r] {
      auto prediction = run_prediction(zoning, cfg.window, run_seed(cfg, r));
      return evaluate_run(cfg, traces, zoning, std::move(prediction), r);
    }));
  std::vector<RunResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline void write_run(const Zoning& zoning, const RunResult& r, OutputDir& out) {
  const auto dir = run_dir(r.stats.run_id) + "/";
  out.write_with(dir + "predictions.csv",
                 [&](std::ostream& o) { write_predictions_csv(zoning.labels(), r.prediction, o); });
  out.write_with(dir + "zone_series.csv", [&](std::ostream& o) { write_zone_series_csv(r.series, o); });
  out.write_with(dir + "errors.csv", [&](std::ostream& o) { write_errors_csv(r.errors, o); });
}

inline void write_histogram(const RunConfig& cfg, const std::vector<RunResult>& runs, OutputDir& out) {
  std::vector<ErrorSeries> errors;
  for (const auto& r : runs) errors.push_back(r.errors);
  out.write_with("histogram.csv",
                 [&](std::ostream& o) { write_histogram_csv(error_histogram(errors, cfg.histogram_bins), o); });
}

// Plot data (CSV) plus an SVG rendering of each: per selected user the real
// vs. predicted zone step series with the learning boundary at instant W;
// the scatter of every position; overlaid per-run error histograms; per-zone
// user-count and traffic series.
inline void emit_plots(const RunConfig& cfg, const TraceSet& traces, const Zoning& zoning,
                       const std::vector<RunResult>& runs, OutputDir& out) {
  check_plot_users(cfg, traces.user_count());
  const std::size_t n = traces.instant_count();
  const auto& first = runs.front();
  const std::size_t boundary = first.prediction.first_predicted;
  std::vector<double> ts(n);
  for (std::size_t t = 0; t < n; ++t) ts[t] = static_cast<double>(t);

  for (auto u : cfg.plot_users) {
    const auto base = "plots/user_" + std::to_string(u);
    out.write_with(base + ".csv", [&](std::ostream& o) {
      o << "# user " << u << " run 0 seed " << first.prediction.seed << "; boundary at instant " << boundary << '\n';
      o << "t,real_zone,predicted_zone,is_prediction\n";
      for (std::size_t t = 0; t < n; ++t)
        o << t << ',' << zoning.labels()(u, t) << ',' << first.prediction.predicted(u, t) << ','
          << (t >= boundary ? 1 : 0) << '\n';
    });
    svg::Chart chart("User " + std::to_string(u) + ": real vs. predicted zone", "instant", "zone");
    svg::Series real{"real", ts, {}, true, false};
    svg::Series pred{"predicted", ts, {}, true, true};
    for (std::size_t t = 0; t < n; ++t) {
      real.y.push_back(zoning.labels()(u, t));
      pred.y.push_back(first.prediction.predicted(u, t));
    }
    chart.add(std::move(real));
    chart.add(std::move(pred));
    chart.vline(static_cast<double>(boundary), "t=" + std::to_string(boundary));
    chart.y_range(0.0, static_cast<double>(zoning.zone_count() - 1) + 0.5);
    out.write(base + ".svg", chart.render());
  }

  out.write_with("plots/scatter.csv", [&](std::ostream& o) { write_trace_csv(traces, o); });
  {
    svg::Chart chart("All positions, all instants", "x", "y");
    chart.points(traces.positions().data());
    chart.rect(cfg.precinct, "precinct");
    for (const auto& r : cfg.outside_regions) chart.rect(r, "outside");
    out.write("plots/scatter.svg", chart.render());
  }

  {
    svg::Chart chart("Prediction error histogram", "error", "count");
    std::vector<ErrorSeries> errors;
    for (const auto& r : runs) errors.push_back(r.errors);
    const auto counts = error_histogram(errors, cfg.histogram_bins);
    for (std::size_t r = 0; r < counts.size(); ++r) {
      svg::Bars bars{"run " + std::to_string(r), {}, {}, {}};
      for (std::size_t b = 0; b < counts[r].size(); ++b) {
        bars.lo.push_back(static_cast<double>(b) / static_cast<double>(cfg.histogram_bins));
        bars.hi.push_back(static_cast<double>(b + 1) / static_cast<double>(cfg.histogram_bins));
        bars.height.push_back(static_cast<double>(counts[r][b]));
      }
      chart.add(std::move(bars));
    }
    out.write("plots/histogram.svg", chart.render());
  }

  for (std::size_t z = 0; z < zoning.zone_count(); ++z) {
    const auto base = "plots/zone_" + std::to_string(z);
    const auto& s = first.series;
    out.write_with(base + ".csv", [&](std::ostream& o) {
      o << "t,users_real,users_pred,traffic_real,traffic_pred\n";
      for (std::size_t t = 0; t < n; ++t)
        o << t << ',' << s.users_real(z, t) << ',' << s.users_pred(z, t) << ',' << csv::fmt(s.traffic_real(z, t))
          << ',' << csv::fmt(s.traffic_pred(z, t)) << '\n';
    });
    svg::Chart users("Zone " + std::to_string(z) + ": users", "instant", "users");
    svg::Chart traffic("Zone " + std::to_string(z) + ": traffic", "instant", "Mbit/s");
    svg::Series ur{"real", ts, {}, false, false}, up{"predicted", ts, {}, false, true};
    svg::Series tr{"real", ts, {}, false, false}, tp{"predicted", ts, {}, false, true};
    for (std::size_t t = 0; t < n; ++t) {
      ur.y.push_back(static_cast<double>(s.users_real(z, t)));
      up.y.push_back(static_cast<double>(s.users_pred(z, t)));
      tr.y.push_back(s.traffic_real(z, t));
      tp.y.push_back(s.traffic_pred(z, t));
    }
    users.add(std::move(ur));
    users.add(std::move(up));
    traffic.add(std::move(tr));
    traffic.add(std::move(tp));
    users.vline(static_cast<double>(boundary), "t=" + std::to_string(boundary));
    traffic.vline(static_cast<double>(boundary), "t=" + std::to_string(boundary));
    out.write(base + "_users.svg", users.render());
    out.write(base + "_traffic.svg", traffic.render());
  }
}

inline std::string config_hash(const RunConfig& cfg) { return hex64(fnv1a64(canonical_text(cfg))); }

// Writes manifest.json listing every output file with its content hash.
inline void write_manifest(const RunConfig& cfg, const std::string& command, const std::vector<RunStats>& runs,
                           OutputDir& out) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["config_hash"] = config_hash(cfg);
  m["config"] = canonical_text(cfg);
  m["base_seed"] = cfg.base_seed;
  nlohmann::ordered_json rs = nlohmann::ordered_json::array();
  double total = 0.0;
  for (const auto& r : runs) {
    rs.push_back({{"run_id", r.run_id}, {"seed", r.seed}, {"mean_error", r.mean_error}, {"median_error", r.median_error}});
    total += r.mean_error;
  }
  m["runs"] = rs;
  if (!runs.empty()) m["mean_error"] = total / static_cast<double>(runs.size());
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& [rel, hash] : out.files()) files.push_back({{"path", rel}, {"fnv1a64", hex64(hash)}});
  m["files"] = files;
  out.write("manifest.json", m.dump(2) + "\n");
}

// Full pipeline. On any error every file written so far is removed and a
// StageError naming the failing stage propagates.
inline PipelineResult run(const RunConfig& cfg) {
  stage("config", [&] { validate(cfg); });
  OutputDir out(cfg.out_dir);

  const auto traces = stage("input", [&] { return read_input(cfg); });
  stage("config", [&] { check_plot_users(cfg, traces.user_count()); });
  stage("input", [&] { write_traces(traces, out); });

  const auto venue = cfg.venue();
  const auto zoning = stage("cluster", [&] {
    auto z = cluster(traces, venue, cfg.k_inside, cfg.k_outside, cfg.base_seed);
    write_zoning(z, out);
    return z;
  });
  stage("matrix", [&] { write_general_matrix(build_general_matrix(zoning.labels(), zoning.zone_count()), out); });

  const auto runs = stage("predict", [&] { return predict_runs(cfg, traces, zoning); });
  stage("export", [&] {
    for (const auto& r : runs) write_run(zoning, r, out);
    write_histogram(cfg, runs, out);
  });
  stage("plots", [&] { emit_plots(cfg, traces, zoning, runs, out); });

  PipelineResult result;
  result.config_hash = config_hash(cfg);
  for (const auto& r : runs) {
    result.runs.push_back(r.stats);
    result.mean_error += r.stats.mean_error;
  }
  result.mean_error /= static_cast<double>(runs.size());
  stage("manifest", [&] { write_manifest(cfg, "run", result.runs, out); });
  result.files = out.files();
  out.commit();
  return result;
}

// ---- stage-level commands over the CSV interchange files ------------------

struct StageInputs {
  std::string trace_path;
  std::string traffic_path;
  std::string zones_path;
  std::vector<std::string> prediction_paths;
};

inline TraceSet load_stage_traces(const RunConfig& cfg, const StageInputs& in) {
  if (in.trace_path.empty() || in.traffic_path.empty())
    throw Error(ErrorKind::config, "--traces and --traffic are required");
  return load_trace(in.trace_path, in.traffic_path, cfg.venue(), cfg.grid());
}

inline Zoning load_stage_zoning(const RunConfig& cfg, const TraceSet& traces, const StageInputs& in) {
  if (in.zones_path.empty()) throw Error(ErrorKind::config, "--zones is required");
  auto zin = csv::open_in(in.zones_path);
  auto c = read_zones_csv(zin, in.zones_path);
  auto labels = label_traces(traces, c.inside, c.outside, cfg.venue());
  return Zoning(std::move(c.inside), std::move(c.outside), std::move(labels));
}

inline void run_generate(RunConfig cfg) {
  cfg.input = InputMode::generate;
  stage("config", [&] { validate(cfg); });
  OutputDir out(cfg.out_dir);
  const auto traces = stage("generate", [&] { return read_input(cfg); });
  stage("generate", [&] { write_traces(traces, out); });
  stage("manifest", [&] { write_manifest(cfg, "generate", {}, out); });
  out.commit();
}

inline void run_cluster(const RunConfig& cfg, const StageInputs& in) {
  stage("config", [&] { validate(cfg); });
  OutputDir out(cfg.out_dir);
  const auto traces = stage("input", [&] { return load_stage_traces(cfg, in); });
  const auto zoning = stage("cluster", [&] { return cluster(traces, cfg.venue(), cfg.k_inside, cfg.k_outside, cfg.base_seed); });
  stage("cluster", [&] { write_zoning(zoning, out); });
  stage("matrix", [&] { write_general_matrix(build_general_matrix(zoning.labels(), zoning.zone_count()), out); });
  stage("manifest", [&] { write_manifest(cfg, "cluster", {}, out); });
  out.commit();
}

inline void run_predict(const RunConfig& cfg, const StageInputs& in) {
  stage("config", [&] { validate(cfg); });
  OutputDir out(cfg.out_dir);
  const auto traces = stage("input", [&] { return load_stage_traces(cfg, in); });
  const auto zoning = stage("input", [&] { return load_stage_zoning(cfg, traces, in); });
  stage("predict", [&] {
    for (std::size_t r = 0; r < cfg.run_count; ++r) {
      const auto run = run_prediction(zoning, cfg.window, run_seed(cfg, r));
      out.write_with(run_dir(r) + "/predictions.csv",
                     [&](std::ostream& o) { write_predictions_csv(zoning.labels(), run, o); });
    }
  });
  stage("manifest", [&] { write_manifest(cfg, "predict", {}, out); });
  out.commit();
}

inline PipelineResult run_report(const RunConfig& cfg, const StageInputs& in) {
  stage("config", [&] { validate(cfg); });
  if (in.prediction_paths.empty()) throw StageError("config", Error(ErrorKind::config, "--predictions is required"));
  OutputDir out(cfg.out_dir);
  const auto traces = stage("input", [&] { return load_stage_traces(cfg, in); });
  stage("config", [&] { check_plot_users(cfg, traces.user_count()); });
  const auto zoning = stage("input", [&] { return load_stage_zoning(cfg, traces, in); });
  std::vector<RunResult> runs;
  stage("report", [&] {
    for (std::size_t r = 0; r < in.prediction_paths.size(); ++r) {
      auto pin = csv::open_in(in.prediction_paths[r]);
      auto pred = read_predictions_csv(pin, in.prediction_paths[r], zoning.labels(), cfg.window.window_size,
                                       run_seed(cfg, r));
      runs.push_back(evaluate_run(cfg, traces, zoning, std::move(pred), r));
    }
    for (const auto& r : runs) {
      const auto dir = run_dir(r.stats.run_id) + "/";
      out.write_with(dir + "zone_series.csv", [&](std::ostream& o) { write_zone_series_csv(r.series, o); });
      out.write_with(dir + "errors.csv", [&](std::ostream& o) { write_errors_csv(r.errors, o); });
    }
    write_histogram(cfg, runs, out);
  });
  stage("plots", [&] { emit_plots(cfg, traces, zoning, runs, out); });
  PipelineResult result;
  result.config_hash = config_hash(cfg);
  for (const auto& r : runs) {
    result.runs.push_back(r.stats);
    result.mean_error += r.stats.mean_error;
  }
  result.mean_error /= static_cast<double>(runs.size());
  stage("manifest", [&] { write_manifest(cfg, "report", result.runs, out); });
  result.files = out.files();
  out.commit();
  return result;
}

}  // namespace tce
