// tce: crowd mobility and traffic pipeline driver.
//
//   tce run      --config FILE [--seed N] [--out DIR]
//   tce generate --config FILE [--seed N] [--out DIR]
//   tce cluster  --config FILE --traces T --traffic F [--seed N] [--out DIR]
//   tce predict  --config FILE --traces T --traffic F --zones Z [--seed N] [--out DIR]
//   tce report   --config FILE --traces T --traffic F --zones Z --predictions P... [--out DIR]

#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "tce/pipeline.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "run configuration (INI); built-in reference run when omitted")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "override output.base_seed");
  cmd->add_option("--out", o.out, "override output.out_dir");
}

tce::RunConfig resolve(const CommonOptions& o) {
  tce::RunConfig cfg;
  if (!o.config.empty()) cfg = tce::load_config(o.config);
  if (o.seed) cfg.base_seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  return cfg;
}

std::string config_help() {
  std::ostringstream o;
  o << "Configuration keys ([section] key = value):\n";
  for (const auto& k : tce::config_keys()) o << "  " << k.key << "\n      " << k.help << "\n";
  o << "\nExit codes: 0 success, 2 config error, 3 data error, 4 numeric/infeasibility error.\n";
  return o.str();
}

void print_summary(const tce::PipelineResult& r) {
  for (const auto& s : r.runs)
    std::cout << "run " << s.run_id << " seed " << s.seed << " mean_error " << s.mean_error << " median_error "
              << s.median_error << "\n";
  std::cout << "mean_error over runs " << r.mean_error << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint crowd mobility and traffic characterization for temporary crowded events"};
  app.footer(config_help());
  app.require_subcommand(1);

  CommonOptions run_opts, gen_opts, cluster_opts, predict_opts, report_opts;
  tce::StageInputs cluster_in, predict_in, report_in;

  auto* run = app.add_subcommand("run", "full pipeline: input, zoning, prediction runs, report, plots");
  add_common(run, run_opts);

  auto* gen = app.add_subcommand("generate", "generate a synthetic trace and traffic file");
  add_common(gen, gen_opts);

  auto add_trace_inputs = [](CLI::App* cmd, tce::StageInputs& in) {
    cmd->add_option("--traces", in.trace_path, "trace CSV user_id,t,x,y")->required()->check(CLI::ExistingFile);
    cmd->add_option("--traffic", in.traffic_path, "traffic CSV user_id,mean_traffic_mbps")
        ->required()
        ->check(CLI::ExistingFile);
  };

  auto* clu = app.add_subcommand("cluster", "cluster positions into zones and build the general matrix");
  add_common(clu, cluster_opts);
  add_trace_inputs(clu, cluster_in);

  auto* pre = app.add_subcommand("predict", "seeded sliding-window predictions over fixed zones");
  add_common(pre, predict_opts);
  add_trace_inputs(pre, predict_in);
  pre->add_option("--zones", predict_in.zones_path, "zones CSV zone_id,region,cx,cy")
      ->required()
      ->check(CLI::ExistingFile);

  auto* rep = app.add_subcommand("report", "aggregation, errors, histogram and plots for prediction files");
  add_common(rep, report_opts);
  add_trace_inputs(rep, report_in);
  rep->add_option("--zones", report_in.zones_path, "zones CSV zone_id,region,cx,cy")
      ->required()
      ->check(CLI::ExistingFile);
  rep->add_option("--predictions", report_in.prediction_paths, "prediction CSVs, one per run")
      ->required()
      ->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      print_summary(tce::run(resolve(run_opts)));
    } else if (*gen) {
      tce::run_generate(resolve(gen_opts));
    } else if (*clu) {
      tce::run_cluster(resolve(cluster_opts), cluster_in);
    } else if (*pre) {
      tce::run_predict(resolve(predict_opts), predict_in);
    } else if (*rep) {
      print_summary(tce::run_report(resolve(report_opts), report_in));
    }
  } catch (const tce::Error& e) {
    std::cerr << "tce: " << tce::to_string(e.kind()) << " error " << e.what() << "\n";
    return tce::exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "tce: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
