#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "swiftband/coordinator.hpp"
#include "swiftband/error.hpp"
#include "swiftband/evaluation.hpp"
#include "swiftband/experiment.hpp"
#include "swiftband/worker.hpp"

namespace swiftband::cli {

namespace {

struct ExperimentFlags {
  std::string config;
  std::string dataset;
  std::vector<std::string> algorithms;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool no_wall_time = false;
};

void add_experiment_flags(CLI::App* app, ExperimentFlags& f) {
  app->add_option("--config", f.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  app->add_option("--dataset", f.dataset, "Dataset prefix or file (replaces the configured dataset)");
  app->add_option("--algorithms", f.algorithms, "hyperband,fast,swift_svr,swift_qsvr,threshold_search")
      ->delimiter(',');
  app->add_option("--runs", f.runs, "Runs per algorithm");
  app->add_option("--seed", f.seed, "Base seed; run i uses seed + i");
  app->add_option("--out", f.out, "Output directory for report and plot data");
  app->add_flag("--no-wall-time", f.no_wall_time, "Record zero wall times (byte-identical reports)");
}

ExperimentConfig resolve_experiment(const ExperimentFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = load_experiment_config(f.config);
  } else {
    cfg.dataset = DatasetSpec{std::nullopt, SyntheticSpec{}, 1};
  }
  if (!f.dataset.empty()) cfg.dataset = DatasetSpec{f.dataset, std::nullopt, 1};
  if (!f.algorithms.empty()) {
    cfg.algorithms.clear();
    for (const auto& name : f.algorithms) cfg.algorithms.push_back(algorithm_from_string(name));
  }
  if (f.runs) cfg.runs = *f.runs;
  if (f.seed) cfg.base_seed = *f.seed;
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.no_wall_time) cfg.record_wall_time = false;
  cfg.validate();
  return cfg;
}

void print_summary(const ExperimentReport& report, std::ostream& out) {
  out << std::left << std::setw(18) << "algorithm" << std::right << std::setw(6) << "runs" << std::setw(18)
      << ("mean_" + report.metric_name) << std::setw(14) << "mean_epochs" << '\n';
  for (const auto& s : report.summaries) {
    std::ostringstream metric, epochs;
    metric << std::setprecision(6) << s.mean_best_metric;
    epochs << std::fixed << std::setprecision(1) << s.mean_epochs;
    out << std::left << std::setw(18) << s.algorithm << std::right << std::setw(6) << s.runs << std::setw(18)
        << metric.str() << std::setw(14) << epochs.str() << '\n';
  }
}

int cmd_generate(const SyntheticSpec& spec, std::uint64_t seed, const std::string& out_dir, const std::string& name,
                 std::ostream& out) {
  spec.validate();
  std::mt19937_64 rng(seed);
  const auto dataset = generate_synthetic(spec, rng);
  std::filesystem::create_directories(out_dir);
  const auto prefix = std::filesystem::path(out_dir) / name;
  save_dataset(dataset, prefix);
  out << "wrote " << dataset.size() << " rows, target epoch " << dataset.meta().target_epoch << " to "
      << curves_path(prefix).string() << " and " << meta_path(prefix).string() << '\n';
  return kExitOk;
}

int cmd_simulate(const ExperimentFlags& flags, std::ostream& out) {
  const auto cfg = resolve_experiment(flags);
  const auto report = run_experiment(cfg);
  write_experiment_outputs(report, cfg.output_dir);
  print_summary(report, out);
  out << "reports written to " << cfg.output_dir.string() << '\n';
  return kExitOk;
}

struct EvalFlags {
  std::string dataset;
  double fraction = 0.25;
  std::string predictor = "svr";
  std::uint64_t seed = 0;
  std::optional<std::size_t> train_cap;
};

int cmd_predict_eval(const EvalFlags& flags, std::ostream& out) {
  PredictorEvalOptions options;
  options.fraction = flags.fraction;
  options.split_seed = flags.seed;
  options.train_cap = flags.train_cap;
  options.predictor.kind = predictor_kind_from_string(flags.predictor);
  if (!(flags.fraction > 0.0 && flags.fraction < 1.0))
    throw ConfigError("--fraction must be in (0,1); at 1 the final value would be an input");
  const auto dataset = load_dataset(flags.dataset);
  const auto result = evaluate_predictor(dataset, options);
  out << "predictor=" << flags.predictor << " observe_epoch=" << result.observe_epoch
      << " train=" << result.train_size << " test=" << result.test_size << " r2=" << std::setprecision(6)
      << result.r2 << '\n';
  return kExitOk;
}

struct CoordinatorFlags {
  ExperimentFlags experiment;
  std::string bind = "127.0.0.1:5555";
  int workers = 1;
  int heartbeat_timeout_ms = 10000;
  int register_timeout_ms = 60000;
};

int cmd_coordinator(const CoordinatorFlags& flags, std::ostream& out) {
  const auto cfg = resolve_experiment(flags.experiment);
  const auto dataset = materialize_dataset(cfg);
  CoordinatorOptions options;
  options.bind = flags.bind;
  options.expected_workers = flags.workers;
  options.heartbeat_timeout = std::chrono::milliseconds(flags.heartbeat_timeout_ms);
  options.register_timeout = std::chrono::milliseconds(flags.register_timeout_ms);
  options.runner_kind = dataset ? "replay" : "config";
  const auto& dims = dataset ? dataset->space().dims() : cfg.space->dims;
  for (const auto& dim : dims) options.hp_names.push_back(dim.name);

  Coordinator coordinator(options);
  const auto host = parse_endpoint(flags.bind).first;
  out << "listening on " << host << ':' << coordinator.port() << std::endl;
  coordinator.wait_for_workers();
  out << coordinator.live_workers() << " workers registered" << std::endl;
  ExperimentEnvironment env;
  env.runner = &coordinator;
  const auto report = run_experiment(cfg, dataset, env);
  coordinator.shutdown();
  write_experiment_outputs(report, cfg.output_dir);
  print_summary(report, out);
  const auto& stats = coordinator.stats();
  out << "tasks " << stats.accepted.size() << " accepted, " << stats.tasks_reassigned << " reassigned, "
      << stats.duplicates_discarded << " duplicates discarded, " << stats.workers_lost << " workers lost\n";
  out << "reports written to " << cfg.output_dir.string() << '\n';
  return kExitOk;
}

struct WorkerFlags {
  std::string connect = "127.0.0.1:5555";
  std::string name;
  std::string dataset;
  bool synthetic = false;
  SyntheticSpec spec;
  std::uint64_t synthetic_seed = 1;
  std::string command;
  int heartbeat_ms = 2000;
  int retries = 5;
  int retry_delay_ms = 500;
  std::optional<int> crash_after;
  std::optional<int> stall_after;
};

int cmd_worker(const WorkerFlags& flags, std::ostream& out) {
  const int backings = !flags.dataset.empty() + flags.synthetic + !flags.command.empty();
  if (backings != 1) throw ConfigError("worker needs exactly one of --dataset, --synthetic or --command");
  WorkerOptions options;
  options.coordinator = flags.connect;
  options.name = flags.name.empty() ? "worker-" + std::to_string(::getpid()) : flags.name;
  options.heartbeat_interval = std::chrono::milliseconds(flags.heartbeat_ms);
  options.connect_attempts = flags.retries;
  options.retry_delay = std::chrono::milliseconds(flags.retry_delay_ms);
  options.crash_after_tasks = flags.crash_after;
  options.stall_after_tasks = flags.stall_after;

  std::optional<LearningCurveDataset> dataset;
  std::unique_ptr<TrialRunner> backing;
  if (!flags.dataset.empty()) {
    dataset = load_dataset(flags.dataset);
    backing = std::make_unique<ReplayRunner>(*dataset);
    options.capabilities = {"replay"};
  } else if (flags.synthetic) {
    flags.spec.validate();
    backing = std::make_unique<SyntheticRunner>(SearchSpace::unit_cube(static_cast<std::size_t>(flags.spec.hp_dim)),
                                                flags.spec.family, flags.spec.noise_sigma, flags.synthetic_seed,
                                                flags.spec.target_epoch);
    options.capabilities = {"config"};
  } else {
    backing = std::make_unique<CommandRunner>(flags.command);
    options.capabilities = {"config"};
  }
  const int status = run_worker(options, *backing);
  if (status == kWorkerShutdown) out << options.name << ": shutdown received\n";
  return status;
}

struct ReportFlags {
  std::string in;
  std::string format;
  std::string out;
  std::string plot;
};

int cmd_report(const ReportFlags& flags, std::ostream& out) {
  const auto report = load_report(flags.in);
  if (!flags.out.empty()) {
    const auto format =
        !flags.format.empty() ? flags.format : (std::filesystem::path(flags.out).extension() == ".json" ? "json" : "csv");
    emit_report(report, format, flags.out);
  } else if (!flags.format.empty()) {
    out << (flags.format == "json" ? report_to_json(report).dump(2) + "\n" : report_to_csv(report));
    return kExitOk;
  }
  if (!flags.plot.empty()) emit_plot_data(report, flags.plot);
  print_summary(report, out);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperband-family hyperparameter search with learning-curve predictors", "swiftband"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "swiftband 0.1.0");

  SyntheticSpec gen_spec;
  std::uint64_t gen_seed = 1;
  std::string gen_out = ".";
  std::string gen_name = "synthetic";
  auto* gen = app.add_subcommand("generate-data", "Write a synthetic learning-curve dataset");
  gen->add_option("--rows", gen_spec.rows, "Number of curves")->capture_default_str();
  gen->add_option("--epochs", gen_spec.target_epoch, "Target epoch T")->capture_default_str();
  gen->add_option("--hp-dim", gen_spec.hp_dim, "Hyperparameter dimensions")->capture_default_str();
  gen->add_option("--noise", gen_spec.noise_sigma, "Gaussian noise sigma")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Generator seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
  gen->add_option("--name", gen_name, "File name prefix")->capture_default_str();

  ExperimentFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Run a paired multi-run experiment in process");
  add_experiment_flags(sim, sim_flags);

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("predict-eval", "Held-out R^2 of a predictor on a dataset");
  eval->add_option("--dataset", eval_flags.dataset, "Dataset prefix or file")->required();
  eval->add_option("--fraction", eval_flags.fraction, "Observed share of the curve")->capture_default_str();
  eval->add_option("--predictor", eval_flags.predictor, "svr, qsvr or oracle")->capture_default_str();
  eval->add_option("--seed", eval_flags.seed, "Split seed")->capture_default_str();
  eval->add_option("--train-cap", eval_flags.train_cap, "Use at most this many training rows");

  CoordinatorFlags coord_flags;
  auto* coord = app.add_subcommand("coordinator", "Run an experiment over remote workers");
  add_experiment_flags(coord, coord_flags.experiment);
  coord->add_option("--bind", coord_flags.bind, "host:port (port 0 picks one)")->capture_default_str();
  coord->add_option("--workers", coord_flags.workers, "Workers to wait for")->capture_default_str();
  coord->add_option("--heartbeat-timeout-ms", coord_flags.heartbeat_timeout_ms)->capture_default_str();
  coord->add_option("--register-timeout-ms", coord_flags.register_timeout_ms)->capture_default_str();

  WorkerFlags worker_flags;
  auto* worker = app.add_subcommand("worker", "Serve training tasks for a coordinator");
  worker->add_option("--connect", worker_flags.connect, "Coordinator host:port")->capture_default_str();
  worker->add_option("--name", worker_flags.name, "Worker name");
  worker->add_option("--dataset", worker_flags.dataset, "Replay curves from this dataset");
  worker->add_flag("--synthetic", worker_flags.synthetic, "Evaluate the synthetic curve family");
  worker->add_option("--hp-dim", worker_flags.spec.hp_dim, "Synthetic hyperparameter dimensions");
  worker->add_option("--epochs", worker_flags.spec.target_epoch, "Synthetic target epoch");
  worker->add_option("--noise", worker_flags.spec.noise_sigma, "Synthetic noise sigma");
  worker->add_option("--synthetic-seed", worker_flags.synthetic_seed, "Synthetic noise seed");
  worker->add_option("--command", worker_flags.command, "Shell command printing one metric per epoch");
  worker->add_option("--heartbeat-ms", worker_flags.heartbeat_ms)->capture_default_str();
  worker->add_option("--retries", worker_flags.retries, "Connect attempts before giving up")->capture_default_str();
  worker->add_option("--retry-delay-ms", worker_flags.retry_delay_ms)->capture_default_str();
  worker->add_option("--fault-crash-after", worker_flags.crash_after, "Testing: drop the connection after N tasks");
  worker->add_option("--fault-stall-after", worker_flags.stall_after, "Testing: go silent after N tasks");

  ReportFlags report_flags;
  auto* rep = app.add_subcommand("report", "Summarize or convert a report file");
  rep->add_option("--in", report_flags.in, "report.csv or report.json")->required()->check(CLI::ExistingFile);
  rep->add_option("--format", report_flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  rep->add_option("--out", report_flags.out, "Write the converted report here");
  rep->add_option("--plot", report_flags.plot, "Write plot data here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_spec, gen_seed, gen_out, gen_name, out);
    if (*sim) return cmd_simulate(sim_flags, out);
    if (*eval) return cmd_predict_eval(eval_flags, out);
    if (*coord) return cmd_coordinator(coord_flags, out);
    if (*worker) return cmd_worker(worker_flags, out);
    if (*rep) return cmd_report(report_flags, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace swiftband::cli
