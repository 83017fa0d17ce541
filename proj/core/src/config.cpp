#include "swiftband/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>

#include "swiftband/error.hpp"

namespace swiftband {

using nlohmann::json;

namespace {

constexpr std::pair<Algorithm, std::string_view> kAlgorithmNames[] = {
    {Algorithm::hyperband, "hyperband"},   {Algorithm::fast, "fast"},
    {Algorithm::swift_svr, "swift_svr"},   {Algorithm::swift_qsvr, "swift_qsvr"},
    {Algorithm::threshold_search, "threshold_search"}};

void check_keys(const json& block, std::initializer_list<std::string_view> allowed, std::string_view where) {
  if (!block.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, value] : block.items())
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ConfigError("unknown key '" + key + "' in " + std::string(where));
}

template <typename T>
void read(const json& block, const char* key, T& out, std::string_view where) {
  auto it = block.find(key);
  if (it == block.end()) return;
  try {
    if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!it->is_number_integer()) throw ConfigError("");
      if constexpr (std::is_unsigned_v<T>) {
        if (it->template get<std::int64_t>() < 0) throw ConfigError("");
      }
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) throw ConfigError("");
    }
    out = it->template get<T>();
  } catch (const std::exception&) {
    throw ConfigError(std::string(where) + "." + key + " has the wrong type");
  }
}

template <typename T>
void read_optional(const json& block, const char* key, std::optional<T>& out, std::string_view where) {
  auto it = block.find(key);
  if (it == block.end()) return;
  if (it->is_null()) {
    out.reset();
    return;
  }
  T value{};
  read(block, key, value, where);
  out = value;
}

void apply_svr(const json& block, SvrParams& p) {
  constexpr std::string_view where = "predictor.svr";
  check_keys(block, {"C", "epsilon", "gamma", "tolerance", "max_iterations"}, where);
  read(block, "C", p.C, where);
  read(block, "epsilon", p.epsilon, where);
  read_optional(block, "gamma", p.gamma, where);
  read(block, "tolerance", p.tolerance, where);
  read(block, "max_iterations", p.max_iterations, where);
}

void apply_qsvr(const json& block, QsvrParams& p) {
  constexpr std::string_view where = "predictor.qsvr";
  check_keys(block, {"bits", "sample_cap", "C", "penalty", "sweeps", "restarts", "t_start", "t_end"}, where);
  read(block, "bits", p.bits, where);
  read(block, "sample_cap", p.sample_cap, where);
  read(block, "C", p.C, where);
  read_optional(block, "penalty", p.penalty, where);
  read(block, "sweeps", p.schedule.sweeps, where);
  read(block, "restarts", p.schedule.restarts, where);
  read(block, "t_start", p.schedule.t_start, where);
  read(block, "t_end", p.schedule.t_end, where);
}

void apply_predictor(const json& block, PredictorSettings& p) {
  constexpr std::string_view where = "predictor";
  check_keys(block, {"kind", "min_samples", "retrain_growth", "predict_delta", "svr", "qsvr"}, where);
  if (block.contains("kind")) {
    std::string kind;
    read(block, "kind", kind, where);
    try {
      p.kind = predictor_kind_from_string(kind);
    } catch (const std::exception& e) {
      throw ConfigError(e.what());
    }
  }
  read(block, "min_samples", p.min_samples, where);
  read(block, "retrain_growth", p.retrain_growth, where);
  read(block, "predict_delta", p.predict_delta, where);
  if (block.contains("svr")) apply_svr(block["svr"], p.svr);
  if (block.contains("qsvr")) apply_qsvr(block["qsvr"], p.qsvr);
}

PredictorKind default_predictor(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::hyperband: return PredictorKind::disabled;
    case Algorithm::swift_qsvr: return PredictorKind::qsvr;
    default: return PredictorKind::svr;
  }
}

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  for (const auto& [a, name] : kAlgorithmNames)
    if (a == algorithm) return name;
  return "?";
}

Algorithm algorithm_from_string(std::string_view text) {
  for (const auto& [a, name] : kAlgorithmNames)
    if (name == text) return a;
  throw ConfigError("unknown algorithm '" + std::string(text) +
                    "' (expected hyperband, fast, swift_svr, swift_qsvr or threshold_search)");
}

const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::hyperband, Algorithm::fast, Algorithm::swift_svr,
                                          Algorithm::swift_qsvr, Algorithm::threshold_search};
  return all;
}

void apply_scheduler_json(const json& block, SchedulerConfig& cfg) {
  constexpr std::string_view where = "scheduler";
  check_keys(block,
             {"max_epochs", "eta", "decision_fraction", "pathfinder_min", "threshold_quantile", "predictor",
              "fast_termination_prob", "baseline_full", "baseline_total", "observe_fraction"},
             where);
  read(block, "max_epochs", cfg.max_epochs, where);
  read(block, "eta", cfg.eta, where);
  read(block, "decision_fraction", cfg.decision_fraction, where);
  read(block, "pathfinder_min", cfg.pathfinder_min, where);
  read(block, "threshold_quantile", cfg.threshold_quantile, where);
  read(block, "fast_termination_prob", cfg.fast_termination_prob, where);
  read(block, "baseline_full", cfg.baseline_full, where);
  read(block, "baseline_total", cfg.baseline_total, where);
  read(block, "observe_fraction", cfg.observe_fraction, where);
  if (block.contains("predictor")) apply_predictor(block["predictor"], cfg.predictor);
}

json scheduler_config_to_json(const SchedulerConfig& cfg) {
  const auto& p = cfg.predictor;
  json svr{{"C", p.svr.C}, {"epsilon", p.svr.epsilon}, {"tolerance", p.svr.tolerance},
           {"max_iterations", p.svr.max_iterations}};
  svr["gamma"] = p.svr.gamma ? json(*p.svr.gamma) : json(nullptr);
  json qsvr{{"bits", p.qsvr.bits},
            {"sample_cap", p.qsvr.sample_cap},
            {"C", p.qsvr.C},
            {"sweeps", p.qsvr.schedule.sweeps},
            {"restarts", p.qsvr.schedule.restarts},
            {"t_start", p.qsvr.schedule.t_start},
            {"t_end", p.qsvr.schedule.t_end}};
  qsvr["penalty"] = p.qsvr.penalty ? json(*p.qsvr.penalty) : json(nullptr);
  return {{"max_epochs", cfg.max_epochs},
          {"eta", cfg.eta},
          {"decision_fraction", cfg.decision_fraction},
          {"pathfinder_min", cfg.pathfinder_min},
          {"threshold_quantile", cfg.threshold_quantile},
          {"fast_termination_prob", cfg.fast_termination_prob},
          {"baseline_full", cfg.baseline_full},
          {"baseline_total", cfg.baseline_total},
          {"observe_fraction", cfg.observe_fraction},
          {"predictor",
           {{"kind", to_string(p.kind)},
            {"min_samples", p.min_samples},
            {"retrain_growth", p.retrain_growth},
            {"predict_delta", p.predict_delta},
            {"svr", svr},
            {"qsvr", qsvr}}}};
}

SchedulerConfig ExperimentConfig::scheduler_for(Algorithm algorithm, int default_max_epochs,
                                                std::uint64_t seed) const {
  SchedulerConfig cfg;
  cfg.max_epochs = default_max_epochs;
  cfg.predictor.kind = default_predictor(algorithm);
  apply_scheduler_json(scheduler, cfg);
  if (auto it = overrides.find(algorithm); it != overrides.end()) apply_scheduler_json(it->second, cfg);
  if (algorithm == Algorithm::hyperband) cfg.predictor.kind = PredictorKind::disabled;
  cfg.seed = seed;
  return cfg;
}

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
  if (!dataset && !space) throw ConfigError("config needs a dataset or a space");
  if (dataset) {
    if (dataset->path.has_value() == dataset->synthetic.has_value())
      throw ConfigError("dataset needs exactly one of 'path' or 'synthetic'");
    if (dataset->synthetic) dataset->synthetic->validate();
  }
  if (space) {
    try {
      (void)SearchSpace(space->dims);
    } catch (const DataError& e) {
      throw ConfigError(std::string("space: ") + e.what());
    }
  }
  const int R = dataset && dataset->synthetic ? dataset->synthetic->target_epoch : 81;
  for (auto algorithm : algorithms) {
    const auto cfg = scheduler_for(algorithm, R, base_seed);
    cfg.validate();
    if (algorithm == Algorithm::fast && cfg.predictor.kind == PredictorKind::qsvr)
      throw ConfigError("fast cannot use the qsvr predictor");
  }
}

ExperimentConfig experiment_config_from_json(const json& body) {
  check_keys(body,
             {"dataset", "space", "algorithms", "runs", "base_seed", "scheduler", "overrides", "output_dir",
              "record_wall_time"},
             "config");
  ExperimentConfig cfg;
  if (body.contains("dataset")) {
    const auto& d = body["dataset"];
    check_keys(d, {"path", "synthetic", "seed"}, "dataset");
    DatasetSpec spec;
    if (d.contains("path")) {
      std::string path;
      read(d, "path", path, "dataset");
      spec.path = path;
    }
    if (d.contains("synthetic")) {
      const auto& s = d["synthetic"];
      check_keys(s, {"rows", "target_epoch", "hp_dim", "noise_sigma"}, "dataset.synthetic");
      SyntheticSpec synthetic;
      read(s, "rows", synthetic.rows, "dataset.synthetic");
      read(s, "target_epoch", synthetic.target_epoch, "dataset.synthetic");
      read(s, "hp_dim", synthetic.hp_dim, "dataset.synthetic");
      read(s, "noise_sigma", synthetic.noise_sigma, "dataset.synthetic");
      spec.synthetic = synthetic;
    }
    read(d, "seed", spec.seed, "dataset");
    cfg.dataset = spec;
  }
  if (body.contains("space")) {
    const auto& s = body["space"];
    check_keys(s, {"dims", "metric_name", "direction"}, "space");
    SpaceSpec space;
    try {
      space.dims = s.at("dims").get<std::vector<HpDim>>();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("space.dims: ") + e.what());
    }
    read(s, "metric_name", space.metric_name, "space");
    if (s.contains("direction")) {
      std::string direction;
      read(s, "direction", direction, "space");
      try {
        space.direction = direction_from_string(direction);
      } catch (const std::exception& e) {
        throw ConfigError(e.what());
      }
    }
    cfg.space = space;
  }
  if (body.contains("algorithms")) {
    std::vector<std::string> names;
    read(body, "algorithms", names, "config");
    cfg.algorithms.clear();
    for (const auto& name : names) cfg.algorithms.push_back(algorithm_from_string(name));
  }
  read(body, "runs", cfg.runs, "config");
  read(body, "base_seed", cfg.base_seed, "config");
  if (body.contains("scheduler")) {
    SchedulerConfig probe;
    apply_scheduler_json(body["scheduler"], probe);
    cfg.scheduler = body["scheduler"];
  }
  if (body.contains("overrides")) {
    const auto& o = body["overrides"];
    if (!o.is_object()) throw ConfigError("overrides must be a JSON object");
    for (const auto& [name, block] : o.items()) {
      SchedulerConfig probe;
      apply_scheduler_json(block, probe);
      cfg.overrides[algorithm_from_string(name)] = block;
    }
  }
  if (body.contains("output_dir")) {
    std::string dir;
    read(body, "output_dir", dir, "config");
    cfg.output_dir = dir;
  }
  read(body, "record_wall_time", cfg.record_wall_time, "config");
  cfg.validate();
  return cfg;
}

json experiment_config_to_json(const ExperimentConfig& cfg) {
  json out;
  if (cfg.dataset) {
    json d{{"seed", cfg.dataset->seed}};
    if (cfg.dataset->path) d["path"] = cfg.dataset->path->string();
    if (const auto& s = cfg.dataset->synthetic)
      d["synthetic"] = {{"rows", s->rows},
                        {"target_epoch", s->target_epoch},
                        {"hp_dim", s->hp_dim},
                        {"noise_sigma", s->noise_sigma}};
    out["dataset"] = d;
  }
  if (cfg.space)
    out["space"] = {{"dims", cfg.space->dims},
                    {"metric_name", cfg.space->metric_name},
                    {"direction", to_string(cfg.space->direction)}};
  auto names = json::array();
  for (auto a : cfg.algorithms) names.push_back(to_string(a));
  out["algorithms"] = names;
  out["runs"] = cfg.runs;
  out["base_seed"] = cfg.base_seed;
  out["scheduler"] = cfg.scheduler;
  json overrides = json::object();
  for (const auto& [a, block] : cfg.overrides) overrides[std::string(to_string(a))] = block;
  out["overrides"] = overrides;
  out["output_dir"] = cfg.output_dir.string();
  out["record_wall_time"] = cfg.record_wall_time;
  return out;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  json body = json::parse(in, nullptr, false);
  if (body.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  return experiment_config_from_json(body);
}

}  // namespace swiftband
