#include "swiftband/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "swiftband/error.hpp"

namespace swiftband {

using nlohmann::json;

namespace {

constexpr std::string_view kRunHeader =
    "algorithm,run,seed,best_trial,best_metric,epochs,wall_time_ms,predictor_terminations";
constexpr std::string_view kSummaryHeader =
    "algorithm,metric_name,direction,runs,mean_best_metric,best_best_metric,worst_best_metric,mean_epochs,"
    "min_epochs,max_epochs";

std::string fmt(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

template <typename T>
T parse_number(const std::string& text, std::string_view column, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw DataError("line " + std::to_string(line) + ": bad " + std::string(column) + " '" + text + "'");
  return value;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

AlgorithmSummary summarize(const std::vector<RunRecord>& runs, const std::string& algorithm, Direction direction) {
  AlgorithmSummary s;
  s.algorithm = algorithm;
  double metric_sum = 0.0;
  double epoch_sum = 0.0;
  for (const auto& r : runs) {
    if (r.algorithm != algorithm) continue;
    if (s.runs == 0) {
      s.best_best_metric = s.worst_best_metric = r.best_metric;
      s.min_epochs = s.max_epochs = r.epochs;
    } else {
      if (is_better(r.best_metric, s.best_best_metric, direction)) s.best_best_metric = r.best_metric;
      if (is_better(s.worst_best_metric, r.best_metric, direction)) s.worst_best_metric = r.best_metric;
      s.min_epochs = std::min(s.min_epochs, r.epochs);
      s.max_epochs = std::max(s.max_epochs, r.epochs);
    }
    metric_sum += r.best_metric;
    epoch_sum += static_cast<double>(r.epochs);
    ++s.runs;
  }
  if (s.runs > 0) {
    s.mean_best_metric = metric_sum / s.runs;
    s.mean_epochs = epoch_sum / s.runs;
  }
  return s;
}

void summarize_all(ExperimentReport& report) {
  report.summaries.clear();
  std::vector<std::string> seen;
  for (const auto& r : report.runs)
    if (std::find(seen.begin(), seen.end(), r.algorithm) == seen.end()) seen.push_back(r.algorithm);
  for (const auto& name : seen) report.summaries.push_back(summarize(report.runs, name, report.direction));
}

json report_to_json(const ExperimentReport& report) {
  auto algorithms = json::array();
  for (const auto& s : report.summaries) {
    auto runs = json::array();
    for (const auto& r : report.runs) {
      if (r.algorithm != s.algorithm) continue;
      runs.push_back({{"run", r.run},
                      {"seed", r.seed},
                      {"best_trial", r.best_trial},
                      {"best_metric", r.best_metric},
                      {"epochs", r.epochs},
                      {"wall_time_ms", r.wall_time_ms},
                      {"predictor_terminations", r.predictor_terminations}});
    }
    algorithms.push_back({{"name", s.algorithm},
                          {"runs", runs},
                          {"summary",
                           {{"runs", s.runs},
                            {"mean_best_metric", s.mean_best_metric},
                            {"best_best_metric", s.best_best_metric},
                            {"worst_best_metric", s.worst_best_metric},
                            {"mean_epochs", s.mean_epochs},
                            {"min_epochs", s.min_epochs},
                            {"max_epochs", s.max_epochs}}}});
  }
  return {{"metric_name", report.metric_name},
          {"direction", to_string(report.direction)},
          {"algorithms", algorithms}};
}

ExperimentReport report_from_json(const json& body) {
  ExperimentReport report;
  try {
    report.metric_name = body.at("metric_name").get<std::string>();
    report.direction = direction_from_string(body.at("direction").get<std::string>());
    for (const auto& a : body.at("algorithms")) {
      const auto name = a.at("name").get<std::string>();
      for (const auto& r : a.at("runs")) {
        RunRecord record;
        record.algorithm = name;
        record.run = r.at("run").get<int>();
        record.seed = r.at("seed").get<std::uint64_t>();
        record.best_trial = r.at("best_trial").get<TrialId>();
        record.best_metric = r.at("best_metric").get<double>();
        record.epochs = r.at("epochs").get<long>();
        record.wall_time_ms = r.at("wall_time_ms").get<double>();
        record.predictor_terminations = r.at("predictor_terminations").get<std::size_t>();
        report.runs.push_back(record);
      }
      const auto& s = a.at("summary");
      AlgorithmSummary summary;
      summary.algorithm = name;
      summary.runs = s.at("runs").get<int>();
      summary.mean_best_metric = s.at("mean_best_metric").get<double>();
      summary.best_best_metric = s.at("best_best_metric").get<double>();
      summary.worst_best_metric = s.at("worst_best_metric").get<double>();
      summary.mean_epochs = s.at("mean_epochs").get<double>();
      summary.min_epochs = s.at("min_epochs").get<long>();
      summary.max_epochs = s.at("max_epochs").get<long>();
      report.summaries.push_back(summary);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("report JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("report JSON: ") + e.what());
  }
  return report;
}

std::string report_to_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << kRunHeader << '\n';
  for (const auto& r : report.runs)
    out << r.algorithm << ',' << r.run << ',' << r.seed << ',' << r.best_trial << ',' << fmt(r.best_metric) << ','
        << r.epochs << ',' << fmt(r.wall_time_ms) << ',' << r.predictor_terminations << '\n';
  out << '\n' << kSummaryHeader << '\n';
  for (const auto& s : report.summaries)
    out << s.algorithm << ',' << report.metric_name << ',' << to_string(report.direction) << ',' << s.runs << ','
        << fmt(s.mean_best_metric) << ',' << fmt(s.best_best_metric) << ',' << fmt(s.worst_best_metric) << ','
        << fmt(s.mean_epochs) << ',' << s.min_epochs << ',' << s.max_epochs << '\n';
  return out.str();
}

ExperimentReport report_from_csv(const std::string& text) {
  ExperimentReport report;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 1;
  if (!std::getline(in, line) || line != kRunHeader) throw DataError("line 1: expected the run header");
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) break;
    const auto c = split(line);
    if (c.size() != 8) throw DataError("line " + std::to_string(number) + ": expected 8 columns");
    RunRecord r;
    r.algorithm = c[0];
    r.run = parse_number<int>(c[1], "run", number);
    r.seed = parse_number<std::uint64_t>(c[2], "seed", number);
    r.best_trial = parse_number<TrialId>(c[3], "best_trial", number);
    r.best_metric = parse_number<double>(c[4], "best_metric", number);
    r.epochs = parse_number<long>(c[5], "epochs", number);
    r.wall_time_ms = parse_number<double>(c[6], "wall_time_ms", number);
    r.predictor_terminations = parse_number<std::size_t>(c[7], "predictor_terminations", number);
    report.runs.push_back(r);
  }
  ++number;
  if (!std::getline(in, line) || line != kSummaryHeader)
    throw DataError("line " + std::to_string(number) + ": expected the summary header");
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto c = split(line);
    if (c.size() != 10) throw DataError("line " + std::to_string(number) + ": expected 10 columns");
    AlgorithmSummary s;
    s.algorithm = c[0];
    report.metric_name = c[1];
    try {
      report.direction = direction_from_string(c[2]);
    } catch (const std::exception& e) {
      throw DataError("line " + std::to_string(number) + ": " + e.what());
    }
    s.runs = parse_number<int>(c[3], "runs", number);
    s.mean_best_metric = parse_number<double>(c[4], "mean_best_metric", number);
    s.best_best_metric = parse_number<double>(c[5], "best_best_metric", number);
    s.worst_best_metric = parse_number<double>(c[6], "worst_best_metric", number);
    s.mean_epochs = parse_number<double>(c[7], "mean_epochs", number);
    s.min_epochs = parse_number<long>(c[8], "min_epochs", number);
    s.max_epochs = parse_number<long>(c[9], "max_epochs", number);
    report.summaries.push_back(s);
  }
  return report;
}

std::string plot_data_csv(const ExperimentReport& report) {
  std::ostringstream out;
  out << "algorithm,run,epochs,best_metric\n";
  for (const auto& r : report.runs) out << r.algorithm << ',' << r.run << ',' << r.epochs << ',' << fmt(r.best_metric) << '\n';
  out << "\nalgorithm,mean_epochs,min_epochs,max_epochs,avg_best_metric,best_best_metric,worst_best_metric\n";
  for (const auto& s : report.summaries)
    out << s.algorithm << ',' << fmt(s.mean_epochs) << ',' << s.min_epochs << ',' << s.max_epochs << ','
        << fmt(s.mean_best_metric) << ',' << fmt(s.best_best_metric) << ',' << fmt(s.worst_best_metric) << '\n';
  return out.str();
}

void emit_report(const ExperimentReport& report, const std::string& format, const std::filesystem::path& path) {
  if (report.runs.empty()) throw Error("refusing to write an empty report");
  if (format == "csv") {
    write_file(path, report_to_csv(report));
  } else if (format == "json") {
    write_file(path, report_to_json(report).dump(2) + "\n");
  } else {
    throw ConfigError("unknown report format '" + format + "'");
  }
}

void emit_plot_data(const ExperimentReport& report, const std::filesystem::path& path) {
  if (report.runs.empty()) throw Error("refusing to write empty plot data");
  write_file(path, plot_data_csv(report));
}

ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  if (path.extension() == ".json") {
    auto body = json::parse(buffer.str(), nullptr, false);
    if (body.is_discarded()) throw DataError(path.string() + " is not valid JSON");
    return report_from_json(body);
  }
  return report_from_csv(buffer.str());
}

}  // namespace swiftband
