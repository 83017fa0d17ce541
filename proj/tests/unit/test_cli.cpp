#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "support/fixtures.hpp"
#include "swiftband/evaluation.hpp"
#include "swiftband/report.hpp"

using namespace swiftband;
using swiftband::testing::TempDir;

namespace {

struct Invocation {
  int code = -1;
  std::string out;
  std::string err;
};

Invocation invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "swiftband");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Invocation result;
  result.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  result.out = out.str();
  result.err = err.str();
  return result;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Writes a 200-row, 81-epoch dataset under dir/d and returns the prefix.
std::string generate(const TempDir& dir, const std::string& extra_rows = "200") {
  const auto r = invoke({"generate-data", "--rows", extra_rows, "--seed", "1", "--out", dir.path().string(), "--name",
                         "d"});
  REQUIRE(r.code == cli::kExitOk);
  return (dir / "d").string();
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(invoke({}).code == cli::kExitUsage);
  CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--runs"}).code == cli::kExitUsage);
  CHECK(invoke({"predict-eval"}).code == cli::kExitUsage);
  CHECK(invoke({"report", "--in", "/nonexistent/report.csv"}).code == cli::kExitUsage);
  const auto help = invoke({"--help"});
  CHECK(help.code == cli::kExitOk);
  CHECK(help.out.find("simulate") != std::string::npos);
  CHECK(invoke({"--version"}).code == cli::kExitOk);
}

TEST_CASE("generate-data writes a loadable dataset") {
  TempDir dir;
  const auto r = invoke({"generate-data", "--rows", "30", "--epochs", "27", "--hp-dim", "2", "--noise", "0", "--seed",
                         "5", "--out", (dir / "sub").string(), "--name", "tiny"});
  REQUIRE(r.code == cli::kExitOk);
  const auto ds = load_dataset(dir / "sub" / "tiny");
  CHECK(ds.size() == 30);
  CHECK(ds.meta().target_epoch == 27);
  CHECK(ds.meta().hp_dim == 2);

  SyntheticSpec spec;
  spec.rows = 30;
  spec.target_epoch = 27;
  spec.hp_dim = 2;
  spec.noise_sigma = 0.0;
  std::mt19937_64 rng(5);
  const auto direct = generate_synthetic(spec, rng);
  for (std::size_t i = 0; i < ds.size(); ++i) CHECK(ds.row(i).curve == direct.row(i).curve);

  CHECK(invoke({"generate-data", "--rows", "0", "--out", dir.path().string()}).code == cli::kExitUsage);
  CHECK(invoke({"generate-data", "--noise", "-1", "--out", dir.path().string()}).code == cli::kExitUsage);
}

TEST_CASE("simulate writes reproducible reports") {
  TempDir dir;
  const auto prefix = generate(dir);
  const auto args = [&](const std::string& out) {
    return std::vector<std::string>{"simulate", "--dataset", prefix, "--algorithms", "hyperband,swift_svr", "--runs",
                                    "2", "--seed", "3", "--no-wall-time", "--out", out};
  };
  const auto first = invoke(args((dir / "a").string()));
  REQUIRE(first.code == cli::kExitOk);
  CHECK(first.out.find("swift_svr") != std::string::npos);
  REQUIRE(invoke(args((dir / "b").string())).code == cli::kExitOk);
  for (const auto* name : {"report.csv", "report.json", "plotdata.csv"}) {
    CAPTURE(name);
    CHECK_FALSE(slurp(dir / "a" / name).empty());
    CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
  }
  const auto report = load_report(dir / "a" / "report.csv");
  REQUIRE(report.runs.size() == 4);
  CHECK(report.runs[0].seed == 3);
  CHECK(report.runs[1].seed == 4);
  CHECK(report.runs[0].epochs == 1581);
  CHECK(report.runs[0].wall_time_ms == 0.0);
}

TEST_CASE("simulate honours config files and flag overrides") {
  TempDir dir;
  const auto prefix = generate(dir);
  std::ofstream(dir / "cfg.json") << nlohmann::json{{"dataset", {{"path", prefix}}},
                                                    {"algorithms", {"threshold_search"}},
                                                    {"runs", 5},
                                                    {"record_wall_time", false},
                                                    {"output_dir", (dir / "from-config").string()}}
                                         .dump();
  const auto r = invoke({"simulate", "--config", (dir / "cfg.json").string(), "--runs", "1"});
  REQUIRE(r.code == cli::kExitOk);
  const auto report = load_report(dir / "from-config" / "report.json");
  REQUIRE(report.runs.size() == 1);
  CHECK(report.runs[0].algorithm == "threshold_search");

  std::ofstream(dir / "bad.json") << R"({"dataset": {"path": "x"}, "runz": 1})";
  CHECK(invoke({"simulate", "--config", (dir / "bad.json").string()}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--dataset", prefix, "--algorithms", "bohb"}).code == cli::kExitUsage);
  CHECK(invoke({"simulate", "--dataset", prefix, "--runs", "0"}).code == cli::kExitUsage);

  const auto missing = invoke({"simulate", "--dataset", (dir / "nope").string(), "--out", (dir / "x").string()});
  CHECK(missing.code == cli::kExitRuntime);
  CHECK(missing.err.find("error:") == 0);
}

TEST_CASE("simulate fails cleanly on a too-small dataset") {
  TempDir dir;
  const auto prefix = generate(dir, "50");
  const auto r = invoke({"simulate", "--dataset", prefix, "--algorithms", "hyperband", "--runs", "1", "--out",
                         (dir / "o").string()});
  CHECK(r.code == cli::kExitRuntime);
  CHECK(r.err.find("143") != std::string::npos);
}

TEST_CASE("predict-eval reports the held-out fit") {
  TempDir dir;
  const auto prefix = generate(dir);
  const auto r = invoke({"predict-eval", "--dataset", prefix, "--seed", "2"});
  REQUIRE(r.code == cli::kExitOk);
  const auto pos = r.out.find("r2=");
  REQUIRE(pos != std::string::npos);
  const double printed = std::stod(r.out.substr(pos + 3));

  PredictorEvalOptions options;
  options.split_seed = 2;
  const auto direct = evaluate_predictor(load_dataset(prefix), options);
  CHECK(printed == doctest::Approx(direct.r2).epsilon(1e-5));
  CHECK(r.out.find("observe_epoch=" + std::to_string(direct.observe_epoch)) != std::string::npos);

  CHECK(invoke({"predict-eval", "--dataset", prefix, "--fraction", "1"}).code == cli::kExitUsage);
  CHECK(invoke({"predict-eval", "--dataset", prefix, "--predictor", "gp"}).code == cli::kExitUsage);
  CHECK(invoke({"predict-eval", "--dataset", (dir / "nope").string()}).code == cli::kExitRuntime);
}

TEST_CASE("report converts between formats and emits plot data") {
  TempDir dir;
  const auto prefix = generate(dir);
  REQUIRE(invoke({"simulate", "--dataset", prefix, "--algorithms", "hyperband", "--runs", "2", "--no-wall-time",
                  "--out", (dir / "run").string()})
              .code == cli::kExitOk);
  const auto original = load_report(dir / "run" / "report.csv");

  const auto printed = invoke({"report", "--in", (dir / "run" / "report.csv").string(), "--format", "json"});
  REQUIRE(printed.code == cli::kExitOk);
  CHECK(report_from_json(nlohmann::json::parse(printed.out)) == original);

  const auto converted = invoke({"report", "--in", (dir / "run" / "report.csv").string(), "--out",
                                 (dir / "conv.json").string(), "--plot", (dir / "plot.csv").string()});
  REQUIRE(converted.code == cli::kExitOk);
  CHECK(converted.out.find("hyperband") != std::string::npos);
  CHECK(load_report(dir / "conv.json") == original);
  CHECK(slurp(dir / "plot.csv") == slurp(dir / "run" / "plotdata.csv"));

  CHECK(invoke({"report", "--in", (dir / "run" / "report.csv").string(), "--format", "xml"}).code == cli::kExitUsage);
  std::ofstream(dir / "junk.csv") << "not,a,report\n";
  CHECK(invoke({"report", "--in", (dir / "junk.csv").string()}).code == cli::kExitRuntime);
}

TEST_CASE("worker exit codes") {
  TempDir dir;
  const auto prefix = generate(dir, "20");
  const auto unreachable = invoke({"worker", "--connect", "127.0.0.1:1", "--dataset", prefix, "--retries", "2",
                                   "--retry-delay-ms", "10"});
  CHECK(unreachable.code == 1);
  CHECK(invoke({"worker", "--connect", "127.0.0.1:1"}).code == cli::kExitUsage);
  CHECK(invoke({"worker", "--dataset", prefix, "--synthetic"}).code == cli::kExitUsage);
  CHECK(invoke({"coordinator", "--dataset", prefix, "--workers", "0"}).code == cli::kExitUsage);
}
