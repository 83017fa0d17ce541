#include "swiftband/runner.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstring>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "swiftband/error.hpp"

extern char** environ;

namespace swiftband {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

void check_request(const TrainRequest& r, int max_epoch) {
  if (r.from_epoch < 0 || r.to_epoch <= r.from_epoch)
    throw RunnerError(r.trial, "invalid epoch range [" + std::to_string(r.from_epoch) + ", " +
                                   std::to_string(r.to_epoch) + ")");
  if (max_epoch > 0 && r.to_epoch > max_epoch)
    throw RunnerError(r.trial, "epoch " + std::to_string(r.to_epoch) + " beyond the target epoch " +
                                   std::to_string(max_epoch));
}

}  // namespace

CurveSegment ReplayRunner::segment(const TrainRequest& r) const {
  check_request(r, dataset_->meta().target_epoch);
  if (!r.dataset_row || *r.dataset_row >= dataset_->size())
    throw RunnerError(r.trial, "replay request without a valid dataset row");
  const auto& curve = dataset_->row(*r.dataset_row).curve;
  return CurveSegment(curve.begin() + r.from_epoch, curve.begin() + r.to_epoch);
}

std::vector<CurveSegment> ReplayRunner::train(std::span<const TrainRequest> batch) {
  std::vector<CurveSegment> out;
  out.reserve(batch.size());
  for (const auto& r : batch) out.push_back(segment(r));
  return out;
}

double ReplayRunner::value_at(const Trial& trial, int epoch) const {
  if (!trial.dataset_row()) throw RunnerError(trial.id(), "no dataset row for ground-truth lookup");
  return dataset_->row(*trial.dataset_row()).curve.at(static_cast<std::size_t>(epoch - 1));
}

SyntheticRunner::SyntheticRunner(SearchSpace space, CurveFamily family, double noise_sigma, std::uint64_t seed,
                                 int max_epoch)
    : space_(std::move(space)), family_(family), noise_sigma_(noise_sigma), seed_(seed), max_epoch_(max_epoch) {}

double SyntheticRunner::value(const HyperparameterConfig& config, int epoch) const {
  const auto h = space_.normalize(config);
  double v = curve_shape(h, family_).at(epoch);
  if (noise_sigma_ > 0.0) {
    std::uint64_t key = fnv1a(&seed_, sizeof seed_, 0xCBF29CE484222325ULL);
    for (const auto& value : config.values) {
      if (const auto* label = std::get_if<std::string>(&value)) {
        key = fnv1a(label->data(), label->size(), key);
      } else {
        const double d = std::get<double>(value);
        key = fnv1a(&d, sizeof d, key);
      }
    }
    key = fnv1a(&epoch, sizeof epoch, key);
    const std::uint64_t a = splitmix64(key), b = splitmix64(a);
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    v += noise_sigma_ * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }
  return v;
}

std::vector<CurveSegment> SyntheticRunner::train(std::span<const TrainRequest> batch) {
  std::vector<CurveSegment> out;
  out.reserve(batch.size());
  for (const auto& r : batch) {
    check_request(r, max_epoch_);
    try {
      space_.validate(r.config);
    } catch (const DataError& e) {
      throw RunnerError(r.trial, e.what());
    }
    CurveSegment segment;
    for (int e = r.from_epoch + 1; e <= r.to_epoch; ++e) segment.push_back(value(r.config, e));
    out.push_back(std::move(segment));
  }
  return out;
}

double SyntheticRunner::value_at(const Trial& trial, int epoch) const { return value(trial.config(), epoch); }

CommandRunner::CommandRunner(std::string command, std::vector<std::string> hp_names)
    : command_(std::move(command)), hp_names_(std::move(hp_names)) {}

std::vector<CurveSegment> CommandRunner::train(std::span<const TrainRequest> batch) {
  std::vector<CurveSegment> out;
  out.reserve(batch.size());
  for (const auto& r : batch) out.push_back(run_one(r));
  return out;
}

CurveSegment CommandRunner::run_one(const TrainRequest& r) const {
  check_request(r, 0);
  std::vector<std::string> env;
  for (char** e = environ; *e != nullptr; ++e) env.emplace_back(*e);
  for (std::size_t i = 0; i < r.config.size(); ++i) {
    const auto text = format_value(r.config.values[i]);
    env.push_back("HP_" + std::to_string(i + 1) + "=" + text);
    if (i < hp_names_.size()) {
      std::string name = hp_names_[i];
      for (auto& c : name) c = std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::toupper(c)) : '_';
      env.push_back("HP_" + name + "=" + text);
    }
  }
  env.push_back("TRIAL_ID=" + std::to_string(r.trial));
  env.push_back("FROM_EPOCH=" + std::to_string(r.from_epoch));
  env.push_back("TO_EPOCH=" + std::to_string(r.to_epoch));
  std::vector<char*> envp;
  for (auto& s : env) envp.push_back(s.data());
  envp.push_back(nullptr);

  int fds[2];
  if (::pipe(fds) != 0) throw RunnerError(r.trial, std::string("pipe: ") + std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) {
    ::close(fds[0]);
    ::close(fds[1]);
    throw RunnerError(r.trial, std::string("fork: ") + std::strerror(errno));
  }
  if (pid == 0) {
    ::dup2(fds[1], STDOUT_FILENO);
    ::close(fds[0]);
    ::close(fds[1]);
    ::execle("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr), envp.data());
    ::_exit(127);
  }
  ::close(fds[1]);
  std::string output;
  char buf[4096];
  while (true) {
    const ssize_t got = ::read(fds[0], buf, sizeof buf);
    if (got > 0) {
      output.append(buf, static_cast<std::size_t>(got));
    } else if (got == 0 || errno != EINTR) {
      break;
    }
  }
  ::close(fds[0]);
  int status = 0;
  while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    throw RunnerError(r.trial, "training command failed with status " + std::to_string(status));

  CurveSegment segment;
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      std::size_t used = 0;
      segment.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      throw RunnerError(r.trial, "training command printed a non-numeric line: '" + line + "'");
    }
  }
  const auto expected = static_cast<std::size_t>(r.to_epoch - r.from_epoch);
  if (segment.size() != expected)
    throw RunnerError(r.trial, "training command printed " + std::to_string(segment.size()) + " values, expected " +
                                   std::to_string(expected));
  return segment;
}

DatasetSource::DatasetSource(const LearningCurveDataset& dataset, std::uint64_t seed, bool without_replacement)
    : dataset_(&dataset), drawer_(dataset, seed, without_replacement) {}

Trial DatasetSource::next(TrialId id) {
  const auto row = drawer_.draw();
  return Trial(id, dataset_->row(row).config, dataset_->meta().metric_name, dataset_->meta().direction, row);
}

SpaceSource::SpaceSource(SearchSpace space, std::string metric_name, Direction direction, std::uint64_t seed)
    : space_(std::move(space)), metric_name_(std::move(metric_name)), direction_(direction), rng_(seed) {}

Trial SpaceSource::next(TrialId id) { return Trial(id, sample_config(space_, rng_), metric_name_, direction_); }

void EpochLedger::add(TrialId trial, int from_epoch, int to_epoch) {
  if (from_epoch < 0 || to_epoch <= from_epoch)
    throw std::invalid_argument("EpochLedger: invalid range [" + std::to_string(from_epoch) + ", " +
                                std::to_string(to_epoch) + ")");
  total_ += to_epoch - from_epoch;
  per_trial_[trial] += to_epoch - from_epoch;
}

}  // namespace swiftband
