#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "swiftband/runner.hpp"

namespace swiftband {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = std::size_t{16} << 20;

/// How a worker should produce a task's curve. `row` is set for replay.
struct RunnerSpec {
  std::string kind = "config";
  std::optional<std::size_t> row;
  std::vector<std::string> hp_names;

  bool operator==(const RunnerSpec&) const = default;
};

struct Register {
  std::string worker_name;
  std::vector<std::string> capabilities;
  bool operator==(const Register&) const = default;
};

struct TaskAssign {
  std::uint64_t task_id = 0;
  TrialId trial_id = 0;
  HyperparameterConfig config;
  int from_epoch = 0;
  int to_epoch = 0;
  RunnerSpec runner_spec;
  bool operator==(const TaskAssign&) const = default;
};

struct TaskResult {
  std::uint64_t task_id = 0;
  TrialId trial_id = 0;
  CurveSegment curve_segment;
  double wall_time_ms = 0.0;
  bool operator==(const TaskResult&) const = default;
};

struct TaskError {
  std::uint64_t task_id = 0;
  std::string reason;
  bool operator==(const TaskError&) const = default;
};

struct Heartbeat {
  std::string worker_name;
  bool operator==(const Heartbeat&) const = default;
};

struct Shutdown {
  bool operator==(const Shutdown&) const = default;
};

using WireMessage = std::variant<Register, TaskAssign, TaskResult, TaskError, Heartbeat, Shutdown>;

std::string_view message_type(const WireMessage& message);

nlohmann::json message_to_json(const WireMessage& message);
/// Throws DecodeError naming the offending field.
WireMessage message_from_json(const nlohmann::json& body);

/// 4-byte big-endian body length followed by the UTF-8 JSON body.
std::string encode_message(const WireMessage& message);
/// Decodes one complete frame. Throws DecodeError.
WireMessage decode_message(std::string_view frame);

/// "host:port"; throws ConfigError.
std::pair<std::string, int> parse_endpoint(std::string_view endpoint);

/// A connected TCP stream carrying frames. send() may be called from several
/// threads; receive() from one.
class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  ~Connection();
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  /// Throws std::system_error when the peer is gone.
  void send(const WireMessage& message);
  /// nullopt on a clean close between frames. Throws DecodeError on a bad
  /// frame and std::system_error on socket errors.
  std::optional<WireMessage> receive();
  /// Wakes a blocked receive(); idempotent.
  void close();

 private:
  bool read_exact(char* data, std::size_t size, bool allow_eof);

  int fd_;
  std::mutex send_mutex_;
  std::once_flag closed_;
};

/// Listening socket; port 0 picks an ephemeral port.
class Listener {
 public:
  explicit Listener(std::string_view endpoint);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  int port() const { return port_; }
  /// nullopt once close() was called.
  std::optional<int> accept();
  void close();

 private:
  int fd_;
  int port_ = 0;
  std::once_flag closed_;
};

/// Throws std::system_error.
int connect_tcp(std::string_view endpoint);

}  // namespace swiftband
