#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "swiftband/runner.hpp"

namespace swiftband {

struct WorkerOptions {
  std::string coordinator = "127.0.0.1:5555";
  std::string name = "worker";
  std::vector<std::string> capabilities;
  std::chrono::milliseconds heartbeat_interval{2000};
  /// Consecutive failed connects before giving up.
  int connect_attempts = 5;
  std::chrono::milliseconds retry_delay{500};
  /// Fault injection: once this many tasks are done, the next assignment
  /// is dropped and the connection closed without a reply.
  std::optional<int> crash_after_tasks;
  /// Fault injection: once this many tasks are done, the worker stops
  /// answering and heartbeating but keeps the connection open.
  std::optional<int> stall_after_tasks;
};

inline constexpr int kWorkerShutdown = 0;
inline constexpr int kWorkerUnreachable = 1;
inline constexpr int kWorkerInjectedFault = 3;

/// Serves tasks from a coordinator until it sends Shutdown (returns 0).
/// Lost connections are retried; returns 1 once `connect_attempts`
/// consecutive connects fail.
int run_worker(const WorkerOptions& options, TrialRunner& backing);

}  // namespace swiftband
