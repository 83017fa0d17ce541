#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "swiftband/runner.hpp"
#include "swiftband/wire.hpp"

namespace swiftband {

struct CoordinatorOptions {
  std::string bind = "127.0.0.1:0";
  int expected_workers = 1;
  std::chrono::milliseconds heartbeat_timeout{10000};
  /// How long to wait for the expected workers to register.
  std::chrono::milliseconds register_timeout{60000};
  /// "replay" sends each task's dataset row; "config" only the config.
  std::string runner_kind = "replay";
  std::vector<std::string> hp_names;
};

struct CoordinatorStats {
  std::uint64_t tasks_assigned = 0;
  std::uint64_t tasks_reassigned = 0;
  std::uint64_t duplicates_discarded = 0;
  std::size_t workers_lost = 0;
  /// Accepted results per task id; every entry is exactly 1.
  std::map<std::uint64_t, int> accepted;
};

/// Serves training batches to remote workers. All scheduler decisions stay
/// with the caller of train(); one reader thread per worker only forwards
/// messages into an ordered event queue.
class Coordinator : public TrialRunner {
 public:
  explicit Coordinator(CoordinatorOptions options);
  ~Coordinator() override;

  int port() const { return listener_.port(); }

  /// Blocks until `expected_workers` have registered. Throws Error on timeout.
  void wait_for_workers();

  /// Dispatches tasks to idle workers, lowest trial id first, and returns
  /// once every task has exactly one accepted result. A lost worker's task
  /// goes back to the queue. Throws Error when every worker is lost and
  /// RunnerError when a worker reports a task failure.
  std::vector<CurveSegment> train(std::span<const TrainRequest> batch) override;

  /// Sends Shutdown to every live worker and joins all threads.
  void shutdown();

  const CoordinatorStats& stats() const { return stats_; }
  std::size_t live_workers() const;

 private:
  struct Event {
    enum class Kind { connected, message, disconnected } kind;
    std::size_t worker = 0;
    std::optional<WireMessage> message;
  };

  enum class WorkerState { unregistered, idle, busy, lost };

  struct Worker {
    std::string name;
    std::shared_ptr<Connection> connection;
    WorkerState state = WorkerState::unregistered;
    std::optional<std::uint64_t> task;
    std::chrono::steady_clock::time_point last_seen;
  };

  void accept_loop();
  void read_loop(std::size_t worker, std::shared_ptr<Connection> connection);
  void push(Event event);
  std::optional<Event> pop(std::chrono::milliseconds timeout);
  /// Applies bookkeeping common to every event; returns the message if any.
  void handle_presence(const Event& event);
  void mark_lost(std::size_t worker);
  void expire_silent_workers();

  CoordinatorOptions options_;
  Listener listener_;
  std::thread acceptor_;

  mutable std::mutex mutex_;  // guards events_, readers_, pending_connections_
  std::condition_variable ready_;
  std::deque<Event> events_;
  std::vector<std::shared_ptr<Connection>> pending_connections_;
  std::vector<std::thread> readers_;

  struct Batch {
    std::uint64_t first_task = 0;
    std::vector<TaskAssign> tasks;
    std::vector<std::optional<CurveSegment>> results;
    std::size_t remaining = 0;
    /// (trial id, task index) awaiting a worker.
    std::set<std::pair<TrialId, std::size_t>> pending;
  };

  std::optional<std::size_t> batch_index(std::uint64_t task) const;
  void dispatch();
  void handle_result(std::size_t worker, const TaskResult& result);

  // Owned by the decision thread.
  std::vector<Worker> workers_;
  std::uint64_t next_task_ = 0;
  Batch batch_;
  CoordinatorStats stats_;
  bool stopped_ = false;
};

}  // namespace swiftband
