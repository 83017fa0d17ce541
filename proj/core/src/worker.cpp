#include "swiftband/worker.hpp"

#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "swiftband/wire.hpp"

namespace swiftband {

namespace {

class HeartbeatThread {
 public:
  HeartbeatThread(Connection& connection, std::string name, std::chrono::milliseconds interval)
      : thread_([this, &connection, name = std::move(name), interval] {
          std::unique_lock lock(mutex_);
          while (!wake_.wait_for(lock, interval, [this] { return stop_; })) {
            if (paused_) continue;
            lock.unlock();
            try {
              connection.send(Heartbeat{name});
            } catch (const std::exception&) {
              return;
            }
            lock.lock();
          }
        }) {}

  ~HeartbeatThread() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
    }
    wake_.notify_one();
    thread_.join();
  }

  void pause() {
    std::lock_guard lock(mutex_);
    paused_ = true;
  }

 private:
  std::mutex mutex_;
  std::condition_variable wake_;
  bool stop_ = false;
  bool paused_ = false;
  std::thread thread_;
};

enum class SessionEnd { shutdown, lost, fault };

SessionEnd serve(Connection& connection, const WorkerOptions& options, TrialRunner& backing, int& completed) {
  connection.send(Register{options.name, options.capabilities});
  HeartbeatThread heartbeat(connection, options.name, options.heartbeat_interval);
  bool stalled = false;
  while (true) {
    std::optional<WireMessage> message;
    try {
      message = connection.receive();
    } catch (const std::exception&) {
      message.reset();
    }
    if (!message) return stalled ? SessionEnd::fault : SessionEnd::lost;
    if (std::holds_alternative<Shutdown>(*message)) return SessionEnd::shutdown;
    const auto* task = std::get_if<TaskAssign>(&*message);
    if (task == nullptr || stalled) continue;
    if (options.crash_after_tasks && completed >= *options.crash_after_tasks) {
      connection.close();
      return SessionEnd::fault;
    }
    if (options.stall_after_tasks && completed >= *options.stall_after_tasks) {
      heartbeat.pause();
      stalled = true;
      continue;
    }

    TrainRequest request{task->trial_id, task->config, task->runner_spec.row, task->from_epoch, task->to_epoch};
    const auto start = std::chrono::steady_clock::now();
    WireMessage reply;
    try {
      auto segments = backing.train(std::span<const TrainRequest>(&request, 1));
      const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
      reply = TaskResult{task->task_id, task->trial_id, std::move(segments.at(0)), took.count()};
    } catch (const std::exception& e) {
      reply = TaskError{task->task_id, e.what()};
    }
    try {
      connection.send(reply);
    } catch (const std::exception&) {
      return SessionEnd::lost;
    }
    ++completed;
  }
}

}  // namespace

int run_worker(const WorkerOptions& options, TrialRunner& backing) {
  int completed = 0;
  int failures = 0;
  while (true) {
    int fd = -1;
    try {
      fd = connect_tcp(options.coordinator);
    } catch (const std::system_error&) {
      if (++failures >= options.connect_attempts) return kWorkerUnreachable;
      std::this_thread::sleep_for(options.retry_delay);
      continue;
    }
    failures = 0;
    Connection connection(fd);
    SessionEnd end;
    try {
      end = serve(connection, options, backing, completed);
    } catch (const std::exception&) {
      end = SessionEnd::lost;
    }
    if (end == SessionEnd::shutdown) return kWorkerShutdown;
    if (end == SessionEnd::fault) return kWorkerInjectedFault;
  }
}

}  // namespace swiftband
