#include "swiftband/coordinator.hpp"

#include <algorithm>

#include "swiftband/error.hpp"

namespace swiftband {

using Clock = std::chrono::steady_clock;

Coordinator::Coordinator(CoordinatorOptions options) : options_(std::move(options)), listener_(options_.bind) {
  if (options_.expected_workers < 1) throw ConfigError("coordinator needs at least one worker");
  if (options_.runner_kind != "replay" && options_.runner_kind != "config")
    throw ConfigError("unknown runner kind '" + options_.runner_kind + "'");
  acceptor_ = std::thread([this] { accept_loop(); });
}

Coordinator::~Coordinator() {
  try {
    shutdown();
  } catch (...) {
  }
}

void Coordinator::accept_loop() {
  while (auto fd = listener_.accept()) {
    auto connection = std::make_shared<Connection>(*fd);
    std::lock_guard lock(mutex_);
    const auto index = pending_connections_.size();
    pending_connections_.push_back(connection);
    events_.push_back({Event::Kind::connected, index, std::nullopt});
    readers_.emplace_back([this, index, connection] { read_loop(index, connection); });
    ready_.notify_one();
  }
}

void Coordinator::read_loop(std::size_t worker, std::shared_ptr<Connection> connection) {
  try {
    while (auto message = connection->receive()) push({Event::Kind::message, worker, std::move(message)});
  } catch (const std::exception&) {
  }
  push({Event::Kind::disconnected, worker, std::nullopt});
}

void Coordinator::push(Event event) {
  std::lock_guard lock(mutex_);
  events_.push_back(std::move(event));
  ready_.notify_one();
}

std::optional<Coordinator::Event> Coordinator::pop(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  if (!ready_.wait_for(lock, timeout, [this] { return !events_.empty(); })) return std::nullopt;
  auto event = std::move(events_.front());
  events_.pop_front();
  if (event.kind == Event::Kind::connected) {
    if (workers_.size() <= event.worker) workers_.resize(event.worker + 1);
    workers_[event.worker].connection = pending_connections_[event.worker];
  }
  return event;
}

std::size_t Coordinator::live_workers() const {
  return static_cast<std::size_t>(std::count_if(workers_.begin(), workers_.end(), [](const Worker& w) {
    return w.state == WorkerState::idle || w.state == WorkerState::busy;
  }));
}

std::optional<std::size_t> Coordinator::batch_index(std::uint64_t task) const {
  if (task < batch_.first_task || task >= batch_.first_task + batch_.tasks.size()) return std::nullopt;
  return static_cast<std::size_t>(task - batch_.first_task);
}

void Coordinator::mark_lost(std::size_t index) {
  auto& worker = workers_[index];
  if (worker.state == WorkerState::lost) return;
  const bool registered = worker.state != WorkerState::unregistered;
  worker.state = WorkerState::lost;
  if (registered) ++stats_.workers_lost;
  if (worker.connection) worker.connection->close();
  if (worker.task) {
    if (auto i = batch_index(*worker.task); i && !batch_.results[*i]) {
      batch_.pending.emplace(batch_.tasks[*i].trial_id, *i);
      ++stats_.tasks_reassigned;
    }
    worker.task.reset();
  }
}

void Coordinator::handle_presence(const Event& event) {
  auto& worker = workers_[event.worker];
  switch (event.kind) {
    case Event::Kind::connected:
      worker.last_seen = Clock::now();
      return;
    case Event::Kind::disconnected:
      mark_lost(event.worker);
      return;
    case Event::Kind::message:
      break;
  }
  if (worker.state == WorkerState::lost) return;
  worker.last_seen = Clock::now();
  if (const auto* reg = std::get_if<Register>(&*event.message)) {
    if (worker.state == WorkerState::unregistered) {
      worker.name = reg->worker_name;
      worker.state = WorkerState::idle;
    }
  } else if (worker.state == WorkerState::unregistered) {
    mark_lost(event.worker);
  }
}

void Coordinator::expire_silent_workers() {
  const auto now = Clock::now();
  for (std::size_t i = 0; i < workers_.size(); ++i) {
    const auto state = workers_[i].state;
    if ((state == WorkerState::idle || state == WorkerState::busy) &&
        now - workers_[i].last_seen > options_.heartbeat_timeout)
      mark_lost(i);
  }
}

void Coordinator::wait_for_workers() {
  const auto deadline = Clock::now() + options_.register_timeout;
  while (live_workers() < static_cast<std::size_t>(options_.expected_workers)) {
    const auto now = Clock::now();
    if (now >= deadline)
      throw Error("only " + std::to_string(live_workers()) + " of " + std::to_string(options_.expected_workers) +
                  " workers registered");
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    if (auto event = pop(std::min(left, std::chrono::milliseconds(100)))) handle_presence(*event);
  }
}

void Coordinator::dispatch() {
  for (std::size_t i = 0; i < workers_.size() && !batch_.pending.empty(); ++i) {
    auto& worker = workers_[i];
    if (worker.state != WorkerState::idle) continue;
    const auto [trial, index] = *batch_.pending.begin();
    batch_.pending.erase(batch_.pending.begin());
    const auto& task = batch_.tasks[index];
    worker.state = WorkerState::busy;
    worker.task = task.task_id;
    ++stats_.tasks_assigned;
    try {
      worker.connection->send(task);
    } catch (const std::exception&) {
      mark_lost(i);
    }
  }
}

void Coordinator::handle_result(std::size_t index, const TaskResult& result) {
  auto& worker = workers_[index];
  if (worker.task == result.task_id) {
    worker.task.reset();
    worker.state = WorkerState::idle;
  }
  const auto i = batch_index(result.task_id);
  if (!i || batch_.results[*i]) {
    ++stats_.duplicates_discarded;
    return;
  }
  const auto& task = batch_.tasks[*i];
  if (result.trial_id != task.trial_id)
    throw RunnerError(task.trial_id, "worker answered task " + std::to_string(task.task_id) + " for trial " +
                                         std::to_string(result.trial_id));
  if (result.curve_segment.size() != static_cast<std::size_t>(task.to_epoch - task.from_epoch))
    throw RunnerError(task.trial_id, "worker returned " + std::to_string(result.curve_segment.size()) +
                                         " values for epochs [" + std::to_string(task.from_epoch) + ", " +
                                         std::to_string(task.to_epoch) + ")");
  batch_.results[*i] = result.curve_segment;
  --batch_.remaining;
  ++stats_.accepted[result.task_id];
  batch_.pending.erase({task.trial_id, *i});
}

std::vector<CurveSegment> Coordinator::train(std::span<const TrainRequest> batch) {
  if (stopped_) throw Error("coordinator is shut down");
  batch_ = Batch{};
  batch_.first_task = next_task_;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& request = batch[i];
    TaskAssign task;
    task.task_id = next_task_++;
    task.trial_id = request.trial;
    task.config = request.config;
    task.from_epoch = request.from_epoch;
    task.to_epoch = request.to_epoch;
    task.runner_spec.kind = options_.runner_kind;
    task.runner_spec.hp_names = options_.hp_names;
    if (options_.runner_kind == "replay") {
      if (!request.dataset_row) throw RunnerError(request.trial, "replay workers need a dataset row");
      task.runner_spec.row = request.dataset_row;
    }
    batch_.tasks.push_back(std::move(task));
    batch_.pending.emplace(request.trial, i);
  }
  batch_.results.resize(batch.size());
  batch_.remaining = batch.size();

  auto orphaned_since = Clock::now();
  while (batch_.remaining > 0) {
    dispatch();
    if (live_workers() > 0) {
      orphaned_since = Clock::now();
    } else if (Clock::now() - orphaned_since > options_.heartbeat_timeout) {
      throw Error("all workers lost with " + std::to_string(batch_.remaining) + " tasks outstanding");
    }
    if (auto event = pop(std::chrono::milliseconds(50))) {
      handle_presence(*event);
      if (event->kind == Event::Kind::message && workers_[event->worker].state != WorkerState::lost) {
        if (const auto* result = std::get_if<TaskResult>(&*event->message)) {
          handle_result(event->worker, *result);
        } else if (const auto* failure = std::get_if<TaskError>(&*event->message)) {
          if (auto i = batch_index(failure->task_id); i && !batch_.results[*i])
            throw RunnerError(batch_.tasks[*i].trial_id, "worker " + workers_[event->worker].name + ": " +
                                                             failure->reason);
        }
      }
    }
    expire_silent_workers();
  }

  std::vector<CurveSegment> out;
  out.reserve(batch.size());
  for (auto& result : batch_.results) out.push_back(std::move(*result));
  return out;
}

void Coordinator::shutdown() {
  if (stopped_) return;
  stopped_ = true;
  // Registrations that raced with the last batch still get a Shutdown.
  while (auto event = pop(std::chrono::milliseconds(0))) handle_presence(*event);
  for (auto& worker : workers_) {
    if (worker.state == WorkerState::lost || !worker.connection) continue;
    try {
      worker.connection->send(Shutdown{});
    } catch (const std::exception&) {
    }
  }
  // Workers close their end on Shutdown; give them a moment before forcing.
  const auto deadline = Clock::now() + std::chrono::seconds(2);
  while (live_workers() > 0 && Clock::now() < deadline)
    if (auto event = pop(std::chrono::milliseconds(20)); event && event->kind == Event::Kind::disconnected)
      workers_[event->worker].state = WorkerState::lost;
  listener_.close();
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> readers;
  {
    std::lock_guard lock(mutex_);
    for (auto& connection : pending_connections_) connection->close();
    readers.swap(readers_);
  }
  for (auto& reader : readers) reader.join();
}

}  // namespace swiftband
