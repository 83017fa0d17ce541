#include "swiftband/wire.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <system_error>

#include "swiftband/error.hpp"

namespace swiftband {

using nlohmann::json;

namespace {

const json& field(const json& body, const char* name) {
  auto it = body.find(name);
  if (it == body.end()) throw DecodeError(std::string("missing field '") + name + "'");
  return *it;
}

template <typename T>
T get(const json& body, const char* name) {
  const auto& value = field(body, name);
  try {
    return value.get<T>();
  } catch (const json::exception&) {
    throw DecodeError(std::string("field '") + name + "' has the wrong type");
  }
}

int get_epoch(const json& body, const char* name) {
  const auto& value = field(body, name);
  if (!value.is_number_integer()) throw DecodeError(std::string("field '") + name + "' must be an integer");
  return value.get<int>();
}

std::uint64_t get_id(const json& body, const char* name) {
  const auto& value = field(body, name);
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<std::int64_t>() >= 0))
    throw DecodeError(std::string("field '") + name + "' must be a non-negative integer");
  return value.get<std::uint64_t>();
}

json spec_to_json(const RunnerSpec& spec) {
  json out{{"kind", spec.kind}, {"hp_names", spec.hp_names}};
  if (spec.row) out["row"] = *spec.row;
  return out;
}

RunnerSpec spec_from_json(const json& body) {
  if (!body.is_object()) throw DecodeError("field 'runner_spec' must be an object");
  RunnerSpec spec;
  spec.kind = get<std::string>(body, "kind");
  if (body.contains("row")) spec.row = get_id(body, "row");
  if (body.contains("hp_names")) spec.hp_names = get<std::vector<std::string>>(body, "hp_names");
  return spec;
}

std::uint32_t read_length(std::string_view bytes) {
  std::uint32_t be = 0;
  std::memcpy(&be, bytes.data(), 4);
  return ntohl(be);
}

WireMessage decode_body(std::string_view body) {
  json parsed = json::parse(body.begin(), body.end(), nullptr, false);
  if (parsed.is_discarded()) throw DecodeError("frame body is not valid JSON");
  return message_from_json(parsed);
}

[[noreturn]] void throw_errno(const char* what) { throw std::system_error(errno, std::generic_category(), what); }

addrinfo* resolve(const std::string& host, int port, bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* result = nullptr;
  const auto service = std::to_string(port);
  const int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(), &hints, &result);
  if (rc != 0) throw std::system_error(EHOSTUNREACH, std::generic_category(), "resolve " + host + ": " + gai_strerror(rc));
  return result;
}

}  // namespace

std::string_view message_type(const WireMessage& message) {
  static constexpr std::string_view names[] = {"register", "task_assign", "task_result", "task_error", "heartbeat",
                                               "shutdown"};
  return names[message.index()];
}

json message_to_json(const WireMessage& message) {
  json out{{"v", kProtocolVersion}, {"type", message_type(message)}};
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Register>) {
          out["worker_name"] = m.worker_name;
          out["capabilities"] = m.capabilities;
        } else if constexpr (std::is_same_v<T, TaskAssign>) {
          out["task_id"] = m.task_id;
          out["trial_id"] = m.trial_id;
          out["config"] = config_to_json(m.config);
          out["from_epoch"] = m.from_epoch;
          out["to_epoch"] = m.to_epoch;
          out["runner_spec"] = spec_to_json(m.runner_spec);
        } else if constexpr (std::is_same_v<T, TaskResult>) {
          out["task_id"] = m.task_id;
          out["trial_id"] = m.trial_id;
          out["curve_segment"] = m.curve_segment;
          out["wall_time_ms"] = m.wall_time_ms;
        } else if constexpr (std::is_same_v<T, TaskError>) {
          out["task_id"] = m.task_id;
          out["reason"] = m.reason;
        } else if constexpr (std::is_same_v<T, Heartbeat>) {
          out["worker_name"] = m.worker_name;
        }
      },
      message);
  return out;
}

WireMessage message_from_json(const json& body) {
  if (!body.is_object()) throw DecodeError("frame body must be a JSON object");
  const auto version = get_epoch(body, "v");
  if (version != kProtocolVersion) throw DecodeError("unsupported protocol version " + std::to_string(version));
  const auto type = get<std::string>(body, "type");
  if (type == "register") {
    Register m;
    m.worker_name = get<std::string>(body, "worker_name");
    if (body.contains("capabilities")) m.capabilities = get<std::vector<std::string>>(body, "capabilities");
    return m;
  }
  if (type == "task_assign") {
    TaskAssign m;
    m.task_id = get_id(body, "task_id");
    m.trial_id = static_cast<TrialId>(get_id(body, "trial_id"));
    const auto& config = field(body, "config");
    if (!config.is_array()) throw DecodeError("field 'config' must be an array");
    try {
      m.config = config_from_json(config);
    } catch (const std::exception& e) {
      throw DecodeError(std::string("field 'config': ") + e.what());
    }
    m.from_epoch = get_epoch(body, "from_epoch");
    m.to_epoch = get_epoch(body, "to_epoch");
    if (m.from_epoch < 0 || m.to_epoch <= m.from_epoch)
      throw DecodeError("task_assign needs 0 <= from_epoch < to_epoch");
    m.runner_spec = spec_from_json(field(body, "runner_spec"));
    return m;
  }
  if (type == "task_result") {
    TaskResult m;
    m.task_id = get_id(body, "task_id");
    m.trial_id = static_cast<TrialId>(get_id(body, "trial_id"));
    m.curve_segment = get<std::vector<double>>(body, "curve_segment");
    m.wall_time_ms = get<double>(body, "wall_time_ms");
    return m;
  }
  if (type == "task_error") {
    TaskError m;
    m.task_id = get_id(body, "task_id");
    m.reason = get<std::string>(body, "reason");
    return m;
  }
  if (type == "heartbeat") return Heartbeat{get<std::string>(body, "worker_name")};
  if (type == "shutdown") return Shutdown{};
  throw DecodeError("unknown message type '" + type + "'");
}

std::string encode_message(const WireMessage& message) {
  const auto body = message_to_json(message).dump();
  if (body.size() > kMaxFrameBytes) throw DecodeError("frame exceeds 16 MiB");
  const std::uint32_t be = htonl(static_cast<std::uint32_t>(body.size()));
  std::string frame(4, '\0');
  std::memcpy(frame.data(), &be, 4);
  return frame + body;
}

WireMessage decode_message(std::string_view frame) {
  if (frame.size() < 4) throw DecodeError("truncated frame: missing field 'length' (4-byte header)");
  const auto length = read_length(frame);
  if (length > kMaxFrameBytes) throw DecodeError("oversized frame: " + std::to_string(length) + " bytes");
  if (frame.size() - 4 < length)
    throw DecodeError("truncated frame: body has " + std::to_string(frame.size() - 4) + " of " +
                      std::to_string(length) + " bytes");
  if (frame.size() - 4 > length) throw DecodeError("trailing bytes after frame body");
  return decode_body(frame.substr(4));
}

std::pair<std::string, int> parse_endpoint(std::string_view endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string_view::npos) throw ConfigError("endpoint '" + std::string(endpoint) + "' is not host:port");
  int port = -1;
  const auto digits = endpoint.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), port);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || port < 0 || port > 65535)
    throw ConfigError("endpoint '" + std::string(endpoint) + "' has an invalid port");
  return {std::string(endpoint.substr(0, colon)), port};
}

Connection::~Connection() {
  close();
  ::close(fd_);
}

void Connection::close() {
  std::call_once(closed_, [this] { ::shutdown(fd_, SHUT_RDWR); });
}

void Connection::send(const WireMessage& message) {
  const auto frame = encode_message(message);
  std::lock_guard lock(send_mutex_);
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const auto n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("send");
    }
    sent += static_cast<std::size_t>(n);
  }
}

bool Connection::read_exact(char* data, std::size_t size, bool allow_eof) {
  std::size_t got = 0;
  while (got < size) {
    const auto n = ::recv(fd_, data + got, size - got, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw_errno("recv");
    }
    if (n == 0) {
      if (got == 0 && allow_eof) return false;
      throw DecodeError("connection closed mid-frame");
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<WireMessage> Connection::receive() {
  char header[4];
  if (!read_exact(header, 4, true)) return std::nullopt;
  const auto length = read_length(std::string_view(header, 4));
  if (length > kMaxFrameBytes) throw DecodeError("oversized frame: " + std::to_string(length) + " bytes");
  std::string body(length, '\0');
  read_exact(body.data(), length, false);
  return decode_body(body);
}

Listener::Listener(std::string_view endpoint) {
  const auto [host, port] = parse_endpoint(endpoint);
  auto* info = resolve(host, port, true);
  fd_ = ::socket(info->ai_family, info->ai_socktype, info->ai_protocol);
  if (fd_ < 0) {
    freeaddrinfo(info);
    throw_errno("socket");
  }
  const int yes = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  if (::bind(fd_, info->ai_addr, info->ai_addrlen) < 0 || ::listen(fd_, 64) < 0) {
    const int err = errno;
    freeaddrinfo(info);
    ::close(fd_);
    throw std::system_error(err, std::generic_category(), "bind " + std::string(endpoint));
  }
  freeaddrinfo(info);
  sockaddr_in bound{};
  socklen_t len = sizeof bound;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = ntohs(bound.sin_port);
}

Listener::~Listener() {
  close();
  ::close(fd_);
}

void Listener::close() {
  std::call_once(closed_, [this] { ::shutdown(fd_, SHUT_RDWR); });
}

std::optional<int> Listener::accept() {
  while (true) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) {
      const int yes = 1;
      ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
      return fd;
    }
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return std::nullopt;
  }
}

int connect_tcp(std::string_view endpoint) {
  const auto [host, port] = parse_endpoint(endpoint);
  auto* info = resolve(host, port, false);
  const int fd = ::socket(info->ai_family, info->ai_socktype, info->ai_protocol);
  if (fd < 0) {
    freeaddrinfo(info);
    throw_errno("socket");
  }
  if (::connect(fd, info->ai_addr, info->ai_addrlen) < 0) {
    const int err = errno;
    freeaddrinfo(info);
    ::close(fd);
    throw std::system_error(err, std::generic_category(), "connect " + std::string(endpoint));
  }
  freeaddrinfo(info);
  const int yes = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
  return fd;
}

}  // namespace swiftband
