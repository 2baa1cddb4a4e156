#include "ffratpg/protocol.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

namespace ffratpg {

using nlohmann::json;

std::string_view to_string(RewardKind kind) {
  switch (kind) {
    case RewardKind::Hop: return "hop";
    case RewardKind::ReachPi: return "pi";
    case RewardKind::Success: return "success";
    case RewardKind::Abort: return "abort";
  }
  return "?";
}

json observation_to_json(const Netlist& netlist, const StateObservation& obs) {
  json nodes = json::array();
  for (const ObservedNode& node : obs.nodes) {
    const auto flat = node.features.flatten();
    nodes.push_back({{"id", node.id},
                     {"name", netlist.gate_name(node.id)},
                     {"features", std::vector<double>(flat.begin(), flat.end())}});
  }
  json edges = json::array();
  for (const auto& [from, to] : obs.edges) edges.push_back({from, to});
  return {
      {"nodes", std::move(nodes)},
      {"edges", std::move(edges)},
      {"mask", obs.action_mask},
      {"targets", obs.action_targets},
      {"target_values", obs.action_values},
      {"objective",
       {{"gate", obs.objective.gate},
        {"name", netlist.gate_name(obs.objective.gate)},
        {"value", obs.objective.value ? 1 : 0}}},
      {"region_head", obs.region_head},
      {"truncated", obs.truncated},
  };
}

json step_to_json(const Netlist& netlist, const StepOutcome& outcome) {
  json reply = {
      {"reward", outcome.reward},
      {"kind", to_string(outcome.kind)},
      {"obs", outcome.observation ? observation_to_json(netlist, *outcome.observation) : json()},
      {"done", outcome.done},
      {"status", outcome.status ? json(to_string(*outcome.status)) : json()},
  };
  return reply;
}

json metrics_to_json(const Netlist& netlist, const EpisodeMetrics& m,
                     const std::optional<Pattern>& pattern) {
  std::vector<std::string> pi_names;
  for (GateId pi : netlist.primary_inputs()) pi_names.push_back(netlist.gate_name(pi));
  json out = {
      {"backtracks", m.backtracks},
      {"backtrace_steps", m.backtrace_steps},
      {"decisions", m.decisions},
      {"pi_assignments", m.pi_assignments},
      {"agent_steps", m.agent_steps},
      {"truncations", m.truncations},
      {"total_reward", m.total_reward},
      {"status", m.status ? json(to_string(*m.status)) : json()},
      {"pi_names", pi_names},
      {"pi_visits", m.pi_visits},
      {"pi_backtracks", m.pi_backtracks},
      {"pattern", json()},
  };
  if (pattern) {
    std::string bits;
    for (LogicValue v : *pattern) bits += v == LogicValue::One ? '1' : '0';
    out["pattern"] = bits;
  }
  return out;
}

json error_reply(std::string_view message, std::string_view code) {
  return {{"error", message}, {"code", code}};
}

// ---------------------------------------------------------------------------
// Session

Session::Reply Session::handle_line(const std::string& line) {
  json message;
  try {
    message = json::parse(line);
  } catch (const json::parse_error& e) {
    return {error_reply(std::string("malformed JSON: ") + e.what(), "parse")};
  }
  return handle(message);
}

Session::Reply Session::handle(const json& message) {
  try {
    if (!message.is_object() || !message.contains("cmd") || !message["cmd"].is_string()) {
      return {error_reply("message must be an object with a string \"cmd\"", "bad_request")};
    }
    const std::string cmd = message["cmd"];
    if (cmd == "hello") {
      const json& v = message.value("version", json());
      if (!v.is_number_integer() || v.get<long long>() != kProtocolVersion) {
        return {error_reply("unsupported protocol version (server speaks " +
                                std::to_string(kProtocolVersion) + ")",
                            "version"),
                true};
      }
      greeted_ = true;
      const auto names = NodeFeatures::names();
      return {{{"ok", true},
               {"version", kProtocolVersion},
               {"server", "ffratpg"},
               {"feature_names", std::vector<std::string>(names.begin(), names.end())}}};
    }
    if (!greeted_) return {error_reply("hello required before \"" + cmd + "\"", "handshake")};
    if (cmd == "reset") return on_reset(message);
    if (cmd == "step") return on_step(message);
    if (cmd == "metrics") return on_metrics();
    if (cmd == "bye") return {{{"ok", true}}, true};
    return {error_reply("unknown command \"" + cmd + "\"", "bad_request")};
  } catch (const ProtocolError& e) {
    return {error_reply(e.what(), "protocol")};
  } catch (const json::exception& e) {
    return {error_reply(std::string("bad field: ") + e.what(), "bad_request")};
  } catch (const Error& e) {
    return {error_reply(e.what(), "input")};
  } catch (const std::exception& e) {
    return {error_reply(e.what(), "internal")};
  }
}

std::shared_ptr<const CircuitContext> Session::load_circuit(const json& message) {
  std::string key;
  bool inline_text = false;
  if (message.contains("bench_text")) {
    key = "text:" + message["bench_text"].get<std::string>();
    inline_text = true;
  } else if (message.contains("bench")) {
    key = "path:" + message["bench"].get<std::string>();
  } else {
    throw Error("reset needs \"bench\" (path) or \"bench_text\"");
  }
  auto it = circuits_.find(key);
  if (it != circuits_.end()) return it->second;
  Netlist netlist = inline_text
                        ? parse_bench(message["bench_text"].get<std::string>(),
                                      message.value("name", std::string("inline")))
                        : read_bench_file(message["bench"].get<std::string>());
  auto ctx = make_context(std::move(netlist));
  circuits_.emplace(key, ctx);
  return ctx;
}

Session::Reply Session::on_reset(const json& message) {
  auto ctx = load_circuit(message);
  if (!message.contains("fault")) throw Error("reset needs \"fault\"");
  const FaultSite fault = parse_fault(ctx->netlist, message["fault"].get<std::string>());
  const std::uint64_t seed = message.value("seed", std::uint64_t{0});

  EnvConfig config;
  if (message.contains("config")) {
    const json& c = message["config"];
    config.action_arity = c.value("action_arity", config.action_arity);
    config.backtrack_limit = c.value("backtrack_limit", config.backtrack_limit);
    config.lambda1 = c.value("lambda1", config.lambda1);
    config.lambda2 = c.value("lambda2", config.lambda2);
  }
  // Build first so a bad request leaves any previous episode untouched.
  AtpgEnvironment env(ctx, config);
  StepOutcome outcome = env.reset(fault, seed);
  env_.emplace(std::move(env));
  return {step_to_json(ctx->netlist, outcome)};
}

Session::Reply Session::on_step(const json& message) {
  if (!env_ || !env_->active()) throw ProtocolError("no active episode");
  const json& a = message.value("action", json());
  if (!a.is_number_integer() || a.get<long long>() < 0) {
    throw ProtocolError("\"action\" must be a non-negative integer");
  }
  const StepOutcome outcome = env_->step(a.get<std::size_t>());
  return {step_to_json(env_->context().netlist, outcome)};
}

Session::Reply Session::on_metrics() const {
  if (!env_) throw ProtocolError("no active episode");
  const AtpgResult r = env_->result();
  return {{{"metrics", metrics_to_json(env_->context().netlist, env_->metrics(), r.pattern)}}};
}

void serve_stream(std::istream& in, std::ostream& out) {
  Session session;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const Session::Reply reply = session.handle_line(line);
    out << reply.body.dump() << '\n' << std::flush;
    if (reply.close) break;
  }
}

// ---------------------------------------------------------------------------
// Sockets

LineChannel::LineChannel(LineChannel&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)) {}

LineChannel::~LineChannel() {
  if (fd_ >= 0) ::close(fd_);
}

std::optional<std::string> LineChannel::read_line() {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    char chunk[4096];
    const ssize_t got = ::recv(fd_, chunk, sizeof chunk, 0);
    if (got == 0) return std::nullopt;
    if (got < 0) {
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return std::nullopt;
      throw Error(std::string("socket read failed: ") + std::strerror(errno));
    }
    buffer_.append(chunk, static_cast<std::size_t>(got));
  }
}

void LineChannel::write_line(const std::string& line) {
  const std::string data = line + '\n';
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd_, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(std::string("socket write failed: ") + std::strerror(errno));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos) throw Error("endpoint must be host:port, got '" + endpoint + "'");
  std::string host = endpoint.substr(0, colon);
  if (host.empty()) host = "127.0.0.1";
  const std::string port_text = endpoint.substr(colon + 1);
  unsigned long port = 0;
  try {
    std::size_t used = 0;
    port = std::stoul(port_text, &used);
    if (used != port_text.size()) throw Error("");
  } catch (...) {
    throw Error("bad port in endpoint '" + endpoint + "'");
  }
  if (port == 0 || port > 65535) throw Error("port out of range in endpoint '" + endpoint + "'");
  return {host, static_cast<std::uint16_t>(port)};
}

LineChannel connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &found); rc != 0) {
    throw Error("cannot resolve '" + host + "': " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* a = found; a; a = a->ai_next) {
    fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(found);
  if (fd < 0) throw Error("cannot connect to " + host + ":" + service);
  return LineChannel(fd);
}

void serve_tcp(std::uint16_t port, const std::atomic<bool>& stop,
               const std::function<void(std::uint16_t)>& on_listening) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw Error(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::listen(listener, 16) != 0) {
    const std::string why = std::strerror(errno);
    ::close(listener);
    throw Error("cannot listen on port " + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  if (on_listening) on_listening(ntohs(addr.sin_port));

  std::mutex mutex;
  std::set<int> open;
  std::vector<std::jthread> workers;
  while (!stop) {
    pollfd p{listener, POLLIN, 0};
    if (::poll(&p, 1, 100) <= 0) continue;
    const int fd = ::accept(listener, nullptr, nullptr);
    if (fd < 0) continue;
    {
      std::lock_guard lock(mutex);
      open.insert(fd);
    }
    workers.emplace_back([fd, &mutex, &open] {
      LineChannel channel(fd);
      Session session;
      try {
        while (auto line = channel.read_line()) {
          if (line->find_first_not_of(" \t") == std::string::npos) continue;
          const Session::Reply reply = session.handle_line(*line);
          channel.write_line(reply.body.dump());
          if (reply.close) break;
        }
      } catch (const std::exception& e) {
        std::cerr << "connection error: " << e.what() << '\n';
      }
      std::lock_guard lock(mutex);
      open.erase(fd);
      // The channel closes the descriptor once the lock is released.
    });
  }
  {
    std::lock_guard lock(mutex);
    for (int fd : open) ::shutdown(fd, SHUT_RDWR);
  }
  workers.clear();
  ::close(listener);
}

// ---------------------------------------------------------------------------
// Remote policy

RemoteFfrPolicy::RemoteFfrPolicy(std::shared_ptr<const CircuitContext> ctx, LineChannel channel,
                                 std::size_t action_arity)
    : ctx_(std::move(ctx)), channel_(std::move(channel)), scaler_(*ctx_), arity_(action_arity) {
  const json reply = request({{"cmd", "hello"}, {"version", kProtocolVersion}});
  if (reply.value("version", -1) != kProtocolVersion) {
    throw Error("policy endpoint speaks an unsupported protocol version");
  }
}

json RemoteFfrPolicy::request(const json& message) {
  channel_.write_line(message.dump());
  const auto line = channel_.read_line();
  if (!line) throw Error("policy endpoint closed the connection");
  json reply;
  try {
    reply = json::parse(*line);
  } catch (const json::parse_error& e) {
    throw Error(std::string("policy endpoint sent malformed JSON: ") + e.what());
  }
  if (reply.contains("error")) {
    throw Error("policy endpoint error: " + reply["error"].dump());
  }
  return reply;
}

std::size_t RemoteFfrPolicy::choose(const CircuitContext& ctx, const CircuitState& state,
                                    Objective objective, std::span<const FfrTarget> candidates) {
  if (&ctx != ctx_.get()) throw Error("remote policy used with a different circuit");
  const StateObservation obs = build_observation(ctx, scaler_, state, objective, arity_);
  const json reply =
      request({{"cmd", "act"}, {"obs", observation_to_json(ctx.netlist, obs)}});
  const json& a = reply.value("action", json());
  if (!a.is_number_integer() || a.get<long long>() < 0 ||
      a.get<std::size_t>() >= obs.action_mask.size() || !obs.action_mask[a.get<std::size_t>()]) {
    throw Error("policy endpoint chose a masked or invalid action: " + a.dump());
  }
  const GateId target = obs.action_targets[a.get<std::size_t>()];
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].fanin == target) return i;
  }
  throw Error("policy endpoint target is not a backtrace candidate");
}

}  // namespace ffratpg
