#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include <json.hpp>

#include "ffratpg/environment.hpp"

namespace ffratpg {

// Wire protocol: one JSON object per line in each direction. See docs/protocol.md.
inline constexpr int kProtocolVersion = 1;

nlohmann::json observation_to_json(const Netlist& netlist, const StateObservation& obs);
nlohmann::json step_to_json(const Netlist& netlist, const StepOutcome& outcome);
nlohmann::json metrics_to_json(const Netlist& netlist, const EpisodeMetrics& metrics,
                               const std::optional<Pattern>& pattern);
std::string_view to_string(RewardKind kind);

/// Server side of one connection. Holds at most one active episode.
class Session {
 public:
  struct Reply {
    nlohmann::json body;
    bool close = false;  // the peer must be disconnected after this reply
  };

  Reply handle_line(const std::string& line);
  Reply handle(const nlohmann::json& message);

 private:
  Reply on_reset(const nlohmann::json& message);
  Reply on_step(const nlohmann::json& message);
  Reply on_metrics() const;
  std::shared_ptr<const CircuitContext> load_circuit(const nlohmann::json& message);

  bool greeted_ = false;
  std::optional<AtpgEnvironment> env_;
  // Keyed by bench path or inline text, so repeated resets on one circuit parse it once.
  std::map<std::string, std::shared_ptr<const CircuitContext>> circuits_;
};

nlohmann::json error_reply(std::string_view message, std::string_view code);

/// Serves one session over a pair of streams until EOF or a closing reply.
void serve_stream(std::istream& in, std::ostream& out);

/// Line-oriented view of a connected socket. Owns the descriptor.
class LineChannel {
 public:
  explicit LineChannel(int fd) : fd_(fd) {}
  LineChannel(const LineChannel&) = delete;
  LineChannel& operator=(const LineChannel&) = delete;
  LineChannel(LineChannel&& other) noexcept;
  ~LineChannel();

  /// nullopt on EOF.
  std::optional<std::string> read_line();
  void write_line(const std::string& line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

/// Connects to `host:port` (IPv4 or a resolvable name).
LineChannel connect_tcp(const std::string& host, std::uint16_t port);

/// Parses "host:port" or ":port" (host defaults to 127.0.0.1).
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

/// Accepts connections on 127.0.0.1:`port` (0 picks a free port) and serves each on its own
/// thread. `on_listening` receives the bound port. Returns once `stop` becomes true.
void serve_tcp(std::uint16_t port, const std::atomic<bool>& stop,
               const std::function<void(std::uint16_t)>& on_listening = {});

/// FFR backtrace whose fanin choices come from an external agent. Speaks the same protocol as a
/// client: `hello`, then `{"cmd":"act","obs":...}` per hop, expecting `{"action":i}` back.
class RemoteFfrPolicy final : public FfrBacktracePolicy {
 public:
  RemoteFfrPolicy(std::shared_ptr<const CircuitContext> ctx, LineChannel channel,
                  std::size_t action_arity = EnvConfig{}.action_arity);
  std::string_view name() const override { return "rl"; }

 protected:
  std::size_t choose(const CircuitContext& ctx, const CircuitState& state, Objective objective,
                     std::span<const FfrTarget> candidates) override;

 private:
  nlohmann::json request(const nlohmann::json& message);

  std::shared_ptr<const CircuitContext> ctx_;
  LineChannel channel_;
  FeatureScaler scaler_;
  std::size_t arity_;
};

}  // namespace ffratpg
