#pragma once

#include "twistsel/engine.hpp"
#include "twistsel/harness.hpp"
#include "twistsel/protocol.hpp"
#include "twistsel/scene.hpp"

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace twistsel {

inline constexpr unsigned short kDefaultPort = 8765;

struct SessionConfig {
  unsigned short port = kDefaultPort;  // 0 picks an ephemeral port
  Method method = Method::Dwell;
  EngineConfig engine;
  SceneDesc scene;
  bool task_enabled = true;
};

/// Throws InvalidConfig / InvalidScene.
void validate(const SessionConfig& config);

/// Protocol state of one connection: an engine, optionally a running task,
/// and nothing shared with other sessions. Messages are handled strictly in
/// order and each produces its complete response before the next one.
class Session {
 public:
  explicit Session(const SessionConfig& config);

  std::vector<protocol::ServerMessage> handle(const protocol::ClientMessage& msg);

  /// Decodes every line of a frame and handles it; decode failures become
  /// error messages and processing continues with the next line.
  std::vector<protocol::ServerMessage> handle_text(std::string_view text);

  /// Same, with responses encoded.
  std::string respond(std::string_view text);

  Method method() const { return engine_.method(); }
  const EngineConfig& engine_config() const { return engine_.config(); }
  bool task_active() const { return task_.has_value() && !task_->completed(); }

 private:
  std::vector<protocol::ServerMessage> on_pose(const protocol::Pose& pose);
  protocol::State make_state(const FrameState& frame) const;
  void restart_engine(Method method, const EngineConfig& config);

  Scene scene_;
  bool task_enabled_;
  Engine engine_;
  std::optional<TaskRunner> task_;
  std::optional<double> last_t_;
};

}  // namespace twistsel
