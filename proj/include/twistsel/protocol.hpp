#pragma once

// Session wire protocol: one JSON object per line, UTF-8, carried one
// message per WebSocket text frame. Every object has a "type" field.
// Unknown fields are ignored. See docs/protocol.md.

#include "twistsel/engine.hpp"
#include "twistsel/harness.hpp"

#include <json.hpp>

#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace twistsel::protocol {

struct Pose {
  double t_ms = 0.0;
  UnitQuat quat;
  friend bool operator==(const Pose&, const Pose&) = default;
};

struct SetMethod {
  Method method = Method::Dwell;
  friend bool operator==(const SetMethod&, const SetMethod&) = default;
};

/// Partial EngineConfig: only the fields present are changed.
struct SetConfig {
  nlohmann::json patch = nlohmann::json::object();
  friend bool operator==(const SetConfig&, const SetConfig&) = default;
};

struct StartTask {
  friend bool operator==(const StartTask&, const StartTask&) = default;
};

struct Reset {
  friend bool operator==(const Reset&, const Reset&) = default;
};

using ClientMessage = std::variant<Pose, SetMethod, SetConfig, StartTask, Reset>;

enum class ButtonState { Red, Gray, Black };
std::string_view to_string(ButtonState s);

struct State {
  FrameState frame;
  Method method = Method::Dwell;
  bool task_active = false;
  std::optional<TargetId> expected_button;
  std::vector<ButtonState> buttons;  // by ascending button id
  friend bool operator==(const State&, const State&) = default;
};

struct Event {
  InteractionEvent event;
  std::optional<LogEntry> log;  // present while a task is scoring
  friend bool operator==(const Event&, const Event&) = default;
};

/// Sent once when the sequence is exhausted. The log is not repeated here.
struct TaskResultMsg {
  TaskResult result;
  friend bool operator==(const TaskResultMsg&, const TaskResultMsg&) = default;
};

struct ErrorMsg {
  std::string code;
  std::string detail;
  friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using ServerMessage = std::variant<State, Event, TaskResultMsg, ErrorMsg>;

/// Decoding failure; `code` is the wire error code (bad_json, bad_type,
/// missing_field, bad_field, bad_method, bad_quat).
struct DecodeError {
  std::string code;
  std::string detail;
};

/// Quaternions must arrive with |norm - 1| <= this and are renormalized.
inline constexpr double kQuatTolerance = 1e-3;

/// Encoded messages end with '\n'.
std::string encode(const ClientMessage& msg);
std::string encode(const ServerMessage& msg);

/// Decodes one JSON object (a trailing newline is allowed).
std::variant<ClientMessage, DecodeError> decode_client(std::string_view text);
std::variant<ServerMessage, DecodeError> decode_server(std::string_view text);

/// Splits a frame into its non-empty lines.
std::vector<std::string_view> split_lines(std::string_view text);

}  // namespace twistsel::protocol
