#include "twistsel/protocol.hpp"

#include "twistsel/error.hpp"
#include "twistsel/io.hpp"

#include <algorithm>
#include <cmath>

namespace twistsel::protocol {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

struct Failure {
  DecodeError error;
};

[[noreturn]] void fail(std::string code, std::string detail) {
  throw Failure{{std::move(code), std::move(detail)}};
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) {
    fail("missing_field", std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

double number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_number()) {
    fail("bad_field", std::string("field '") + key + "' must be a number");
  }
  return v.get<double>();
}

bool boolean(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_boolean()) {
    fail("bad_field", std::string("field '") + key + "' must be a boolean");
  }
  return v.get<bool>();
}

std::string string(const json& j, const char* key) {
  const json& v = require(j, key);
  if (!v.is_string()) {
    fail("bad_field", std::string("field '") + key + "' must be a string");
  }
  return v.get<std::string>();
}

std::optional<int> optional_id(const json& j, const char* key) {
  const json& v = require(j, key);
  if (v.is_null()) {
    return std::nullopt;
  }
  if (!v.is_number_integer()) {
    fail("bad_field", std::string("field '") + key + "' must be an integer or null");
  }
  return v.get<int>();
}

std::optional<double> optional_number(const json& j, const char* key) {
  const json& v = require(j, key);
  if (v.is_null()) {
    return std::nullopt;
  }
  if (!v.is_number()) {
    fail("bad_field", std::string("field '") + key + "' must be a number or null");
  }
  return v.get<double>();
}

Method method_field(const json& j, const char* key) {
  const auto m = parse_method(string(j, key));
  if (!m) {
    fail("bad_method", "unknown method '" + j.at(key).get<std::string>() + "'");
  }
  return *m;
}

json parse_object(std::string_view text) {
  json j = json::parse(text.begin(), text.end(), nullptr, false);
  if (j.is_discarded()) {
    fail("bad_json", "message is not valid JSON");
  }
  if (!j.is_object()) {
    fail("bad_json", "message must be a JSON object");
  }
  return j;
}

ordered_json optional_json(const std::optional<int>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

struct ClientEncoder {
  ordered_json operator()(const Pose& m) const {
    const UnitQuat& q = m.quat;
    return {{"type", "pose"}, {"t_ms", m.t_ms}, {"quat", {q.w(), q.x(), q.y(), q.z()}}};
  }
  ordered_json operator()(const SetMethod& m) const {
    return {{"type", "set_method"}, {"method", to_string(m.method)}};
  }
  ordered_json operator()(const SetConfig& m) const {
    return {{"type", "set_config"}, {"config", m.patch}};
  }
  ordered_json operator()(const StartTask&) const { return {{"type", "start_task"}}; }
  ordered_json operator()(const Reset&) const { return {{"type", "reset"}}; }
};

struct ServerEncoder {
  ordered_json operator()(const State& m) const {
    const FrameState& f = m.frame;
    ordered_json buttons = ordered_json::array();
    for (ButtonState b : m.buttons) {
      buttons.push_back(to_string(b));
    }
    ordered_json j;
    j["type"] = "state";
    j["t_ms"] = f.t_ms;
    j["gaze_target"] = optional_json(f.gaze_target);
    j["twist_deg"] = f.twist_deg;
    j["indicator_deg"] = f.indicator_deg;
    j["indicator_visible"] = f.indicator_visible;
    j["indicator_red"] = f.indicator_red;
    j["dwell_progress"] = f.dwell_progress;
    j["dwell_indicator_visible"] = f.dwell_indicator_visible;
    j["continuous_value"] = f.continuous_value;
    j["method"] = to_string(m.method);
    j["task_active"] = m.task_active;
    j["expected_button"] = optional_json(m.expected_button);
    j["buttons"] = std::move(buttons);
    return j;
  }
  ordered_json operator()(const Event& m) const {
    const InteractionEvent& e = m.event;
    ordered_json j;
    j["type"] = "event";
    j["t_ms"] = e.t_ms;
    j["kind"] = to_string(e.kind);
    j["target_id"] = e.target_id;
    if (e.direction) {
      j["direction"] = to_string(*e.direction);
    }
    if (e.value) {
      j["value"] = *e.value;
    }
    if (e.point) {
      j["point"] = {e.point->x, e.point->y, e.point->z};
    }
    if (m.log) {
      j["log"] = log_entry_to_json(*m.log);
    }
    return j;
  }
  ordered_json operator()(const TaskResultMsg& m) const {
    ordered_json j;
    j["type"] = "task_result";
    const ordered_json body = task_result_to_json(m.result);
    for (const auto& [key, value] : body.items()) {
      j[key] = value;
    }
    return j;
  }
  ordered_json operator()(const ErrorMsg& m) const {
    return {{"type", "error"}, {"code", m.code}, {"detail", m.detail}};
  }
};

ClientMessage decode_client_object(const json& j) {
  const std::string type = string(j, "type");
  if (type == "pose") {
    const double t = number(j, "t_ms");
    const json& q = require(j, "quat");
    if (!q.is_array() || q.size() != 4 ||
        !std::all_of(q.begin(), q.end(), [](const json& c) { return c.is_number(); })) {
      fail("bad_quat", "quat must be an array of 4 numbers [w, x, y, z]");
    }
    const double w = q[0].get<double>();
    const double x = q[1].get<double>();
    const double y = q[2].get<double>();
    const double z = q[3].get<double>();
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    if (!(std::abs(n - 1.0) <= kQuatTolerance)) {
      fail("bad_quat", "quaternion norm " + format_number(n) + " is not within 1e-3 of 1");
    }
    return Pose{t, UnitQuat::from_components(w, x, y, z)};
  }
  if (type == "set_method") {
    return SetMethod{method_field(j, "method")};
  }
  if (type == "set_config") {
    const json& patch = require(j, "config");
    if (!patch.is_object()) {
      fail("bad_field", "config must be an object");
    }
    try {
      merge_config(EngineConfig{}, patch);
    } catch (const Error& e) {
      fail("bad_field", e.what());
    }
    return SetConfig{patch};
  }
  if (type == "start_task") {
    return StartTask{};
  }
  if (type == "reset") {
    return Reset{};
  }
  fail("bad_type", "unknown message type '" + type + "'");
}

InteractionEvent::Kind event_kind(const std::string& name) {
  for (auto k : {InteractionEvent::Kind::Triggered, InteractionEvent::Kind::ValueCommitted,
                 InteractionEvent::Kind::Teleport}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  fail("bad_field", "unknown event kind '" + name + "'");
}

ServerMessage decode_server_object(const json& j) {
  const std::string type = string(j, "type");
  if (type == "state") {
    State s;
    s.frame.t_ms = number(j, "t_ms");
    s.frame.gaze_target = optional_id(j, "gaze_target");
    s.frame.twist_deg = number(j, "twist_deg");
    s.frame.indicator_deg = number(j, "indicator_deg");
    s.frame.indicator_visible = boolean(j, "indicator_visible");
    s.frame.indicator_red = boolean(j, "indicator_red");
    s.frame.dwell_progress = number(j, "dwell_progress");
    s.frame.dwell_indicator_visible = boolean(j, "dwell_indicator_visible");
    s.frame.continuous_value = number(j, "continuous_value");
    s.method = method_field(j, "method");
    s.task_active = boolean(j, "task_active");
    s.expected_button = optional_id(j, "expected_button");
    const json& buttons = require(j, "buttons");
    if (!buttons.is_array()) {
      fail("bad_field", "buttons must be an array");
    }
    for (const json& b : buttons) {
      const std::string name = b.is_string() ? b.get<std::string>() : std::string();
      if (name == "red") {
        s.buttons.push_back(ButtonState::Red);
      } else if (name == "gray") {
        s.buttons.push_back(ButtonState::Gray);
      } else if (name == "black") {
        s.buttons.push_back(ButtonState::Black);
      } else {
        fail("bad_field", "unknown button state");
      }
    }
    return s;
  }
  if (type == "event") {
    Event m;
    m.event.t_ms = number(j, "t_ms");
    m.event.kind = event_kind(string(j, "kind"));
    const auto id = optional_id(j, "target_id");
    if (!id) {
      fail("bad_field", "target_id must be an integer");
    }
    m.event.target_id = *id;
    if (j.contains("direction")) {
      const std::string d = string(j, "direction");
      if (d != "left" && d != "right") {
        fail("bad_field", "unknown direction");
      }
      m.event.direction = d == "left" ? Direction::Left : Direction::Right;
    }
    if (j.contains("value")) {
      m.event.value = number(j, "value");
    }
    if (j.contains("point")) {
      const json& p = j.at("point");
      if (!p.is_array() || p.size() != 3) {
        fail("bad_field", "point must be [x, y, z]");
      }
      m.event.point = Vec3{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    }
    if (j.contains("log")) {
      try {
        m.log = log_entry_from_json(j.at("log"));
      } catch (const Error& e) {
        fail("bad_field", e.what());
      }
    }
    return m;
  }
  if (type == "task_result") {
    TaskResultMsg m;
    m.result.method = method_field(j, "method");
    m.result.completed = boolean(j, "completed");
    m.result.false_positives = static_cast<int>(number(j, "false_positives"));
    m.result.mean_ms = optional_number(j, "mean_ms");
    m.result.sd_ms = optional_number(j, "sd_ms");
    const json& records = require(j, "records");
    if (!records.is_array()) {
      fail("bad_field", "records must be an array");
    }
    for (const json& r : records) {
      if (!r.is_object()) {
        fail("bad_field", "record must be an object");
      }
      SelectionRecord rec;
      rec.button = static_cast<int>(number(r, "button"));
      rec.t_ms = number(r, "t_ms");
      rec.elapsed_ms = number(r, "elapsed_ms");
      rec.counted = boolean(r, "counted");
      rec.method = m.result.method;
      m.result.records.push_back(rec);
    }
    return m;
  }
  if (type == "error") {
    return ErrorMsg{string(j, "code"), string(j, "detail")};
  }
  fail("bad_type", "unknown message type '" + type + "'");
}

std::string_view trim_newline(std::string_view text) {
  while (!text.empty() && (text.back() == '\n' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  return text;
}

}  // namespace

std::string_view to_string(ButtonState s) {
  switch (s) {
    case ButtonState::Red: return "red";
    case ButtonState::Gray: return "gray";
    case ButtonState::Black: return "black";
  }
  return "black";
}

std::string encode(const ClientMessage& msg) {
  return std::visit(ClientEncoder{}, msg).dump() + "\n";
}

std::string encode(const ServerMessage& msg) {
  return std::visit(ServerEncoder{}, msg).dump() + "\n";
}

std::variant<ClientMessage, DecodeError> decode_client(std::string_view text) {
  try {
    return decode_client_object(parse_object(trim_newline(text)));
  } catch (const Failure& f) {
    return f.error;
  } catch (const nlohmann::json::exception& e) {
    return DecodeError{"bad_field", e.what()};
  }
}

std::variant<ServerMessage, DecodeError> decode_server(std::string_view text) {
  try {
    return decode_server_object(parse_object(trim_newline(text)));
  } catch (const Failure& f) {
    return f.error;
  } catch (const nlohmann::json::exception& e) {
    return DecodeError{"bad_field", e.what()};
  }
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') {
      line.remove_suffix(1);
    }
    if (!line.empty()) {
      lines.push_back(line);
    }
    if (nl == std::string_view::npos) {
      break;
    }
    text.remove_prefix(nl + 1);
  }
  return lines;
}

}  // namespace twistsel::protocol
