#include "twistsel/session.hpp"

#include "twistsel/error.hpp"
#include "twistsel/io.hpp"

#include <algorithm>

namespace twistsel {

using namespace protocol;

void validate(const SessionConfig& config) {
  validate(config.engine);
  (void)build_scene(config.scene);
}

Session::Session(const SessionConfig& config)
    : scene_(build_scene(config.scene)),
      task_enabled_(config.task_enabled),
      engine_(config.method, config.engine) {}

void Session::restart_engine(Method method, const EngineConfig& config) {
  engine_ = Engine(method, config);
  task_.reset();
}

std::vector<ServerMessage> Session::handle(const ClientMessage& msg) {
  if (const auto* pose = std::get_if<Pose>(&msg)) {
    return on_pose(*pose);
  }
  if (const auto* m = std::get_if<SetMethod>(&msg)) {
    restart_engine(m->method, engine_.config());
    return {};
  }
  if (const auto* m = std::get_if<SetConfig>(&msg)) {
    try {
      const EngineConfig merged = merge_config(engine_.config(), m->patch);
      validate(merged);
      restart_engine(engine_.method(), merged);
    } catch (const Error& e) {
      return {ErrorMsg{"bad_config", e.what()}};
    }
    return {};
  }
  if (std::holds_alternative<StartTask>(msg)) {
    if (!task_enabled_) {
      return {ErrorMsg{"task_disabled", "this server does not run tasks"}};
    }
    restart_engine(engine_.method(), engine_.config());
    task_.emplace(make_sequential_task(scene_, engine_.method(), engine_.config()));
    return {};
  }
  // Reset also forgets the timestamp high-water mark so a client may
  // replay from t = 0.
  restart_engine(engine_.method(), engine_.config());
  last_t_.reset();
  return {};
}

std::vector<ServerMessage> Session::on_pose(const Pose& pose) {
  if (last_t_ && !(pose.t_ms > *last_t_)) {
    return {ErrorMsg{"trace_order", "t_ms " + format_number(pose.t_ms) +
                                        " does not follow " + format_number(*last_t_)}};
  }
  last_t_ = pose.t_ms;

  const PoseSample sample{pose.t_ms, pose.quat};
  std::vector<ServerMessage> out;
  StepResult step;
  std::vector<LogEntry> log;
  const bool was_active = task_active();
  if (task_) {
    TaskRunner::Output o = task_->feed(sample);
    step = std::move(o.step);
    log = std::move(o.log);
  } else {
    step = engine_.step(scene_, sample);
  }

  for (std::size_t i = 0; i < step.events.size(); ++i) {
    Event ev{step.events[i], std::nullopt};
    if (i < log.size()) {
      ev.log = log[i];
    }
    out.emplace_back(std::move(ev));
  }
  out.emplace_back(make_state(step.frame));
  if (was_active && task_->completed()) {
    out.emplace_back(TaskResultMsg{task_->result()});
  }
  return out;
}

State Session::make_state(const FrameState& frame) const {
  State s;
  s.frame = frame;
  s.method = engine_.method();
  s.task_active = task_active();
  const std::vector<TargetId> ids = scene_.button_ids();
  s.buttons.assign(ids.size(), ButtonState::Black);
  if (task_) {
    s.expected_button = task_->expected();
    const auto& sequence = task_->spec().sequence;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      const auto pos = std::find(sequence.begin(), sequence.end(), ids[i]);
      if (pos == sequence.end()) {
        continue;
      }
      const auto index = static_cast<std::size_t>(pos - sequence.begin());
      if (index < task_->progress()) {
        s.buttons[i] = ButtonState::Gray;
      } else if (index == task_->progress()) {
        s.buttons[i] = ButtonState::Red;
      }
    }
  }
  return s;
}

std::vector<ServerMessage> Session::handle_text(std::string_view text) {
  std::vector<ServerMessage> out;
  for (std::string_view line : split_lines(text)) {
    auto decoded = decode_client(line);
    if (const auto* err = std::get_if<DecodeError>(&decoded)) {
      out.emplace_back(ErrorMsg{err->code, err->detail});
      continue;
    }
    auto replies = handle(std::get<ClientMessage>(decoded));
    std::move(replies.begin(), replies.end(), std::back_inserter(out));
  }
  return out;
}

std::string Session::respond(std::string_view text) {
  std::string out;
  for (const ServerMessage& msg : handle_text(text)) {
    out += encode(msg);
  }
  return out;
}

}  // namespace twistsel
