#include "twistsel/engine.hpp"

#include "twistsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twistsel {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Dwell: return "dwell";
    case Method::TwistBinary: return "twist_binary";
    case Method::TwistDirectional: return "twist_directional";
    case Method::TwistContinuous: return "twist_continuous";
  }
  return "dwell";
}

std::optional<Method> parse_method(std::string_view name) {
  for (Method m : {Method::Dwell, Method::TwistBinary, Method::TwistDirectional,
                   Method::TwistContinuous}) {
    if (to_string(m) == name) {
      return m;
    }
  }
  return std::nullopt;
}

std::string_view to_string(Direction d) { return d == Direction::Left ? "left" : "right"; }

std::string_view to_string(InteractionEvent::Kind kind) {
  switch (kind) {
    case InteractionEvent::Kind::Triggered: return "triggered";
    case InteractionEvent::Kind::ValueCommitted: return "value_committed";
    case InteractionEvent::Kind::Teleport: return "teleport";
  }
  return "triggered";
}

void validate(const EngineConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw Error(ErrorCode::InvalidConfig, what);
    }
  };
  require(std::isfinite(c.dwell_ms) && c.dwell_ms > 0.0, "dwell_ms must be > 0");
  require(std::isfinite(c.threshold_deg) && c.threshold_deg > 0.0 && c.threshold_deg < 90.0,
          "threshold_deg must be in (0, 90)");
  require(std::isfinite(c.rearm_ratio) && c.rearm_ratio > 0.0 && c.rearm_ratio <= 1.0,
          "rearm_ratio must be in (0, 1]");
  require(std::isfinite(c.indicator_max_deg) && c.indicator_max_deg > 0.0,
          "indicator_max_deg must be > 0");
  const ContinuousConfig& k = c.continuous;
  require(std::isfinite(k.deadzone_deg) && k.deadzone_deg >= 0.0, "deadzone_deg must be >= 0");
  require(std::isfinite(k.max_deg) && k.deadzone_deg < k.max_deg,
          "continuous deadzone_deg must be below max_deg");
  require(std::isfinite(k.commit_hold_ms) && k.commit_hold_ms > 0.0,
          "commit_hold_ms must be > 0");
  require(std::isfinite(k.commit_eps_deg) && k.commit_eps_deg >= 0.0,
          "commit_eps_deg must be >= 0");
}

double indicator_angle(double twist_deg, const EngineConfig& config) {
  const double scaled = twist_deg * config.indicator_max_deg / config.threshold_deg;
  return std::clamp(scaled, -config.indicator_max_deg, config.indicator_max_deg);
}

double continuous_value(double twist_deg, const ContinuousConfig& config) {
  const double magnitude = std::abs(twist_deg);
  if (magnitude <= config.deadzone_deg) {
    return 0.0;
  }
  const double v = (magnitude - config.deadzone_deg) / (config.max_deg - config.deadzone_deg);
  return std::copysign(std::min(v, 1.0), twist_deg);
}

Engine::Engine(Method method, const EngineConfig& config) {
  validate(config);
  state_.method = method;
  state_.config = config;
}

void Engine::reset_interaction() {
  state_.current_gaze.reset();
  state_.gaze_enter_t = 0.0;
  state_.armed = true;
  state_.dwell_blocked = false;
  state_.continuous = ContinuousAccumulator{};
  state_.last_twist_deg = 0.0;
}

void Engine::set_method(Method method) {
  state_.method = method;
  reset_interaction();
}

void Engine::set_config(const EngineConfig& config) {
  validate(config);
  state_.config = config;
  reset_interaction();
}

StepResult Engine::step(const Scene& scene, const PoseSample& sample) {
  const double t = sample.t_ms;
  if (!std::isfinite(t)) {
    throw Error(ErrorCode::TraceOrder, "timestamp is not finite");
  }
  if (state_.last_t && !(t > *state_.last_t)) {
    throw Error(ErrorCode::TraceOrder, "timestamp " + std::to_string(t) +
                                           " does not follow " + std::to_string(*state_.last_t));
  }
  state_.last_t = t;

  const Method method = state_.method;
  const EngineConfig& cfg = state_.config;

  std::optional<Hit> hit = raycast(scene, sample.orientation);
  if (hit) {
    const Target* target = scene.find(hit->target_id);
    const bool floor_usable = cfg.teleport_enabled && (method == Method::TwistBinary ||
                                                       method == Method::TwistDirectional);
    if (target->kind == TargetKind::Floor && !floor_usable) {
      hit.reset();
    }
  }
  const std::optional<TargetId> gaze =
      hit ? std::optional<TargetId>(hit->target_id) : std::nullopt;

  const double twist = twist_angle_deg(sample.orientation);

  StepResult out;
  out.frame.t_ms = t;
  out.frame.gaze_target = gaze;
  out.frame.twist_deg = twist;
  out.frame.indicator_deg = indicator_angle(twist, cfg);

  switch (method) {
    case Method::Dwell:
      step_dwell(t, gaze, out);
      break;
    case Method::TwistBinary:
    case Method::TwistDirectional:
      step_twist(t, hit, scene, std::abs(twist), twist, out);
      break;
    case Method::TwistContinuous:
      step_continuous(t, gaze, twist, out);
      break;
  }

  state_.last_twist_deg = twist;
  return out;
}

void Engine::step_dwell(double t, std::optional<TargetId> gaze, StepResult& out) {
  const double dwell = state_.config.dwell_ms;
  if (gaze != state_.current_gaze) {
    // Looking away or at another target restarts the timer.
    state_.current_gaze = gaze;
    state_.gaze_enter_t = t;
    state_.dwell_blocked = false;
  }
  if (!gaze || state_.dwell_blocked) {
    return;
  }

  const double elapsed = t - state_.gaze_enter_t;
  if (elapsed >= dwell) {
    out.events.push_back({t, InteractionEvent::Kind::Triggered, *gaze, {}, {}, {}});
    state_.dwell_blocked = true;
    out.frame.dwell_progress = 1.0;
    out.frame.dwell_indicator_visible = true;
    return;
  }
  const double half = 0.5 * dwell;
  out.frame.dwell_indicator_visible = elapsed >= half;
  out.frame.dwell_progress = std::clamp((elapsed - half) / half, 0.0, 1.0);
}

void Engine::step_twist(double t, const std::optional<Hit>& hit, const Scene& scene,
                        double abs_twist, double twist, StepResult& out) {
  const EngineConfig& cfg = state_.config;
  const std::optional<TargetId> gaze =
      hit ? std::optional<TargetId>(hit->target_id) : std::nullopt;
  const std::optional<TargetId> previous_gaze = state_.current_gaze;
  if (gaze != state_.current_gaze) {
    state_.current_gaze = gaze;
    state_.gaze_enter_t = t;
  }

  if (!state_.armed && abs_twist <= cfg.rearm_ratio * cfg.threshold_deg + kAngleTolerance) {
    state_.armed = true;
  }

  // Without the pre-twist allowance the threshold must be crossed while the
  // gaze is already on the target.
  const bool crossed_here = previous_gaze == gaze &&
                            std::abs(state_.last_twist_deg) < cfg.threshold_deg - kAngleTolerance;
  if (gaze && state_.armed && abs_twist >= cfg.threshold_deg - kAngleTolerance &&
      (cfg.allow_pre_twist || crossed_here)) {
    InteractionEvent ev;
    ev.t_ms = t;
    ev.target_id = *gaze;
    if (scene.find(*gaze)->kind == TargetKind::Floor) {
      ev.kind = InteractionEvent::Kind::Teleport;
      ev.point = hit->point;
    } else if (state_.method == Method::TwistDirectional) {
      ev.direction = twist > 0.0 ? Direction::Right : Direction::Left;
    }
    out.events.push_back(ev);
    state_.armed = false;
  }

  out.frame.indicator_visible = gaze.has_value();
  out.frame.indicator_red = gaze.has_value() && !state_.armed;
}

void Engine::step_continuous(double t, std::optional<TargetId> gaze, double twist,
                             StepResult& out) {
  const ContinuousConfig& cfg = state_.config.continuous;
  ContinuousAccumulator& acc = state_.continuous;

  if (gaze != state_.current_gaze) {
    if (acc.active && !acc.committed) {
      out.events.push_back({t, InteractionEvent::Kind::ValueCommitted, *state_.current_gaze, {},
                            acc.last_value, {}});
    }
    acc = ContinuousAccumulator{};
    state_.current_gaze = gaze;
    state_.gaze_enter_t = t;
  }
  if (!gaze) {
    return;
  }

  const double value = continuous_value(twist, cfg);
  if (!acc.active) {
    acc.active = true;
    acc.stable_twist_deg = twist;
    acc.last_stable_t = t;
  } else if (std::abs(twist - acc.stable_twist_deg) > cfg.commit_eps_deg) {
    acc.stable_twist_deg = twist;
    acc.last_stable_t = t;
    acc.committed = false;
  } else if (!acc.committed && t - acc.last_stable_t >= cfg.commit_hold_ms) {
    out.events.push_back(
        {t, InteractionEvent::Kind::ValueCommitted, *gaze, {}, value, {}});
    acc.committed = true;
  }
  acc.last_value = value;

  out.frame.continuous_value = value;
  out.frame.indicator_visible = true;
}

}  // namespace twistsel
