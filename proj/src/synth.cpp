#include "twistsel/error.hpp"
#include "twistsel/harness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

namespace twistsel {

namespace {

// One piece of the scripted head motion. Direction moves along the great
// circle from `from` to `to` while roll moves linearly from roll_from to
// roll_to; either may be constant.
struct Segment {
  double start_ms = 0.0;
  double duration_ms = 0.0;
  Vec3 from;
  Vec3 to;
  double roll_from = 0.0;
  double roll_to = 0.0;
};

double arc_deg(Vec3 a, Vec3 b) {
  return rad_to_deg(std::atan2(norm(cross(a, b)), dot(a, b)));
}

Vec3 slerp(Vec3 a, Vec3 b, double s) {
  const double omega = std::atan2(norm(cross(a, b)), dot(a, b));
  if (omega < 1e-12) {
    return b;
  }
  const double sin_omega = std::sin(omega);
  return normalized((std::sin((1.0 - s) * omega) / sin_omega) * a +
                    (std::sin(s * omega) / sin_omega) * b);
}

class Script {
 public:
  explicit Script(Vec3 start) : direction_(start) {}

  void travel(Vec3 to, double speed_dps) {
    const double duration = arc_deg(direction_, to) / speed_dps * 1000.0;
    push(duration, to, roll_, roll_);
    direction_ = to;
  }

  void hold(double duration) { push(duration, direction_, roll_, roll_); }

  void roll_to(double roll, double speed_dps) {
    const double duration = std::abs(roll - roll_) / speed_dps * 1000.0;
    push(duration, direction_, roll_, roll);
    roll_ = roll;
  }

  double end_ms() const { return end_; }

  /// Direction and roll at time t; segments are visited in order, so calls
  /// must use non-decreasing t.
  std::pair<Vec3, double> at(double t) {
    while (cursor_ < segments_.size() &&
           t > segments_[cursor_].start_ms + segments_[cursor_].duration_ms) {
      ++cursor_;
    }
    if (cursor_ >= segments_.size()) {
      return {direction_, roll_};
    }
    const Segment& seg = segments_[cursor_];
    const double s =
        seg.duration_ms > 0.0 ? std::clamp((t - seg.start_ms) / seg.duration_ms, 0.0, 1.0) : 1.0;
    return {slerp(seg.from, seg.to, s), seg.roll_from + s * (seg.roll_to - seg.roll_from)};
  }

 private:
  void push(double duration, Vec3 to, double roll_from, double roll_to) {
    if (duration <= 0.0) {
      return;
    }
    segments_.push_back({end_, duration, direction_, to, roll_from, roll_to});
    end_ += duration;
  }

  Vec3 direction_;
  double roll_ = 0.0;
  double end_ = 0.0;
  std::vector<Segment> segments_;
  std::size_t cursor_ = 0;
};

}  // namespace

void validate(const UserParams& u) {
  auto require = [](bool ok, const char* what) {
    if (!ok) {
      throw Error(ErrorCode::InvalidTask, what);
    }
  };
  require(std::isfinite(u.look_speed_dps) && u.look_speed_dps > 0.0, "look speed must be > 0");
  require(std::isfinite(u.roll_speed_dps) && u.roll_speed_dps > 0.0, "roll speed must be > 0");
  require(std::isfinite(u.overshoot_deg) && u.overshoot_deg >= 0.0, "overshoot must be >= 0");
  require(std::isfinite(u.hold_ms) && u.hold_ms >= 0.0, "hold must be >= 0");
  require(std::isfinite(u.reaction_ms) && u.reaction_ms >= 0.0, "reaction must be >= 0");
  require(std::isfinite(u.noise_sigma_deg) && u.noise_sigma_deg >= 0.0, "noise must be >= 0");
  require(std::isfinite(u.sample_hz) && u.sample_hz >= 30.0, "sample rate must be >= 30 Hz");
}

Trace synth_trace(const TaskSpec& spec, const UserParams& user) {
  validate(spec);
  validate(user);
  const EngineConfig& cfg = spec.config;

  Script script(kForward);
  for (TargetId id : spec.sequence) {
    const Target& target = *spec.scene.find(id);
    const Vec3 aim = normalized(target.center - spec.scene.eye());
    if (std::abs(heading_of(aim).pitch_deg) > 89.0) {
      throw Error(ErrorCode::InvalidTask,
                  "target " + std::to_string(id) + " is outside +-89 deg of pitch");
    }
    script.travel(aim, user.look_speed_dps);
    script.hold(user.reaction_ms);
    if (spec.method == Method::Dwell) {
      script.hold(cfg.dwell_ms);
    } else {
      script.roll_to(cfg.threshold_deg + user.overshoot_deg, user.roll_speed_dps);
      script.hold(user.hold_ms);
      script.roll_to(0.0, user.roll_speed_dps);
    }
  }

  std::mt19937_64 rng(user.seed);
  const bool noisy = user.noise_sigma_deg > 0.0;
  std::normal_distribution<double> noise(0.0, noisy ? user.noise_sigma_deg : 1.0);

  const double period = 1000.0 / user.sample_hz;
  const auto count = static_cast<std::size_t>(std::floor(script.end_ms() / period)) + 1;
  Trace trace;
  trace.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * 1000.0 / user.sample_hz;
    const auto [direction, roll] = script.at(t);
    Heading h = heading_of(direction);
    if (noisy) {
      h.yaw_deg += noise(rng);
      h.pitch_deg += noise(rng);
    }
    trace.push_back({t, from_yaw_pitch_roll(h.yaw_deg, h.pitch_deg, roll)});
  }
  return trace;
}

}  // namespace twistsel
