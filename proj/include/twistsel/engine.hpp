#pragma once

// Selection state machines driven purely by timestamped head poses.
//
// Dwell: holding the gaze ray on one target for dwell_ms triggers it once;
// the gaze must leave and come back before that target can fire again.
//
// Twist family: rolling the head past threshold_deg while gazing at a
// target triggers it. A trigger disarms the engine until the roll returns to
// at most rearm_ratio * threshold_deg. Arming depends on roll alone, so a
// head already rolled past the threshold fires on the first sample that
// lands on a target (pre-twist).

#include "twistsel/orientation.hpp"
#include "twistsel/scene.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace twistsel {

enum class Method { Dwell, TwistBinary, TwistDirectional, TwistContinuous };

std::string_view to_string(Method method);
/// Accepts the wire names: dwell, twist_binary, twist_directional,
/// twist_continuous.
std::optional<Method> parse_method(std::string_view name);

inline bool is_twist_family(Method m) { return m != Method::Dwell; }

struct ContinuousConfig {
  double deadzone_deg = 1.0;
  double max_deg = 30.0;
  double commit_hold_ms = 700.0;
  double commit_eps_deg = 0.5;
  friend bool operator==(const ContinuousConfig&, const ContinuousConfig&) = default;
};

struct EngineConfig {
  double dwell_ms = 780.0;
  double threshold_deg = 7.5;
  double rearm_ratio = 6.0 / 9.0;
  double indicator_max_deg = 45.0;
  bool allow_pre_twist = true;
  ContinuousConfig continuous;
  bool teleport_enabled = false;
  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// Throws InvalidConfig describing the first violated constraint.
void validate(const EngineConfig& config);

struct PoseSample {
  double t_ms = 0.0;
  UnitQuat orientation;
  friend bool operator==(const PoseSample&, const PoseSample&) = default;
};

using Trace = std::vector<PoseSample>;

enum class Direction { Left, Right };
std::string_view to_string(Direction d);

struct InteractionEvent {
  enum class Kind { Triggered, ValueCommitted, Teleport };

  double t_ms = 0.0;
  Kind kind = Kind::Triggered;
  TargetId target_id = 0;
  std::optional<Direction> direction;  // TwistDirectional only
  std::optional<double> value;         // TwistContinuous only
  std::optional<Vec3> point;           // Teleport only

  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

std::string_view to_string(InteractionEvent::Kind kind);

/// Per-sample feedback for renderers.
struct FrameState {
  double t_ms = 0.0;
  std::optional<TargetId> gaze_target;
  double twist_deg = 0.0;
  double indicator_deg = 0.0;
  bool indicator_visible = false;
  bool indicator_red = false;
  double dwell_progress = 0.0;
  bool dwell_indicator_visible = false;
  double continuous_value = 0.0;

  friend bool operator==(const FrameState&, const FrameState&) = default;
};

struct ContinuousAccumulator {
  bool active = false;
  double last_stable_t = 0.0;
  double stable_twist_deg = 0.0;
  double last_value = 0.0;
  bool committed = false;
};

struct EngineState {
  Method method = Method::Dwell;
  EngineConfig config;
  std::optional<TargetId> current_gaze;
  double gaze_enter_t = 0.0;
  bool armed = true;
  bool dwell_blocked = false;
  ContinuousAccumulator continuous;
  double last_twist_deg = 0.0;
  std::optional<double> last_t;
};

struct StepResult {
  FrameState frame;
  std::vector<InteractionEvent> events;
  friend bool operator==(const StepResult&, const StepResult&) = default;
};

/// Slack on the trigger and re-arm comparisons. A pose built with a roll of
/// exactly the threshold decomposes to within a few ulps of it, on either
/// side.
inline constexpr double kAngleTolerance = 1e-9;

/// Twist mapped onto the crosshair: full indicator_max_deg exactly at the
/// trigger threshold, clamped beyond it.
double indicator_angle(double twist_deg, const EngineConfig& config);

/// Continuous control value in [-1, 1]; zero inside the deadzone.
double continuous_value(double twist_deg, const ContinuousConfig& config);

class Engine {
 public:
  /// Throws InvalidConfig.
  Engine(Method method, const EngineConfig& config);

  /// Advances by one sample. Throws TraceOrder unless sample.t_ms is finite
  /// and strictly greater than the previous sample's.
  StepResult step(const Scene& scene, const PoseSample& sample);

  /// Switches technique and resets timers, arming and gaze. The timestamp
  /// high-water mark is kept so a stream stays monotone across switches.
  void set_method(Method method);

  /// Validates, then replaces the config with the same reset as set_method.
  void set_config(const EngineConfig& config);

  const EngineState& state() const { return state_; }
  Method method() const { return state_.method; }
  const EngineConfig& config() const { return state_.config; }

 private:
  void reset_interaction();
  void step_dwell(double t, std::optional<TargetId> gaze, StepResult& out);
  void step_twist(double t, const std::optional<Hit>& hit, const Scene& scene, double abs_twist,
                  double twist, StepResult& out);
  void step_continuous(double t, std::optional<TargetId> gaze, double twist, StepResult& out);

  EngineState state_;
};

}  // namespace twistsel
