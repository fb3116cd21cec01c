#pragma once

// The sequential selection task: targets must be triggered in a fixed order
// (1..16 on the default grid). Correct triggers are timed against the
// previous correct trigger; triggers on any other button count as false
// positives. The first correct selection is recorded but excluded from the
// statistics because it has no preceding selection to time against.

#include "twistsel/engine.hpp"
#include "twistsel/scene.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace twistsel {

struct TaskSpec {
  std::vector<TargetId> sequence;
  Scene scene;
  Method method = Method::Dwell;
  EngineConfig config;
};

/// Every button of the scene, in id order.
TaskSpec make_sequential_task(const Scene& scene, Method method, const EngineConfig& config);

/// Throws InvalidTask for an empty sequence or ids that are not buttons of
/// the scene, InvalidConfig for a bad engine config.
void validate(const TaskSpec& spec);

struct SelectionRecord {
  TargetId button = 0;
  double t_ms = 0.0;
  double elapsed_ms = 0.0;
  Method method = Method::Dwell;
  bool counted = true;
  friend bool operator==(const SelectionRecord&, const SelectionRecord&) = default;
};

/// One line of the event log.
struct LogEntry {
  enum class Kind { Correct, FalsePositive, Teleport, Value };

  double t_ms = 0.0;
  Method method = Method::Dwell;
  Kind kind = Kind::Correct;
  TargetId button = 0;
  std::optional<double> elapsed_ms;    // Correct only
  std::optional<double> value;         // Value only
  std::optional<Direction> direction;  // TwistDirectional triggers
  std::optional<Vec3> point;           // Teleport only

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

std::string_view to_string(LogEntry::Kind kind);
std::optional<LogEntry::Kind> parse_log_kind(std::string_view name);

/// Mean and sample (n-1) standard deviation; absent when undefined.
struct Stats {
  std::size_t n = 0;
  std::optional<double> mean;
  std::optional<double> sd;
};

Stats describe(std::span<const double> values);

struct TaskResult {
  Method method = Method::Dwell;
  std::vector<SelectionRecord> records;
  int false_positives = 0;
  std::optional<double> mean_ms;
  std::optional<double> sd_ms;
  bool completed = false;
  std::vector<LogEntry> log;

  /// elapsed_ms of the counted records.
  std::vector<double> counted_elapsed() const;

  friend bool operator==(const TaskResult&, const TaskResult&) = default;
};

/// Incremental form of run_task, used by live sessions.
class TaskRunner {
 public:
  /// Validates spec.
  explicit TaskRunner(TaskSpec spec);

  struct Output {
    StepResult step;
    std::vector<LogEntry> log;
  };

  /// Steps the engine. Events arriving after the sequence is exhausted are
  /// not scored.
  Output feed(const PoseSample& sample);

  bool completed() const { return next_ >= spec_.sequence.size(); }
  std::optional<TargetId> expected() const;
  std::size_t progress() const { return next_; }
  const TaskSpec& spec() const { return spec_; }
  Engine& engine() { return engine_; }

  TaskResult result() const;

 private:
  TaskSpec spec_;
  Engine engine_;
  std::size_t next_ = 0;
  std::optional<double> first_t_;
  std::optional<double> last_correct_t_;
  std::vector<SelectionRecord> records_;
  std::vector<LogEntry> log_;
  int false_positives_ = 0;
};

/// Feeds the whole trace through a fresh engine. Throws EmptyTrace,
/// TraceOrder, InvalidTask.
TaskResult run_task(const TaskSpec& spec, const Trace& trace);

/// Scripted ideal user.
struct UserParams {
  double look_speed_dps = 90.0;
  double roll_speed_dps = 60.0;
  double overshoot_deg = 1.0;
  double hold_ms = 50.0;
  double reaction_ms = 150.0;
  double noise_sigma_deg = 0.0;
  double sample_hz = 72.0;
  std::uint64_t seed = 0;
};

/// Throws InvalidTask on non-positive speeds, negative durations or noise,
/// or sample_hz < 30.
void validate(const UserParams& user);

/// Ideal-user trace for the task. For each target in order the gaze swings
/// along the great circle to the target center at look_speed, pauses for
/// reaction_ms, then either holds for dwell_ms (Dwell) or rolls to
/// threshold + overshoot at roll_speed, holds hold_ms and rolls back to
/// neutral (twist family). The head never rolls while travelling.
/// Optional seeded Gaussian noise perturbs yaw and pitch of every sample.
/// Samples are taken every 1000 / sample_hz ms from t = 0.
/// Throws InvalidTask for targets outside +-89 deg of pitch.
Trace synth_trace(const TaskSpec& spec, const UserParams& user);

struct MethodSummary {
  Method method = Method::Dwell;
  std::size_t n_results = 0;
  std::size_t n_records = 0;
  std::optional<double> mean_of_means_ms;
  std::optional<double> pooled_mean_ms;
  std::optional<double> sd_across_results_ms;
  std::optional<double> sd_across_records_ms;
  int false_positives = 0;
};

struct AggregateSummary {
  std::vector<MethodSummary> methods;  // in Method enum order, present ones only
  int total_false_positives = 0;
};

/// Groups results by method. Throws EmptyAggregate on empty input.
AggregateSummary aggregate(std::span<const TaskResult> results);

}  // namespace twistsel
