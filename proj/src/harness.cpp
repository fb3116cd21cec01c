#include "twistsel/harness.hpp"

#include "twistsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace twistsel {

std::string_view to_string(LogEntry::Kind kind) {
  switch (kind) {
    case LogEntry::Kind::Correct: return "correct";
    case LogEntry::Kind::FalsePositive: return "false_positive";
    case LogEntry::Kind::Teleport: return "teleport";
    case LogEntry::Kind::Value: return "value";
  }
  return "correct";
}

std::optional<LogEntry::Kind> parse_log_kind(std::string_view name) {
  for (auto k : {LogEntry::Kind::Correct, LogEntry::Kind::FalsePositive, LogEntry::Kind::Teleport,
                 LogEntry::Kind::Value}) {
    if (to_string(k) == name) {
      return k;
    }
  }
  return std::nullopt;
}

Stats describe(std::span<const double> values) {
  Stats s;
  s.n = values.size();
  if (values.empty()) {
    return s;
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  s.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) {
      ss += (v - mean) * (v - mean);
    }
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

std::vector<double> TaskResult::counted_elapsed() const {
  std::vector<double> out;
  for (const SelectionRecord& r : records) {
    if (r.counted) {
      out.push_back(r.elapsed_ms);
    }
  }
  return out;
}

TaskSpec make_sequential_task(const Scene& scene, Method method, const EngineConfig& config) {
  return TaskSpec{scene.button_ids(), scene, method, config};
}

void validate(const TaskSpec& spec) {
  if (spec.sequence.empty()) {
    throw Error(ErrorCode::InvalidTask, "task sequence is empty");
  }
  for (TargetId id : spec.sequence) {
    const Target* t = spec.scene.find(id);
    if (t == nullptr || t->kind != TargetKind::Button) {
      throw Error(ErrorCode::InvalidTask, "sequence id " + std::to_string(id) +
                                              " is not a button of the scene");
    }
  }
  validate(spec.config);
}

namespace {

TaskSpec validated(TaskSpec spec) {
  validate(spec);
  return spec;
}

}  // namespace

TaskRunner::TaskRunner(TaskSpec spec)
    : spec_(validated(std::move(spec))), engine_(spec_.method, spec_.config) {}

std::optional<TargetId> TaskRunner::expected() const {
  if (completed()) {
    return std::nullopt;
  }
  return spec_.sequence[next_];
}

TaskRunner::Output TaskRunner::feed(const PoseSample& sample) {
  Output out;
  out.step = engine_.step(spec_.scene, sample);
  if (!first_t_) {
    first_t_ = sample.t_ms;
  }
  const Method method = engine_.method();

  for (const InteractionEvent& ev : out.step.events) {
    if (completed()) {
      break;
    }
    LogEntry entry;
    entry.t_ms = ev.t_ms;
    entry.method = method;
    entry.button = ev.target_id;
    entry.direction = ev.direction;

    switch (ev.kind) {
      case InteractionEvent::Kind::Teleport:
        entry.kind = LogEntry::Kind::Teleport;
        entry.point = ev.point;
        break;
      case InteractionEvent::Kind::ValueCommitted:
        entry.kind = LogEntry::Kind::Value;
        entry.value = ev.value;
        break;
      case InteractionEvent::Kind::Triggered:
        if (ev.target_id == spec_.sequence[next_]) {
          const bool first = !last_correct_t_.has_value();
          const double since = first ? *first_t_ : *last_correct_t_;
          SelectionRecord rec{ev.target_id, ev.t_ms, ev.t_ms - since, method, !first};
          records_.push_back(rec);
          last_correct_t_ = ev.t_ms;
          ++next_;
          entry.kind = LogEntry::Kind::Correct;
          entry.elapsed_ms = rec.elapsed_ms;
        } else {
          ++false_positives_;
          entry.kind = LogEntry::Kind::FalsePositive;
        }
        break;
    }
    log_.push_back(entry);
    out.log.push_back(entry);
  }
  return out;
}

TaskResult TaskRunner::result() const {
  TaskResult r;
  r.method = spec_.method;
  r.records = records_;
  r.false_positives = false_positives_;
  r.completed = completed();
  r.log = log_;
  const std::vector<double> elapsed = r.counted_elapsed();
  const Stats s = describe(elapsed);
  r.mean_ms = s.mean;
  r.sd_ms = s.sd;
  return r;
}

TaskResult run_task(const TaskSpec& spec, const Trace& trace) {
  if (trace.empty()) {
    throw Error(ErrorCode::EmptyTrace, "trace has no samples");
  }
  TaskRunner runner(spec);
  for (const PoseSample& sample : trace) {
    runner.feed(sample);
  }
  return runner.result();
}

AggregateSummary aggregate(std::span<const TaskResult> results) {
  if (results.empty()) {
    throw Error(ErrorCode::EmptyAggregate, "nothing to aggregate");
  }
  AggregateSummary summary;
  for (Method m : {Method::Dwell, Method::TwistBinary, Method::TwistDirectional,
                   Method::TwistContinuous}) {
    MethodSummary ms;
    ms.method = m;
    std::vector<double> means;
    std::vector<double> pooled;
    for (const TaskResult& r : results) {
      if (r.method != m) {
        continue;
      }
      ++ms.n_results;
      ms.false_positives += r.false_positives;
      const std::vector<double> elapsed = r.counted_elapsed();
      pooled.insert(pooled.end(), elapsed.begin(), elapsed.end());
      if (const auto mean = describe(elapsed).mean) {
        means.push_back(*mean);
      }
    }
    if (ms.n_results == 0) {
      continue;
    }
    const Stats across_results = describe(means);
    const Stats across_records = describe(pooled);
    ms.n_records = pooled.size();
    ms.mean_of_means_ms = across_results.mean;
    ms.sd_across_results_ms = across_results.sd;
    ms.pooled_mean_ms = across_records.mean;
    ms.sd_across_records_ms = across_records.sd;
    summary.total_false_positives += ms.false_positives;
    summary.methods.push_back(ms);
  }
  return summary;
}

}  // namespace twistsel
