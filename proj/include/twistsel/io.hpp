#pragma once

// File formats.
//
//   trace CSV   header `t_ms,qw,qx,qy,qz`, one sample per line, shortest
//               round-trip decimal for every number.
//   event log   JSON lines, one LogEntry per line.
//   summary     JSON document produced from an AggregateSummary.
//   scene       JSON document with the grid parameters and optional floor.

#include "twistsel/engine.hpp"
#include "twistsel/harness.hpp"
#include "twistsel/scene.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace twistsel {

inline constexpr std::string_view kTraceHeader = "t_ms,qw,qx,qy,qz";

/// Shortest decimal that parses back to exactly the same double.
std::string format_number(double v);

std::string format_trace_csv(std::span<const PoseSample> trace);

/// Throws ParseError (with the 1-based line number) for malformed lines or
/// quaternions whose norm is off by more than 1e-6, TraceOrder for
/// non-increasing timestamps, EmptyTrace when there are no samples.
Trace parse_trace_csv(std::istream& in);

Trace read_trace_csv(const std::filesystem::path& path);
void write_trace_csv(const std::filesystem::path& path, std::span<const PoseSample> trace);

nlohmann::ordered_json log_entry_to_json(const LogEntry& entry);
LogEntry log_entry_from_json(const nlohmann::json& j);

std::string format_event_log(std::span<const LogEntry> entries);

/// Throws ParseError with the offending line number.
std::vector<LogEntry> parse_event_log(std::istream& in);
std::vector<LogEntry> read_event_log(const std::filesystem::path& path);

/// Rebuilds the scored part of a task from its log: the first correct entry
/// is excluded from the statistics, false positives are counted. The
/// method is taken from the first entry. Throws ParseError if the log is
/// empty or mixes methods.
TaskResult task_result_from_log(std::span<const LogEntry> entries);

nlohmann::ordered_json summary_to_json(const AggregateSummary& summary);
nlohmann::ordered_json task_result_to_json(const TaskResult& result);

nlohmann::ordered_json scene_to_json(const SceneDesc& desc);
/// Throws ParseError on missing or mistyped fields.
SceneDesc scene_from_json(const nlohmann::json& j);

nlohmann::ordered_json config_to_json(const EngineConfig& config);
/// Overlays whichever config fields are present in j onto base. Unknown
/// keys are ignored; mistyped values throw ParseError. The result is not
/// validated.
EngineConfig merge_config(EngineConfig base, const nlohmann::json& j);

void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace twistsel
