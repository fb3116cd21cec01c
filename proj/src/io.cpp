#include "twistsel/io.hpp"

#include "twistsel/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <system_error>

namespace twistsel {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

Error parse_error(std::size_t line, const std::string& what) {
  return Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what);
}

bool parse_double(std::string_view field, double& out) {
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last && std::isfinite(out);
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') {
    line.pop_back();
  }
  return line;
}

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

template <typename T>
T get_field(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::ParseError, std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
void overlay(const json& j, const char* key, T& target) {
  if (j.contains(key)) {
    target = get_field<T>(j, key);
  }
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_trace_csv(std::span<const PoseSample> trace) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const PoseSample& s : trace) {
    const UnitQuat& q = s.orientation;
    out += format_number(s.t_ms);
    for (double c : {q.w(), q.x(), q.y(), q.z()}) {
      out += ',';
      out += format_number(c);
    }
    out += '\n';
  }
  return out;
}

Trace parse_trace_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::EmptyTrace, "trace file is empty");
  }
  ++line_no;
  if (strip_cr(line) != kTraceHeader) {
    throw parse_error(line_no, "expected header '" + std::string(kTraceHeader) + "'");
  }

  Trace trace;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    double values[5];
    std::size_t field = 0;
    std::size_t begin = 0;
    while (true) {
      const std::size_t comma = line.find(',', begin);
      const std::string_view text =
          std::string_view(line).substr(begin, comma == std::string::npos ? std::string::npos
                                                                          : comma - begin);
      if (field >= 5 || !parse_double(text, values[field])) {
        throw parse_error(line_no, "expected 5 finite numbers");
      }
      ++field;
      if (comma == std::string::npos) {
        break;
      }
      begin = comma + 1;
    }
    if (field != 5) {
      throw parse_error(line_no, "expected 5 finite numbers");
    }
    const double n = std::sqrt(values[1] * values[1] + values[2] * values[2] +
                               values[3] * values[3] + values[4] * values[4]);
    if (std::abs(n - 1.0) > 1e-6) {
      throw parse_error(line_no, "quaternion is not unit length");
    }
    if (!trace.empty() && !(values[0] > trace.back().t_ms)) {
      throw Error(ErrorCode::TraceOrder,
                  "line " + std::to_string(line_no) + ": t_ms " + format_number(values[0]) +
                      " does not increase");
    }
    trace.push_back(
        {values[0], UnitQuat::from_components(values[1], values[2], values[3], values[4])});
  }
  if (trace.empty()) {
    throw Error(ErrorCode::EmptyTrace, "trace has no samples");
  }
  return trace;
}

Trace read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  }
  return parse_trace_csv(in);
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::ParseError, "cannot write " + path.string());
  }
  out << text;
}

void write_trace_csv(const std::filesystem::path& path, std::span<const PoseSample> trace) {
  write_text(path, format_trace_csv(trace));
}

ordered_json log_entry_to_json(const LogEntry& e) {
  ordered_json j;
  j["t_ms"] = e.t_ms;
  j["method"] = to_string(e.method);
  j["kind"] = to_string(e.kind);
  j["button"] = e.button;
  if (e.elapsed_ms) {
    j["elapsed_ms"] = *e.elapsed_ms;
  }
  if (e.value) {
    j["value"] = *e.value;
  }
  if (e.direction) {
    j["direction"] = to_string(*e.direction);
  }
  if (e.point) {
    j["point"] = {e.point->x, e.point->y, e.point->z};
  }
  return j;
}

LogEntry log_entry_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ParseError, "log entry is not an object");
  }
  LogEntry e;
  e.t_ms = get_field<double>(j, "t_ms");
  const auto method = parse_method(get_field<std::string>(j, "method"));
  if (!method) {
    throw Error(ErrorCode::ParseError, "unknown method");
  }
  e.method = *method;
  const auto kind = parse_log_kind(get_field<std::string>(j, "kind"));
  if (!kind) {
    throw Error(ErrorCode::ParseError, "unknown kind");
  }
  e.kind = *kind;
  e.button = get_field<int>(j, "button");
  if (j.contains("elapsed_ms")) {
    e.elapsed_ms = get_field<double>(j, "elapsed_ms");
  }
  if (j.contains("value")) {
    e.value = get_field<double>(j, "value");
  }
  if (j.contains("direction")) {
    const auto d = get_field<std::string>(j, "direction");
    if (d != "left" && d != "right") {
      throw Error(ErrorCode::ParseError, "unknown direction");
    }
    e.direction = d == "left" ? Direction::Left : Direction::Right;
  }
  if (j.contains("point")) {
    const auto p = get_field<std::vector<double>>(j, "point");
    if (p.size() != 3) {
      throw Error(ErrorCode::ParseError, "point needs 3 components");
    }
    e.point = Vec3{p[0], p[1], p[2]};
  }
  if (e.kind == LogEntry::Kind::Correct && !e.elapsed_ms) {
    throw Error(ErrorCode::ParseError, "correct entry without elapsed_ms");
  }
  return e;
}

std::string format_event_log(std::span<const LogEntry> entries) {
  std::string out;
  for (const LogEntry& e : entries) {
    out += log_entry_to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<LogEntry> parse_event_log(std::istream& in) {
  std::vector<LogEntry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) {
      continue;
    }
    try {
      entries.push_back(log_entry_from_json(json::parse(line)));
    } catch (const json::exception& ex) {
      throw parse_error(line_no, ex.what());
    } catch (const Error& ex) {
      throw parse_error(line_no, ex.what());
    }
  }
  return entries;
}

std::vector<LogEntry> read_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  }
  return parse_event_log(in);
}

TaskResult task_result_from_log(std::span<const LogEntry> entries) {
  if (entries.empty()) {
    throw Error(ErrorCode::ParseError, "event log has no entries");
  }
  TaskResult r;
  r.method = entries.front().method;
  bool first = true;
  for (const LogEntry& e : entries) {
    if (e.method != r.method) {
      throw Error(ErrorCode::ParseError, "event log mixes methods");
    }
    if (e.kind == LogEntry::Kind::Correct) {
      r.records.push_back({e.button, e.t_ms, e.elapsed_ms.value_or(0.0), e.method, !first});
      first = false;
    } else if (e.kind == LogEntry::Kind::FalsePositive) {
      ++r.false_positives;
    }
  }
  r.log.assign(entries.begin(), entries.end());
  const std::vector<double> elapsed = r.counted_elapsed();
  const Stats s = describe(elapsed);
  r.mean_ms = s.mean;
  r.sd_ms = s.sd;
  return r;
}

ordered_json summary_to_json(const AggregateSummary& summary) {
  ordered_json methods = ordered_json::array();
  for (const MethodSummary& m : summary.methods) {
    ordered_json j;
    j["method"] = to_string(m.method);
    j["n_results"] = m.n_results;
    j["n_records"] = m.n_records;
    j["mean_of_means_ms"] = optional_number(m.mean_of_means_ms);
    j["pooled_mean_ms"] = optional_number(m.pooled_mean_ms);
    j["sd_across_results_ms"] = optional_number(m.sd_across_results_ms);
    j["sd_across_records_ms"] = optional_number(m.sd_across_records_ms);
    j["false_positives"] = m.false_positives;
    methods.push_back(std::move(j));
  }
  ordered_json out;
  out["methods"] = std::move(methods);
  out["total_false_positives"] = summary.total_false_positives;
  return out;
}

ordered_json task_result_to_json(const TaskResult& r) {
  ordered_json records = ordered_json::array();
  for (const SelectionRecord& rec : r.records) {
    ordered_json j;
    j["button"] = rec.button;
    j["t_ms"] = rec.t_ms;
    j["elapsed_ms"] = rec.elapsed_ms;
    j["counted"] = rec.counted;
    records.push_back(std::move(j));
  }
  ordered_json out;
  out["method"] = to_string(r.method);
  out["completed"] = r.completed;
  out["false_positives"] = r.false_positives;
  out["mean_ms"] = optional_number(r.mean_ms);
  out["sd_ms"] = optional_number(r.sd_ms);
  out["records"] = std::move(records);
  return out;
}

ordered_json scene_to_json(const SceneDesc& d) {
  ordered_json j;
  j["rows"] = d.rows;
  j["cols"] = d.cols;
  j["cell_width_m"] = d.cell_width_m;
  j["cell_height_m"] = d.cell_height_m;
  j["gap_m"] = d.gap_m;
  j["distance_m"] = d.distance_m;
  if (d.floor) {
    j["floor"] = {{"height_m", d.floor->height_m}, {"extent_m", d.floor->extent_m}};
  }
  return j;
}

SceneDesc scene_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ParseError, "scene is not an object");
  }
  SceneDesc d;
  d.rows = get_field<int>(j, "rows");
  d.cols = get_field<int>(j, "cols");
  d.cell_width_m = get_field<double>(j, "cell_width_m");
  d.cell_height_m = get_field<double>(j, "cell_height_m");
  d.gap_m = get_field<double>(j, "gap_m");
  d.distance_m = get_field<double>(j, "distance_m");
  if (j.contains("floor") && !j.at("floor").is_null()) {
    const json& f = j.at("floor");
    if (!f.is_object()) {
      throw Error(ErrorCode::ParseError, "floor is not an object");
    }
    d.floor = FloorDesc{get_field<double>(f, "height_m"), get_field<double>(f, "extent_m")};
  }
  return d;
}

ordered_json config_to_json(const EngineConfig& c) {
  ordered_json j;
  j["dwell_ms"] = c.dwell_ms;
  j["threshold_deg"] = c.threshold_deg;
  j["rearm_ratio"] = c.rearm_ratio;
  j["indicator_max_deg"] = c.indicator_max_deg;
  j["allow_pre_twist"] = c.allow_pre_twist;
  j["continuous"] = {{"deadzone_deg", c.continuous.deadzone_deg},
                     {"max_deg", c.continuous.max_deg},
                     {"commit_hold_ms", c.continuous.commit_hold_ms},
                     {"commit_eps_deg", c.continuous.commit_eps_deg}};
  j["teleport_enabled"] = c.teleport_enabled;
  return j;
}

EngineConfig merge_config(EngineConfig base, const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::ParseError, "config is not an object");
  }
  overlay(j, "dwell_ms", base.dwell_ms);
  overlay(j, "threshold_deg", base.threshold_deg);
  overlay(j, "rearm_ratio", base.rearm_ratio);
  overlay(j, "indicator_max_deg", base.indicator_max_deg);
  overlay(j, "allow_pre_twist", base.allow_pre_twist);
  overlay(j, "teleport_enabled", base.teleport_enabled);
  if (j.contains("continuous")) {
    const json& k = j.at("continuous");
    if (!k.is_object()) {
      throw Error(ErrorCode::ParseError, "continuous is not an object");
    }
    overlay(k, "deadzone_deg", base.continuous.deadzone_deg);
    overlay(k, "max_deg", base.continuous.max_deg);
    overlay(k, "commit_hold_ms", base.continuous.commit_hold_ms);
    overlay(k, "commit_eps_deg", base.continuous.commit_eps_deg);
  }
  return base;
}

}  // namespace twistsel
