#include "cli.hpp"

#include "twistsel/error.hpp"
#include "twistsel/harness.hpp"
#include "twistsel/io.hpp"
#include "twistsel/scene.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace twistsel::cli {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Flags {
  std::string method = "dwell";
  EngineConfig engine;
  bool no_pre_twist = false;
  bool teleport = false;

  std::string grid = "4x4";
  double cell_m = 0.35;
  double gap_m = 0.10;
  double distance_m = 2.0;

  UserParams user;

  std::string trace;
  std::string log;
  std::string out;
  std::string port;
  unsigned threads = 2;
  std::vector<std::string> logs;
};

void add_engine_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--method", f.method,
                 "dwell | twist_binary | twist_directional | twist_continuous")
      ->capture_default_str();
  sub.add_option("--dwell-ms", f.engine.dwell_ms, "Dwell time")->capture_default_str();
  sub.add_option("--threshold-deg", f.engine.threshold_deg, "Twist trigger angle")
      ->capture_default_str();
  sub.add_option("--rearm-ratio", f.engine.rearm_ratio,
                 "Twist must fall to ratio * threshold to re-arm")
      ->capture_default_str();
  sub.add_option("--indicator-max-deg", f.engine.indicator_max_deg,
                 "Indicator rotation at the threshold")
      ->capture_default_str();
  sub.add_flag("--no-pre-twist", f.no_pre_twist,
               "Require the threshold crossing to happen while looking at the target");
  sub.add_flag("--teleport", f.teleport, "Add a floor that twist methods can teleport to");
}

void add_scene_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--grid", f.grid, "Button grid as RxC")->capture_default_str();
  sub.add_option("--cell-m", f.cell_m, "Button edge length")->capture_default_str();
  sub.add_option("--gap-m", f.gap_m, "Space between buttons")->capture_default_str();
  sub.add_option("--distance-m", f.distance_m, "Distance of the button plane")
      ->capture_default_str();
}

void add_user_flags(CLI::App& sub, Flags& f) {
  sub.add_option("--look-speed", f.user.look_speed_dps, "Head turn speed, deg/s")
      ->capture_default_str();
  sub.add_option("--roll-speed", f.user.roll_speed_dps, "Head roll speed, deg/s")
      ->capture_default_str();
  sub.add_option("--noise-sigma", f.user.noise_sigma_deg, "Yaw/pitch noise SD, deg")
      ->capture_default_str();
  sub.add_option("--sample-hz", f.user.sample_hz, "Pose sample rate")->capture_default_str();
  sub.add_option("--seed", f.user.seed, "Noise seed")->capture_default_str();
  sub.add_option("--reaction-ms", f.user.reaction_ms, "Pause after reaching a target")
      ->capture_default_str();
  sub.add_option("--hold-ms", f.user.hold_ms, "Time the twist is held")->capture_default_str();
  sub.add_option("--overshoot-deg", f.user.overshoot_deg, "Roll beyond the threshold")
      ->capture_default_str();
}

Method method_of(const Flags& f) {
  const auto m = parse_method(f.method);
  if (!m) {
    throw UsageError("unknown method '" + f.method + "'");
  }
  return *m;
}

SceneDesc scene_of(const Flags& f) {
  SceneDesc desc;
  const std::string& g = f.grid;
  const auto x = g.find_first_of("xX");
  auto parse_int = [&](std::string_view s, int& v) {
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc() && p == s.data() + s.size() && !s.empty();
  };
  if (x == std::string::npos ||
      !parse_int(std::string_view(g).substr(0, x), desc.rows) ||
      !parse_int(std::string_view(g).substr(x + 1), desc.cols)) {
    throw UsageError("--grid expects RxC, got '" + g + "'");
  }
  desc.cell_width_m = f.cell_m;
  desc.cell_height_m = f.cell_m;
  desc.gap_m = f.gap_m;
  desc.distance_m = f.distance_m;
  if (f.teleport) {
    desc.floor = FloorDesc{};
  }
  return desc;
}

EngineConfig engine_of(const Flags& f) {
  EngineConfig c = f.engine;
  c.allow_pre_twist = !f.no_pre_twist;
  c.teleport_enabled = f.teleport;
  return c;
}

// Everything derived from flags is validated here so that bad values are
// reported as usage errors rather than runtime failures.
TaskSpec task_of(const Flags& f) {
  try {
    const Scene scene = build_scene(scene_of(f));
    TaskSpec spec = make_sequential_task(scene, method_of(f), engine_of(f));
    validate(spec);
    return spec;
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

UserParams user_of(const Flags& f) {
  try {
    validate(f.user);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return f.user;
}

std::string ms(const std::optional<double>& v) {
  if (!v) {
    return "-";
  }
  std::ostringstream s;
  s << std::fixed << std::setprecision(1) << *v;
  return s.str();
}

void print_result(std::ostream& out, const TaskResult& r) {
  const std::size_t total = r.records.size();
  out << "method           " << to_string(r.method) << '\n'
      << "selections       " << total << (r.completed ? " (completed)" : " (incomplete)") << '\n'
      << "mean_ms          " << ms(r.mean_ms) << '\n'
      << "sd_ms            " << ms(r.sd_ms) << '\n'
      << "false_positives  " << r.false_positives << '\n';
}

void print_table(std::ostream& out, const AggregateSummary& s) {
  out << std::left << std::setw(20) << "method" << std::right << std::setw(8) << "logs"
      << std::setw(9) << "records" << std::setw(11) << "mean_ms" << std::setw(13)
      << "sd_logs_ms" << std::setw(15) << "sd_records_ms" << std::setw(8) << "fp" << '\n';
  for (const MethodSummary& m : s.methods) {
    out << std::left << std::setw(20) << to_string(m.method) << std::right << std::setw(8)
        << m.n_results << std::setw(9) << m.n_records << std::setw(11) << ms(m.pooled_mean_ms)
        << std::setw(13) << ms(m.sd_across_results_ms) << std::setw(15)
        << ms(m.sd_across_records_ms) << std::setw(8) << m.false_positives << '\n';
  }
  out << "total false positives: " << s.total_false_positives << '\n';
}

void write_outputs(const Flags& f, const TaskResult& r) {
  if (!f.log.empty()) {
    write_text(f.log, format_event_log(r.log));
  }
  if (!f.out.empty()) {
    const std::vector<TaskResult> one{r};
    write_text(f.out, summary_to_json(aggregate(one)).dump(2) + "\n");
  }
}

int do_simulate(const Flags& f, std::ostream& out) {
  const TaskSpec spec = task_of(f);
  const UserParams user = user_of(f);
  const Trace trace = synth_trace(spec, user);
  if (!f.trace.empty()) {
    write_trace_csv(f.trace, trace);
  }
  const TaskResult r = run_task(spec, trace);
  write_outputs(f, r);
  print_result(out, r);
  return kExitOk;
}

int do_replay(const Flags& f, std::ostream& out) {
  const TaskSpec spec = task_of(f);
  const Trace trace = read_trace_csv(f.trace);
  const TaskResult r = run_task(spec, trace);
  write_outputs(f, r);
  print_result(out, r);
  return kExitOk;
}

int do_gen_trace(const Flags& f, std::ostream& out) {
  const TaskSpec spec = task_of(f);
  const Trace trace = synth_trace(spec, user_of(f));
  write_trace_csv(f.out, trace);
  out << "wrote " << trace.size() << " samples to " << f.out << '\n';
  return kExitOk;
}

int do_report(const Flags& f, std::ostream& out) {
  std::vector<TaskResult> results;
  for (const std::string& path : f.logs) {
    try {
      results.push_back(task_result_from_log(read_event_log(path)));
    } catch (const Error& e) {
      throw Error(e.code(), path + ": " + e.what());
    }
  }
  const AggregateSummary summary = aggregate(results);
  print_table(out, summary);
  if (!f.out.empty()) {
    write_text(f.out, summary_to_json(summary).dump(2) + "\n");
  }
  return kExitOk;
}

unsigned short port_of(const Flags& f) {
  std::string text = f.port;
  std::string source = "--port";
  if (text.empty()) {
    if (const char* env = std::getenv("TWISTSEL_PORT"); env != nullptr && *env != '\0') {
      text = env;
      source = "TWISTSEL_PORT";
    } else {
      return kDefaultPort;
    }
  }
  unsigned long v = 0;
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size() || v > 65535) {
    throw UsageError(source + ": bad port '" + text + "'");
  }
  return static_cast<unsigned short>(v);
}

int do_serve(const Flags& f, std::ostream& out, const ListenHook& on_listen) {
  SessionConfig config;
  config.port = port_of(f);
  config.method = method_of(f);
  config.engine = engine_of(f);
  try {
    config.scene = scene_of(f);
    validate(config);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  Server server(config, f.threads);
  unsigned short port = 0;
  try {
    port = server.start();
  } catch (const std::system_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  out << "listening on ws://127.0.0.1:" << port << std::endl;
  if (on_listen) {
    on_listen(server, port);
  }
  server.wait();
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
        const ListenHook& on_listen) {
  CLI::App app{"Head-twist and dwell target selection: simulation, replay and service"};
  app.name("twistsel");
  app.require_subcommand(1);
  Flags f;

  CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a user, run the task");
  add_engine_flags(*simulate, f);
  add_scene_flags(*simulate, f);
  add_user_flags(*simulate, f);
  simulate->add_option("--trace", f.trace, "Also write the synthesized trace CSV");
  simulate->add_option("--log", f.log, "Event log (JSON lines)");
  simulate->add_option("--out", f.out, "Summary JSON");

  CLI::App* replay = app.add_subcommand("replay", "Run a stored trace through the task");
  add_engine_flags(*replay, f);
  add_scene_flags(*replay, f);
  replay->add_option("--trace", f.trace, "Trace CSV")->required();
  replay->add_option("--log", f.log, "Event log (JSON lines)");
  replay->add_option("--out", f.out, "Summary JSON");

  CLI::App* gen = app.add_subcommand("gen-trace", "Write a synthetic trace CSV");
  add_engine_flags(*gen, f);
  add_scene_flags(*gen, f);
  add_user_flags(*gen, f);
  gen->add_option("--out", f.out, "Trace CSV")->required();

  CLI::App* report = app.add_subcommand("report", "Aggregate event logs");
  report->add_option("logs", f.logs, "Event logs");
  report->add_option("--out", f.out, "Summary JSON");

  CLI::App* serve = app.add_subcommand("serve", "Run the WebSocket service");
  add_engine_flags(*serve, f);
  add_scene_flags(*serve, f);
  serve->add_option("--port", f.port, "Listen port (default TWISTSEL_PORT or 8765, 0 = any)");
  serve->add_option("--threads", f.threads, "I/O threads")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) {
      return do_simulate(f, out);
    }
    if (replay->parsed()) {
      return do_replay(f, out);
    }
    if (gen->parsed()) {
      return do_gen_trace(f, out);
    }
    if (report->parsed()) {
      if (f.logs.empty()) {
        err << "report: no event logs given\n";
        return kExitRuntime;
      }
      return do_report(f, out);
    }
    return do_serve(f, out, on_listen);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace twistsel::cli
