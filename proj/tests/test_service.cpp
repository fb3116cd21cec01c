#include "twistsel/error.hpp"
#include "twistsel/io.hpp"
#include "twistsel/server.hpp"
#include "twistsel/session.hpp"

#include "support/ws_client.hpp"

#include <gtest/gtest.h>

#include <future>

using namespace twistsel;
using namespace twistsel::protocol;

namespace {

Trace ideal_trace(Method method, double noise = 0.0, std::uint64_t seed = 0) {
  const Scene scene = build_scene(SceneDesc{});
  UserParams u;
  u.noise_sigma_deg = noise;
  u.seed = seed;
  return synth_trace(make_sequential_task(scene, method, {}), u);
}

TaskResult offline(Method method, const Trace& trace) {
  const Scene scene = build_scene(SceneDesc{});
  return run_task(make_sequential_task(scene, method, {}), trace);
}

TaskResult without_log(TaskResult r) {
  r.log.clear();
  return r;
}

wsclient::Streamed feed(Session& session, Method method, const Trace& trace) {
  wsclient::Streamed s;
  wsclient::collect(s, session.handle(SetMethod{method}));
  wsclient::collect(s, session.handle(StartTask{}));
  for (const PoseSample& p : trace) {
    wsclient::collect(s, session.handle(Pose{p.t_ms, p.orientation}));
  }
  return s;
}

std::vector<ErrorMsg> errors_of(const std::vector<ServerMessage>& msgs) {
  std::vector<ErrorMsg> out;
  for (const auto& m : msgs) {
    if (const auto* e = std::get_if<ErrorMsg>(&m)) out.push_back(*e);
  }
  return out;
}

const State& last_state(const std::vector<ServerMessage>& msgs) {
  return std::get<State>(msgs.back());
}

}  // namespace

TEST(Session, MatchesOfflineRun) {
  for (Method m : {Method::Dwell, Method::TwistBinary, Method::TwistDirectional}) {
    for (double noise : {0.0, 2.0}) {
      const Trace trace = ideal_trace(m, noise, 11);
      const TaskResult expected = offline(m, trace);
      Session session(SessionConfig{});
      const auto s = feed(session, m, trace);
      EXPECT_TRUE(s.errors.empty());
      EXPECT_EQ(s.log, expected.log) << to_string(m) << " noise " << noise;
      if (noise == 0.0) {
        EXPECT_TRUE(expected.completed);
      }
      ASSERT_EQ(s.results.size(), expected.completed ? 1u : 0u) << to_string(m) << " " << noise;
      if (expected.completed) {
        EXPECT_EQ(s.results[0].result, expected);
      }
      EXPECT_EQ(s.states.size(), trace.size());
      EXPECT_EQ(session.task_active(), !expected.completed);
    }
  }
}

TEST(Session, EveryPoseGetsOneStateAfterItsEvents) {
  const Trace trace = ideal_trace(Method::TwistBinary);
  Session session(SessionConfig{});
  session.handle(SetMethod{Method::TwistBinary});
  session.handle(StartTask{});
  for (const PoseSample& p : trace) {
    const auto out = session.handle(Pose{p.t_ms, p.orientation});
    std::size_t states = 0;
    bool state_seen = false;
    for (const auto& m : out) {
      if (std::holds_alternative<State>(m)) {
        ++states;
        state_seen = true;
      } else if (std::holds_alternative<Event>(m)) {
        EXPECT_FALSE(state_seen) << "events precede the state";
      } else {
        EXPECT_TRUE(std::holds_alternative<TaskResultMsg>(m));
        EXPECT_TRUE(state_seen);
      }
    }
    ASSERT_EQ(states, 1u);
  }
}

TEST(Session, ButtonColorsTrackProgress) {
  Session session(SessionConfig{});
  auto out = session.handle(Pose{0, UnitQuat::identity()});
  EXPECT_EQ(last_state(out).buttons, std::vector<ButtonState>(16, ButtonState::Black));
  EXPECT_FALSE(last_state(out).expected_button.has_value());

  session.handle(StartTask{});
  out = session.handle(Pose{10, UnitQuat::identity()});
  std::vector<ButtonState> expect(16, ButtonState::Black);
  expect[0] = ButtonState::Red;
  EXPECT_EQ(last_state(out).buttons, expect);
  EXPECT_EQ(last_state(out).expected_button, 1);
  EXPECT_TRUE(last_state(out).task_active);

  // Run the ideal trace, shifted past t = 10, and inspect the frame after
  // the third correct selection.
  const Trace trace = ideal_trace(Method::Dwell);
  int correct = 0;
  for (const PoseSample& p : trace) {
    out = session.handle(Pose{p.t_ms + 20, p.orientation});
    for (const auto& m : out) {
      if (const auto* e = std::get_if<Event>(&m); e && e->log &&
                                                  e->log->kind == LogEntry::Kind::Correct) {
        ++correct;
      }
    }
    if (correct == 3) break;
  }
  expect.assign(16, ButtonState::Black);
  expect[0] = expect[1] = expect[2] = ButtonState::Gray;
  expect[3] = ButtonState::Red;
  EXPECT_EQ(last_state(out).buttons, expect);
  EXPECT_EQ(last_state(out).expected_button, 4);
}

TEST(Session, TraceOrderIsAnErrorAndLeavesStateAlone) {
  Session session(SessionConfig{});
  session.handle(Pose{100, UnitQuat::identity()});
  auto out = session.handle(Pose{100, UnitQuat::identity()});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(std::get<ErrorMsg>(out[0]).code, "trace_order");
  out = session.handle(Pose{50, UnitQuat::identity()});
  EXPECT_EQ(std::get<ErrorMsg>(out[0]).code, "trace_order");
  out = session.handle(Pose{101, UnitQuat::identity()});
  EXPECT_EQ(last_state(out).frame.t_ms, 101.0);
}

TEST(Session, ResetAllowsReplayFromZero) {
  Session session(SessionConfig{});
  session.handle(Pose{500, UnitQuat::identity()});
  session.handle(Reset{});
  const auto out = session.handle(Pose{0, UnitQuat::identity()});
  EXPECT_TRUE(errors_of(out).empty());
}

TEST(Session, SetMethodKeepsTimeMonotone) {
  Session session(SessionConfig{});
  session.handle(Pose{500, UnitQuat::identity()});
  session.handle(SetMethod{Method::TwistBinary});
  EXPECT_EQ(session.method(), Method::TwistBinary);
  const auto out = session.handle(Pose{400, UnitQuat::identity()});
  ASSERT_EQ(errors_of(out).size(), 1u);
  EXPECT_EQ(errors_of(out)[0].code, "trace_order");
}

TEST(Session, SetMethodCancelsTask) {
  Session session(SessionConfig{});
  session.handle(StartTask{});
  EXPECT_TRUE(session.task_active());
  session.handle(SetMethod{Method::TwistDirectional});
  EXPECT_FALSE(session.task_active());
  const auto out = session.handle(Pose{0, UnitQuat::identity()});
  EXPECT_FALSE(last_state(out).task_active);
  EXPECT_EQ(last_state(out).method, Method::TwistDirectional);
}

TEST(Session, SetConfig) {
  Session session(SessionConfig{});
  auto out = session.handle(SetConfig{{{"threshold_deg", 10.0}}});
  EXPECT_TRUE(out.empty());
  EXPECT_EQ(session.engine_config().threshold_deg, 10.0);

  out = session.handle(SetConfig{{{"dwell_ms", -1.0}}});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(std::get<ErrorMsg>(out[0]).code, "bad_config");
  EXPECT_EQ(session.engine_config().threshold_deg, 10.0);
  EXPECT_EQ(session.engine_config().dwell_ms, EngineConfig{}.dwell_ms);

  out = session.handle(SetConfig{{{"dwell_ms", "slow"}}});
  EXPECT_EQ(std::get<ErrorMsg>(out.at(0)).code, "bad_config");
}

TEST(Session, TaskDisabled) {
  SessionConfig cfg;
  cfg.task_enabled = false;
  Session session(cfg);
  const auto out = session.handle(StartTask{});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(std::get<ErrorMsg>(out[0]).code, "task_disabled");
  EXPECT_FALSE(session.task_active());
}

TEST(Session, FreeRunningEventsCarryNoLog) {
  const Trace trace = ideal_trace(Method::TwistBinary);
  Session session(SessionConfig{});
  session.handle(SetMethod{Method::TwistBinary});
  wsclient::Streamed s;
  for (const PoseSample& p : trace) {
    wsclient::collect(s, session.handle(Pose{p.t_ms, p.orientation}));
  }
  EXPECT_EQ(s.events.size(), 16u);
  EXPECT_TRUE(s.log.empty());
  EXPECT_TRUE(s.results.empty());
}

TEST(Session, TextFramesKeepGoingAfterBadLines) {
  Session session(SessionConfig{});
  const std::string reply = session.respond(
      "{\"type\":\"pose\",\"t_ms\":0,\"quat\":[1,0,0,0]}\n"
      "not json\n"
      "{\"type\":\"pose\",\"t_ms\":10,\"quat\":[0.5,0,0,0]}\n"
      "{\"type\":\"pose\",\"t_ms\":20,\"quat\":[1,0,0,0]}\n");
  const auto lines = split_lines(reply);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_NE(lines[0].find("\"type\":\"state\""), std::string_view::npos);
  EXPECT_NE(lines[1].find("\"code\":\"bad_json\""), std::string_view::npos);
  EXPECT_NE(lines[2].find("\"code\":\"bad_quat\""), std::string_view::npos);
  EXPECT_NE(lines[3].find("\"t_ms\":20"), std::string_view::npos);
}

TEST(Session, SessionsAreIsolated) {
  const Trace a = ideal_trace(Method::Dwell);
  const Trace b = ideal_trace(Method::TwistDirectional, 1.5, 4);
  Session sa(SessionConfig{});
  Session sb(SessionConfig{});
  wsclient::Streamed ra;
  wsclient::Streamed rb;
  wsclient::collect(ra, sa.handle(StartTask{}));
  wsclient::collect(rb, sb.handle(SetMethod{Method::TwistDirectional}));
  wsclient::collect(rb, sb.handle(StartTask{}));
  const std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (i < a.size()) wsclient::collect(ra, sa.handle(Pose{a[i].t_ms, a[i].orientation}));
    if (i < b.size()) wsclient::collect(rb, sb.handle(Pose{b[i].t_ms, b[i].orientation}));
  }
  EXPECT_EQ(ra.log, offline(Method::Dwell, a).log);
  EXPECT_EQ(rb.log, offline(Method::TwistDirectional, b).log);
}

TEST(Server, RejectsInvalidConfig) {
  SessionConfig cfg;
  cfg.engine.threshold_deg = 0;
  EXPECT_THROW(Server(cfg, 1), Error);
  SessionConfig grid;
  grid.scene.rows = 0;
  EXPECT_THROW(Server(grid, 1), Error);
}

TEST(Server, StreamsTaskLikeOfflineRun) {
  SessionConfig cfg;
  cfg.port = 0;
  Server server(cfg, 2);
  const unsigned short port = server.start();
  ASSERT_NE(port, 0);
  for (Method m : {Method::Dwell, Method::TwistBinary}) {
    const Trace trace = ideal_trace(m, 1.0, 3);
    const TaskResult expected = offline(m, trace);
    const auto s = wsclient::stream_task(port, m, trace);
    EXPECT_TRUE(s.errors.empty());
    EXPECT_EQ(s.log, expected.log);
    ASSERT_EQ(s.results.size(), 1u);
    EXPECT_EQ(s.results[0].result, without_log(expected));
    EXPECT_EQ(s.states.size(), trace.size());
  }
}

TEST(Server, ConcurrentClientsDoNotInterfere) {
  SessionConfig cfg;
  cfg.port = 0;
  Server server(cfg, 2);
  const unsigned short port = server.start();
  const Trace a = ideal_trace(Method::Dwell, 1.0, 21);
  const Trace b = ideal_trace(Method::TwistDirectional, 1.0, 22);
  auto fa = std::async(std::launch::async,
                       [&] { return wsclient::stream_task(port, Method::Dwell, a, 7); });
  auto fb = std::async(std::launch::async,
                       [&] { return wsclient::stream_task(port, Method::TwistDirectional, b, 5); });
  const auto ra = fa.get();
  const auto rb = fb.get();
  EXPECT_EQ(ra.log, offline(Method::Dwell, a).log);
  EXPECT_EQ(rb.log, offline(Method::TwistDirectional, b).log);
  EXPECT_EQ(ra.results.size(), 1u);
  EXPECT_EQ(rb.results.size(), 1u);
}

TEST(Server, ReportsErrorsOverTheWire) {
  SessionConfig cfg;
  cfg.port = 0;
  Server server(cfg, 1);
  wsclient::Client client(server.start());
  client.send(std::string("{\"type\":\"pose\",\"t_ms\":5,\"quat\":[1,0,0,0]}\n"
                          "{\"type\":\"pose\",\"t_ms\":5,\"quat\":[1,0,0,0]}\n"
                          "{\"type\":\"set_method\",\"method\":\"wink\"}\n"));
  wsclient::Streamed s;
  wsclient::collect(s, client.sync());
  EXPECT_EQ(s.states.size(), 1u);
  ASSERT_EQ(s.errors.size(), 2u);
  EXPECT_EQ(s.errors[0].code, "trace_order");
  EXPECT_EQ(s.errors[1].code, "bad_method");
}

TEST(Server, BindFailureOnOccupiedPort) {
  SessionConfig cfg;
  cfg.port = 0;
  Server first(cfg, 1);
  cfg.port = first.start();
  Server second(cfg, 1);
  EXPECT_THROW(second.start(), std::system_error);
}

TEST(Server, StopEndsWait) {
  SessionConfig cfg;
  cfg.port = 0;
  Server server(cfg, 2);
  server.start();
  auto waiter = std::async(std::launch::async, [&] { server.wait(); });
  server.stop();
  EXPECT_EQ(waiter.wait_for(std::chrono::seconds(5)), std::future_status::ready);
}
