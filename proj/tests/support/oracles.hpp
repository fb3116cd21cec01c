#pragma once

// Reference computations used by the tests. None of these call into the
// code under test for the quantity they check; they only share the basic
// value types.

#include "twistsel/engine.hpp"
#include "twistsel/orientation.hpp"
#include "twistsel/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using twistsel::TargetId;
using twistsel::UnitQuat;
using twistsel::Vec3;

inline constexpr double kPi = 3.14159265358979323846;
inline double rad(double deg) { return deg * kPi / 180.0; }
inline double deg(double r) { return r * 180.0 / kPi; }

// Plain Hamilton product on raw components.
struct Q {
  double w, x, y, z;
};

inline Q mul(Q a, Q b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline Q raw(const UnitQuat& q) { return {q.w(), q.x(), q.y(), q.z()}; }

inline Q axis_angle(Vec3 axis, double angle_rad) {
  const double s = std::sin(angle_rad / 2.0);
  return {std::cos(angle_rad / 2.0), axis.x * s, axis.y * s, axis.z * s};
}

inline double dot4(Q a, Q b) { return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z; }

// Rotation of v by q through the 3x3 matrix of q.
inline Vec3 rotate(Q q, Vec3 v) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  return {(1 - 2 * (y * y + z * z)) * v.x + 2 * (x * y - w * z) * v.y + 2 * (x * z + w * y) * v.z,
          2 * (x * y + w * z) * v.x + (1 - 2 * (x * x + z * z)) * v.y + 2 * (y * z - w * x) * v.z,
          2 * (x * z - w * y) * v.x + 2 * (y * z + w * x) * v.y + (1 - 2 * (x * x + y * y)) * v.z};
}

// Yaw about +y, then pitch about +x, then roll about -z (clockwise for the
// wearer), built from the elemental rotations.
inline Q ypr(double yaw_deg, double pitch_deg, double roll_deg) {
  const Q y = axis_angle({0, 1, 0}, rad(yaw_deg));
  const Q p = axis_angle({1, 0, 0}, rad(pitch_deg));
  const Q r = axis_angle({0, 0, -1}, rad(roll_deg));
  return mul(y, mul(p, r));
}

// Euler roll read off the rotated basis: the head's right and up vectors
// projected onto world up.
inline double roll_deg(Q q) {
  const Vec3 right = rotate(q, {1, 0, 0});
  const Vec3 up = rotate(q, {0, 1, 0});
  return deg(std::atan2(-right.y, up.y));
}

// The twist about `axis` is the rotation about that axis closest to q,
// i.e. the one maximizing |<q, T(alpha)>|. Scans alpha on a grid, then
// refines around the best grid point. Returns degrees in (-180, 180].
inline double twist_scan_deg(Q q, Vec3 axis, double step_deg = 1e-4) {
  auto score = [&](double a) { return std::abs(dot4(q, axis_angle(axis, rad(a)))); };
  double best = 0.0;
  double best_score = -1.0;
  // alpha and alpha + 360 give the same rotation; scan the half-open range.
  const long n = std::lround(360.0 / step_deg);
  for (long i = 0; i < n; ++i) {
    const double a = -180.0 + step_deg * static_cast<double>(i + 1);
    const double s = score(a);
    if (s > best_score) {
      best_score = s;
      best = a;
    }
  }
  // |<q, T>| is flat at its peak, so bracketing searches stall near 1e-5
  // deg. A parabola through three wider points locates the vertex instead.
  double a = best;
  for (int i = 0; i < 3; ++i) {
    const double h = 1e-2;
    const double f0 = score(a - h), f1 = score(a), f2 = score(a + h);
    const double denom = f0 - 2.0 * f1 + f2;
    if (denom == 0.0) {
      break;
    }
    a -= h * (f2 - f0) / (2.0 * denom);
  }
  if (a > 180.0) {
    a -= 360.0;
  }
  if (a <= -180.0) {
    a += 360.0;
  }
  return a;
}

struct RayHit {
  TargetId id;
  Vec3 point;
  double distance;
};

// Solves eye + t d = center + u right + v up with Cramer's rule for every
// target and keeps the nearest front-facing hit inside the rectangle.
inline std::optional<RayHit> brute_raycast(const twistsel::Scene& scene, Vec3 d) {
  auto det3 = [](Vec3 a, Vec3 b, Vec3 c) {
    return a.x * (b.y * c.z - b.z * c.y) - b.x * (a.y * c.z - a.z * c.y) +
           c.x * (a.y * b.z - a.z * b.y);
  };
  std::optional<RayHit> best;
  const Vec3 eye = scene.eye();
  for (const twistsel::Target& tg : scene.targets()) {
    const Vec3 c1 = d;
    const Vec3 c2{-tg.right.x, -tg.right.y, -tg.right.z};
    const Vec3 c3{-tg.up.x, -tg.up.y, -tg.up.z};
    const Vec3 rhs{tg.center.x - eye.x, tg.center.y - eye.y, tg.center.z - eye.z};
    const double det = det3(c1, c2, c3);
    if (std::abs(det) < 1e-15) {
      continue;
    }
    const double t = det3(rhs, c2, c3) / det;
    const double u = det3(c1, rhs, c3) / det;
    const double v = det3(c1, c2, rhs) / det;
    const double facing = d.x * tg.normal.x + d.y * tg.normal.y + d.z * tg.normal.z;
    if (t <= 0.0 || facing >= 0.0 || std::abs(u) > tg.half_width ||
        std::abs(v) > tg.half_height) {
      continue;
    }
    if (!best || t < best->distance || (t == best->distance && tg.id < best->id)) {
      best = RayHit{tg.id, {eye.x + t * d.x, eye.y + t * d.y, eye.z + t * d.z}, t};
    }
  }
  return best;
}

// Hysteresis as written in the study description: fire when armed and the
// roll reaches the threshold, re-arm once it falls to ratio * threshold.
// Gaze is assumed to stay on one target.
inline std::vector<std::size_t> hysteresis_fires(const std::vector<double>& twist,
                                                 double threshold, double ratio) {
  std::vector<std::size_t> fires;
  bool armed = true;
  for (std::size_t i = 0; i < twist.size(); ++i) {
    const double a = std::abs(twist[i]);
    if (a <= ratio * threshold) {
      armed = true;
    }
    if (armed && a >= threshold) {
      fires.push_back(i);
      armed = false;
    }
  }
  return fires;
}

inline Vec3 unit(Vec3 v) {
  const double n = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
  return {v.x / n, v.y / n, v.z / n};
}

// Yaw and pitch that point the forward axis at a world direction.
inline std::array<double, 2> aim(Vec3 d) {
  return {deg(std::atan2(-d.x, -d.z)), deg(std::atan2(d.y, std::hypot(d.x, d.z)))};
}

inline double arc_deg(Vec3 a, Vec3 b) {
  const double c = a.x * b.x + a.y * b.y + a.z * b.z;
  return deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

inline Vec3 slerp(Vec3 a, Vec3 b, double s) {
  const double om = rad(arc_deg(a, b));
  if (om < 1e-12) {
    return b;
  }
  const double k1 = std::sin((1 - s) * om) / std::sin(om);
  const double k2 = std::sin(s * om) / std::sin(om);
  return unit({k1 * a.x + k2 * b.x, k1 * a.y + k2 * b.y, k1 * a.z + k2 * b.z});
}

// Model timing of the scripted user on a flat grid. Because a great circle
// through the eye projects to a straight line on the button plane, the part
// of the path inside the target rectangle is one interval ending at the
// center; `lead_ms` is the time spent inside it before arriving.
struct Leg {
  TargetId id;
  double travel_ms;
  double lead_ms;
};

inline std::vector<Leg> scripted_legs(const twistsel::Scene& scene,
                                      const std::vector<TargetId>& sequence,
                                      double look_speed_dps) {
  std::vector<Leg> legs;
  Vec3 from{0, 0, -1};
  for (TargetId id : sequence) {
    const twistsel::Target& tg = *scene.find(id);
    const Vec3 to = unit(tg.center);
    const double arc = arc_deg(from, to);
    auto inside = [&](double s) {
      const auto h = brute_raycast(scene, slerp(from, to, s));
      return h && h->id == id;
    };
    double lo = 0.0;  // outside (or start)
    double hi = 1.0;  // inside
    if (inside(0.0)) {
      hi = 0.0;
    } else {
      for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (inside(mid) ? hi : lo) = mid;
      }
    }
    legs.push_back({id, arc / look_speed_dps * 1000.0, (1.0 - hi) * arc / look_speed_dps * 1000.0});
    from = to;
  }
  return legs;
}

inline Q random_quat(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Q q{n(rng), n(rng), n(rng), n(rng)};
  const double s = std::sqrt(dot4(q, q));
  return {q.w / s, q.x / s, q.y / s, q.z / s};
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return unit({n(rng), n(rng), n(rng)});
}

}  // namespace oracle

namespace oracle {

// Closed-form elapsed time of every counted selection (records 2..n) for
// the noise-free scripted user.
//   dwell:  travel + reaction + dwell + (lead of previous - lead of this)
//   twist:  travel + reaction + 2 (threshold + overshoot) / roll_speed + hold
// `nominal` drops the lead correction, which cancels in the mean up to
// (lead_1 - lead_n) / (n - 1).
struct Prediction {
  std::vector<double> corrected;
  std::vector<double> nominal;
  double nominal_mean = 0.0;
};

inline Prediction predict(const twistsel::Scene& scene, const std::vector<TargetId>& sequence,
                          twistsel::Method method, const twistsel::EngineConfig& config,
                          double look_speed, double roll_speed, double reaction_ms,
                          double hold_ms, double overshoot_deg) {
  const std::vector<Leg> legs = scripted_legs(scene, sequence, look_speed);
  Prediction p;
  for (std::size_t i = 1; i < legs.size(); ++i) {
    double nominal = legs[i].travel_ms + reaction_ms;
    double corrected = nominal;
    if (method == twistsel::Method::Dwell) {
      nominal += config.dwell_ms;
      corrected = nominal + legs[i - 1].lead_ms - legs[i].lead_ms;
    } else {
      nominal += 2.0 * (config.threshold_deg + overshoot_deg) / roll_speed * 1000.0 + hold_ms;
      corrected = nominal;
    }
    p.nominal.push_back(nominal);
    p.corrected.push_back(corrected);
    p.nominal_mean += nominal;
  }
  p.nominal_mean /= static_cast<double>(p.nominal.size());
  return p;
}

}  // namespace oracle
