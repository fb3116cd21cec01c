#include "twistsel/orientation.hpp"

#include "twistsel/error.hpp"

#include <string>

namespace twistsel {

Vec3 normalized(Vec3 v) {
  const double n = norm(v);
  if (n == 0.0) {
    return v;
  }
  return (1.0 / n) * v;
}

UnitQuat UnitQuat::from_components(double w, double x, double y, double z) {
  const double n2 = w * w + x * x + y * y + z * z;
  if (!std::isfinite(n2) || n2 == 0.0) {
    return UnitQuat{};
  }
  // Leave already-unit input untouched so repeated normalization is stable.
  if (std::abs(n2 - 1.0) >= 1e-14) {
    const double inv = 1.0 / std::sqrt(n2);
    w *= inv;
    x *= inv;
    y *= inv;
    z *= inv;
  }
  bool flip = w < 0.0;
  if (w == 0.0) {
    // Hemisphere boundary: first nonzero vector component decides.
    flip = x < 0.0 || (x == 0.0 && (y < 0.0 || (y == 0.0 && z < 0.0)));
  }
  if (flip) {
    return UnitQuat{-w, -x, -y, -z};
  }
  return UnitQuat{w, x, y, z};
}

UnitQuat UnitQuat::from_axis_angle(Vec3 axis, double angle_rad) {
  const double half = 0.5 * angle_rad;
  const double s = std::sin(half);
  return from_components(std::cos(half), s * axis.x, s * axis.y, s * axis.z);
}

Vec3 UnitQuat::rotate(Vec3 v) const {
  // v' = v + 2w (u x v) + 2 u x (u x v)
  const Vec3 u = vec();
  const Vec3 t = 2.0 * cross(u, v);
  return v + w_ * t + cross(u, t);
}

UnitQuat from_yaw_pitch_roll(double yaw_deg, double pitch_deg, double roll_deg) {
  if (!std::isfinite(yaw_deg) || !std::isfinite(pitch_deg) || !std::isfinite(roll_deg)) {
    throw Error(ErrorCode::InvalidAngle, "yaw/pitch/roll must be finite");
  }
  const UnitQuat yaw = UnitQuat::from_axis_angle(kUp, deg_to_rad(yaw_deg));
  const UnitQuat pitch = UnitQuat::from_axis_angle({1.0, 0.0, 0.0}, deg_to_rad(pitch_deg));
  const UnitQuat roll = UnitQuat::from_axis_angle(kForward, deg_to_rad(roll_deg));
  return compose(yaw, compose(pitch, roll));
}

UnitQuat compose(const UnitQuat& a, const UnitQuat& b) {
  return UnitQuat::from_components(
      a.w() * b.w() - a.x() * b.x() - a.y() * b.y() - a.z() * b.z(),
      a.w() * b.x() + a.x() * b.w() + a.y() * b.z() - a.z() * b.y(),
      a.w() * b.y() - a.x() * b.z() + a.y() * b.w() + a.z() * b.x(),
      a.w() * b.z() + a.x() * b.y() - a.y() * b.x() + a.z() * b.w());
}

Vec3 look_direction(const UnitQuat& q) { return q.rotate(kForward); }

SwingTwist swing_twist(const UnitQuat& q, Vec3 axis) {
  const double along = dot(q.vec(), axis);
  if (std::abs(along) <= 1e-12) {
    return {q, UnitQuat::identity()};
  }
  const Vec3 p = along * axis;
  const UnitQuat twist = UnitQuat::from_components(q.w(), p.x, p.y, p.z);
  return {compose(q, twist.inverse()), twist};
}

double signed_angle_about_deg(const UnitQuat& q, Vec3 axis) {
  const double angle = rad_to_deg(2.0 * std::atan2(dot(q.vec(), axis), q.w()));
  return angle <= -180.0 ? angle + 360.0 : angle;
}

Heading heading_of(Vec3 direction) {
  const double horizontal = std::hypot(direction.x, direction.z);
  return {rad_to_deg(std::atan2(-direction.x, -direction.z)),
          rad_to_deg(std::atan2(direction.y, horizontal))};
}

UnitQuat level_orientation(Vec3 direction) {
  const Heading h = heading_of(direction);
  return from_yaw_pitch_roll(h.yaw_deg, h.pitch_deg, 0.0);
}

double twist_angle_deg(const UnitQuat& q) {
  const UnitQuat level = level_orientation(look_direction(q));
  const UnitQuat relative = compose(level.inverse(), q);
  return signed_angle_about_deg(swing_twist(relative, kForward).twist, kForward);
}

}  // namespace twistsel
