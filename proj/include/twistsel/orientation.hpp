#pragma once

// Head-pose quaternion math.
//
// Frame convention used throughout the library: right-handed, +y up, and the
// head looks along -z in its local frame. Yaw turns about +y (positive = to
// the left), pitch about +x (positive = up), roll about the local forward
// axis. Positive roll is clockwise as seen by the wearer, i.e. the right ear
// drops toward the right shoulder.

#include <cmath>

namespace twistsel {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend constexpr Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
  friend constexpr Vec3 operator*(Vec3 v, double s) { return s * v; }
  friend constexpr bool operator==(Vec3, Vec3) = default;
};

constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }

/// Unit vector in the direction of v. Zero vectors are returned unchanged.
Vec3 normalized(Vec3 v);

/// Head-local forward axis.
inline constexpr Vec3 kForward{0.0, 0.0, -1.0};
inline constexpr Vec3 kUp{0.0, 1.0, 0.0};

/// A rotation stored as a unit quaternion with canonical sign (w >= 0).
///
/// Instances can only be obtained through normalizing factories, so every
/// UnitQuat in the program satisfies the unit-norm and sign invariants.
class UnitQuat {
 public:
  /// Identity rotation.
  constexpr UnitQuat() = default;

  /// Normalizes (w, x, y, z) and flips it into the w >= 0 hemisphere.
  /// Already-unit input is left bit-for-bit unchanged (apart from the sign
  /// flip), so normalizing twice is a no-op. A zero or non-finite input
  /// yields identity; callers that must reject such input check first.
  static UnitQuat from_components(double w, double x, double y, double z);

  /// Rotation of angle_rad about a unit axis.
  static UnitQuat from_axis_angle(Vec3 axis, double angle_rad);

  static constexpr UnitQuat identity() { return UnitQuat{}; }

  constexpr double w() const { return w_; }
  constexpr double x() const { return x_; }
  constexpr double y() const { return y_; }
  constexpr double z() const { return z_; }
  constexpr Vec3 vec() const { return {x_, y_, z_}; }

  UnitQuat inverse() const { return from_components(w_, -x_, -y_, -z_); }

  /// Rotates v by this quaternion.
  Vec3 rotate(Vec3 v) const;

  friend constexpr bool operator==(const UnitQuat&, const UnitQuat&) = default;

 private:
  constexpr UnitQuat(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {}

  double w_ = 1.0;
  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
};

struct SwingTwist {
  UnitQuat swing;
  UnitQuat twist;
};

/// Intrinsic yaw -> pitch -> roll, all in degrees. Throws InvalidAngle on
/// non-finite input.
UnitQuat from_yaw_pitch_roll(double yaw_deg, double pitch_deg, double roll_deg);

/// Rotation that applies b first, then a.
UnitQuat compose(const UnitQuat& a, const UnitQuat& b);

/// Direction the head looks along: q applied to the local forward axis.
Vec3 look_direction(const UnitQuat& q);

/// Factors q = compose(swing, twist), where twist is a rotation about axis
/// and swing has no component along it. If q's vector part is orthogonal to
/// axis (within 1e-12) the twist is identity and the swing is q itself.
SwingTwist swing_twist(const UnitQuat& q, Vec3 axis);

/// Signed rotation angle of q about axis in degrees, in (-180, 180].
/// Meaningful for quaternions whose vector part is parallel to axis.
double signed_angle_about_deg(const UnitQuat& q, Vec3 axis);

/// Zero-roll orientation looking along a unit direction. Straight up or
/// down is resolved with yaw 0.
UnitQuat level_orientation(Vec3 direction);

/// Yaw and pitch (degrees) of a look direction under the frame convention.
struct Heading {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
};
Heading heading_of(Vec3 direction);

/// Head roll about the look axis in degrees, (-180, 180], positive clockwise
/// for the wearer.
///
/// The rotation is first expressed relative to the level (zero-roll) frame
/// that looks in the same direction; what remains fixes the forward axis and
/// its swing-twist twist about that axis is the roll. This equals the roll
/// component of from_yaw_pitch_roll for any |pitch| < 90.
double twist_angle_deg(const UnitQuat& q);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg_to_rad(double deg) { return deg * (kPi / 180.0); }
inline constexpr double rad_to_deg(double rad) { return rad * (180.0 / kPi); }

}  // namespace twistsel
