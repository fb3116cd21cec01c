#pragma once

#include "twistsel/orientation.hpp"

#include <optional>
#include <vector>

namespace twistsel {

using TargetId = int;

enum class TargetKind { Button, Floor };

/// A planar rectangle. `right` and `up` span the plane, `normal` is their
/// cross product and points toward the side that can be hit.
struct Target {
  TargetId id = 0;
  TargetKind kind = TargetKind::Button;
  Vec3 center;
  double half_width = 0.0;
  double half_height = 0.0;
  Vec3 normal{0.0, 0.0, 1.0};
  Vec3 right{1.0, 0.0, 0.0};
  Vec3 up{0.0, 1.0, 0.0};
};

struct FloorDesc {
  double height_m = -1.6;
  double extent_m = 10.0;
  friend bool operator==(const FloorDesc&, const FloorDesc&) = default;
};

/// Parametric description a Scene is built from; this is what gets
/// serialized.
struct SceneDesc {
  int rows = 4;
  int cols = 4;
  double cell_width_m = 0.35;
  double cell_height_m = 0.35;
  double gap_m = 0.10;
  double distance_m = 2.0;
  std::optional<FloorDesc> floor;
  friend bool operator==(const SceneDesc&, const SceneDesc&) = default;
};

struct Hit {
  TargetId target_id = 0;
  Vec3 point;
  double distance = 0.0;
  friend bool operator==(const Hit&, const Hit&) = default;
};

class Scene {
 public:
  /// Eye at the origin, no targets.
  Scene() = default;

  const std::vector<Target>& targets() const { return targets_; }
  Vec3 eye() const { return eye_; }
  const SceneDesc& desc() const { return desc_; }

  /// nullptr if no target has this id.
  const Target* find(TargetId id) const;

  /// Ids of all Button targets in scene order.
  std::vector<TargetId> button_ids() const;

 private:
  friend Scene build_grid(int, int, double, double, double, double);
  friend Scene add_floor(Scene, double, double);

  std::vector<Target> targets_;
  Vec3 eye_{};
  SceneDesc desc_{};
};

/// rows x cols buttons facing the eye on the plane z = -distance, ids
/// 1..rows*cols row-major from the top-left. Throws InvalidScene.
Scene build_grid(int rows, int cols, double cell_width, double cell_height, double gap,
                 double distance);

/// Appends a horizontal square Floor target of side `extent` at y = height,
/// centered under the eye, with id one past the largest existing id.
/// Throws InvalidScene unless height < 0 and extent > 0.
Scene add_floor(Scene scene, double height, double extent);

Scene build_scene(const SceneDesc& desc);

/// Nearest front-facing intersection of the central gaze ray. Equal
/// distances resolve to the smallest id.
std::optional<Hit> raycast(const Scene& scene, const UnitQuat& orientation);

/// Same as raycast, for an explicit unit direction.
std::optional<Hit> raycast_direction(const Scene& scene, Vec3 direction);

}  // namespace twistsel
