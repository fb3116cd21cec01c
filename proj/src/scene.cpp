#include "twistsel/scene.hpp"

#include "twistsel/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace twistsel {

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

std::optional<Hit> intersect(const Target& target, Vec3 eye, Vec3 direction) {
  const double facing = dot(direction, target.normal);
  if (!(facing < 0.0)) {
    return std::nullopt;  // parallel, or approaching from behind
  }
  const double distance = dot(target.center - eye, target.normal) / facing;
  if (!(distance > 0.0)) {
    return std::nullopt;
  }
  const Vec3 point = eye + distance * direction;
  const Vec3 local = point - target.center;
  if (std::abs(dot(local, target.right)) > target.half_width ||
      std::abs(dot(local, target.up)) > target.half_height) {
    return std::nullopt;
  }
  return Hit{target.id, point, distance};
}

}  // namespace

const Target* Scene::find(TargetId id) const {
  const auto it = std::find_if(targets_.begin(), targets_.end(),
                               [id](const Target& t) { return t.id == id; });
  return it == targets_.end() ? nullptr : &*it;
}

std::vector<TargetId> Scene::button_ids() const {
  std::vector<TargetId> ids;
  for (const Target& t : targets_) {
    if (t.kind == TargetKind::Button) {
      ids.push_back(t.id);
    }
  }
  return ids;
}

Scene build_grid(int rows, int cols, double cell_width, double cell_height, double gap,
                 double distance) {
  if (rows < 1 || cols < 1) {
    throw Error(ErrorCode::InvalidScene, "grid needs at least one row and one column");
  }
  if (!positive(cell_width) || !positive(cell_height) || !positive(distance) ||
      !std::isfinite(gap) || gap < 0.0) {
    throw Error(ErrorCode::InvalidScene, "cell sizes and distance must be positive, gap >= 0");
  }

  Scene scene;
  scene.desc_ = SceneDesc{rows, cols, cell_width, cell_height, gap, distance, std::nullopt};

  const double total_width = cols * cell_width + (cols - 1) * gap;
  const double total_height = rows * cell_height + (rows - 1) * gap;
  const double left = -0.5 * total_width + 0.5 * cell_width;
  const double top = 0.5 * total_height - 0.5 * cell_height;

  scene.targets_.reserve(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      Target t;
      t.id = r * cols + c + 1;
      t.kind = TargetKind::Button;
      t.center = {left + c * (cell_width + gap), top - r * (cell_height + gap), -distance};
      t.half_width = 0.5 * cell_width;
      t.half_height = 0.5 * cell_height;
      scene.targets_.push_back(t);
    }
  }
  return scene;
}

Scene add_floor(Scene scene, double height, double extent) {
  if (!std::isfinite(height) || height >= scene.eye_.y) {
    throw Error(ErrorCode::InvalidScene, "floor must lie below the eye");
  }
  if (!positive(extent)) {
    throw Error(ErrorCode::InvalidScene, "floor extent must be positive");
  }
  TargetId next = 1;
  for (const Target& t : scene.targets_) {
    next = std::max(next, t.id + 1);
  }
  Target floor;
  floor.id = next;
  floor.kind = TargetKind::Floor;
  floor.center = {scene.eye_.x, height, scene.eye_.z};
  floor.half_width = 0.5 * extent;
  floor.half_height = 0.5 * extent;
  floor.normal = {0.0, 1.0, 0.0};
  floor.right = {1.0, 0.0, 0.0};
  floor.up = {0.0, 0.0, -1.0};
  scene.targets_.push_back(floor);
  scene.desc_.floor = FloorDesc{height, extent};
  return scene;
}

Scene build_scene(const SceneDesc& desc) {
  Scene scene = build_grid(desc.rows, desc.cols, desc.cell_width_m, desc.cell_height_m,
                           desc.gap_m, desc.distance_m);
  if (desc.floor) {
    scene = add_floor(std::move(scene), desc.floor->height_m, desc.floor->extent_m);
  }
  return scene;
}

std::optional<Hit> raycast_direction(const Scene& scene, Vec3 direction) {
  std::optional<Hit> best;
  for (const Target& target : scene.targets()) {
    const auto hit = intersect(target, scene.eye(), direction);
    if (!hit) {
      continue;
    }
    if (!best || hit->distance < best->distance ||
        (hit->distance == best->distance && hit->target_id < best->target_id)) {
      best = hit;
    }
  }
  return best;
}

std::optional<Hit> raycast(const Scene& scene, const UnitQuat& orientation) {
  return raycast_direction(scene, look_direction(orientation));
}

}  // namespace twistsel
