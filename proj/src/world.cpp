/******************************************************************************
 * Copyright 2026 The metricslam Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *****************************************************************************/
#include "mslam/world.hpp"

#include <cmath>
#include <stdexcept>

#include "mslam/rng.hpp"

namespace mslam {

namespace {

// Confidence dips toward this floor right on top of a dynamic image region.
constexpr double kConfidenceFloor = 0.2;
constexpr double kConfidenceRadiusPx = 20.0;
constexpr int kRidersPerDynamic = 3;

// splitmix64, used to derive independent sub-streams from the config seed.
uint64_t substream(uint64_t seed, uint64_t tag) {
  uint64_t z = seed + tag * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Camera at `position` looking at `target`, z forward / x right / y down.
Pose look_at(const Eigen::Vector3d& position, const Eigen::Vector3d& target) {
  Eigen::Vector3d forward = (target - position).normalized();
  Eigen::Vector3d up_hint(0.0, 0.0, 1.0);
  if (std::abs(forward.dot(up_hint)) > 0.99) {
    up_hint = Eigen::Vector3d(0.0, 1.0, 0.0);
  }
  const Eigen::Vector3d right = forward.cross(up_hint).normalized();
  const Eigen::Vector3d down = forward.cross(right).normalized();

  Eigen::Matrix3d world_from_cam_rot;
  world_from_cam_rot.col(0) = right;
  world_from_cam_rot.col(1) = down;
  world_from_cam_rot.col(2) = forward;

  Pose cam_from_world;
  cam_from_world.rotation =
      Eigen::Quaterniond(world_from_cam_rot.transpose());
  cam_from_world.translation = -(cam_from_world.rotation * position);
  return cam_from_world;
}

std::vector<Pose> make_trajectory(const WorldConfig& cfg) {
  std::vector<Pose> poses;
  poses.reserve(cfg.n_keyframes);
  const Eigen::Vector3d scene_center(0.0, 0.0, 0.0);
  const int n = cfg.n_keyframes;

  switch (cfg.trajectory) {
    case TrajectoryKind::kCircle: {
      for (int k = 0; k < n; ++k) {
        const double t = 2.0 * M_PI * k / n;
        const Eigen::Vector3d pos(3.0 * std::cos(t), 3.0 * std::sin(t),
                                  0.25 * std::sin(2.0 * t));
        poses.push_back(look_at(pos, scene_center));
      }
      break;
    }
    case TrajectoryKind::kLissajous: {
      for (int k = 0; k < n; ++k) {
        const double t = 2.0 * M_PI * k / n;
        const Eigen::Vector3d pos(2.6 * std::sin(t) - 3.0,
                                  1.8 * std::sin(2.0 * t + 0.7),
                                  0.4 * std::sin(t + 1.3));
        poses.push_back(look_at(pos, scene_center));
      }
      break;
    }
    case TrajectoryKind::kLineWithReturn: {
      // Out along +x and back to the exact start, with a small lateral bow
      // so the trajectory is not collinear. Guarantees a revisit for loop
      // closure.
      const double out_fraction = 0.55;
      for (int k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / (n - 1);
        const double s = t < out_fraction
                             ? t / out_fraction
                             : (1.0 - t) / (1.0 - out_fraction);
        const Eigen::Vector3d pos(-2.2 + 4.4 * s,
                                  -3.0 + 0.3 * std::sin(2.0 * M_PI * t),
                                  0.3 * std::cos(2.0 * M_PI * t));
        poses.push_back(look_at(pos, scene_center));
      }
      break;
    }
  }
  return poses;
}

std::array<uint8_t, 3> color_from_id(int id) {
  const uint64_t h = substream(0xC01095EEDULL, static_cast<uint64_t>(id) + 1);
  return {static_cast<uint8_t>(64 + (h & 0xBF)),
          static_cast<uint8_t>(64 + ((h >> 8) & 0xBF)),
          static_cast<uint8_t>(64 + ((h >> 16) & 0xBF))};
}

double confidence_model(const Eigen::Vector2d& pixel,
                        const std::vector<Eigen::Vector2d>& dynamic_pixels,
                        Rng& rng) {
  const double base = 0.9 + 0.1 * rng.uniform();
  if (dynamic_pixels.empty()) {
    return base;
  }
  double r2_min = std::numeric_limits<double>::max();
  for (const auto& dp : dynamic_pixels) {
    r2_min = std::min(r2_min, (pixel - dp).squaredNorm());
  }
  const double falloff =
      1.0 - std::exp(-r2_min / (2.0 * kConfidenceRadiusPx * kConfidenceRadiusPx));
  return kConfidenceFloor + (base - kConfidenceFloor) * falloff;
}

bool in_bounds(const Eigen::Vector2d& px, const CameraIntrinsics& K) {
  return px.x() >= 0.0 && px.x() < K.width && px.y() >= 0.0 && px.y() < K.height;
}

}  // namespace

Eigen::Vector3d SimWorld::landmark_position(int landmark_id,
                                            int keyframe) const {
  const int n_static = static_cast<int>(static_landmarks.size());
  if (landmark_id < n_static) {
    return static_landmarks[landmark_id].position;
  }
  const int d = landmark_id - n_static;
  return dynamic_start[d] + static_cast<double>(keyframe) * dynamic_step[d];
}

Eigen::Vector3d SimWorld::grid_source_position(int source_id,
                                               int keyframe) const {
  const int n_static = static_cast<int>(grid_static_sources.size());
  if (source_id < n_static) {
    return grid_static_sources[source_id];
  }
  const auto& [dyn_index, offset] = grid_dynamic_sources[source_id - n_static];
  return dynamic_start[dyn_index] +
         static_cast<double>(keyframe) * dynamic_step[dyn_index] + offset;
}

Eigen::VectorXd simulate_descriptor(const Pose& world_from_camera,
                                    const WorldConfig& cfg) {
  const int n_freq = cfg.descriptor_dim / 2;
  Rng rng(substream(cfg.seed, 0xDE5C));

  // Feature vector: scaled camera center and viewing direction. The
  // frequency bandwidth sets how fast similarity decays with pose distance.
  const double position_scale = 1.5;
  const double direction_scale = 1.0;
  Eigen::Matrix<double, 6, 1> x;
  x.head<3>() = position_scale * world_from_camera.translation;
  x.tail<3>() =
      direction_scale * (world_from_camera.rotation * Eigen::Vector3d::UnitZ());

  Eigen::VectorXd desc(cfg.descriptor_dim);
  for (int j = 0; j < n_freq; ++j) {
    Eigen::Matrix<double, 6, 1> w;
    for (int i = 0; i < 6; ++i) {
      w[i] = rng.gaussian();
    }
    const double phase = w.dot(x);
    desc[2 * j] = std::cos(phase);
    desc[2 * j + 1] = std::sin(phase);
  }
  desc /= std::sqrt(static_cast<double>(n_freq));
  return desc;
}

SimWorld generate_world(const WorldConfig& cfg) {
  if (!cfg.valid()) {
    throw std::invalid_argument("generate_world: invalid WorldConfig");
  }
  return generate_world_with_trajectory(cfg, make_trajectory(cfg));
}

SimWorld generate_world_with_trajectory(
    const WorldConfig& cfg, const std::vector<Pose>& cam_from_world) {
  if (!cfg.valid()) {
    throw std::invalid_argument("generate_world: invalid WorldConfig");
  }
  if (static_cast<int>(cam_from_world.size()) != cfg.n_keyframes) {
    throw std::invalid_argument(
        "generate_world: trajectory length does not match n_keyframes");
  }

  SimWorld world;
  world.config = cfg;
  world.cam_from_world = cam_from_world;

  // Scene content.
  Rng scene_rng(substream(cfg.seed, 0x5CE9E));
  world.static_landmarks.reserve(cfg.n_static_landmarks);
  for (int i = 0; i < cfg.n_static_landmarks; ++i) {
    Landmark lm;
    lm.id = i;
    lm.position = Eigen::Vector3d(scene_rng.uniform(-1.2, 1.2),
                                  scene_rng.uniform(-1.2, 1.2),
                                  scene_rng.uniform(-1.2, 1.2));
    world.static_landmarks.push_back(lm);
  }
  for (int i = 0; i < cfg.n_dynamic_landmarks; ++i) {
    world.dynamic_start.emplace_back(scene_rng.uniform(-0.9, 0.9),
                                     scene_rng.uniform(-0.9, 0.9),
                                     scene_rng.uniform(-0.9, 0.9));
    world.dynamic_step.push_back(cfg.dynamic_velocity *
                                 scene_rng.unit_vector3());
  }
  if (cfg.grid_points > 0) {
    for (int i = 0; i < cfg.grid_points; ++i) {
      world.grid_static_sources.emplace_back(scene_rng.uniform(-1.2, 1.2),
                                             scene_rng.uniform(-1.2, 1.2),
                                             scene_rng.uniform(-1.2, 1.2));
    }
    for (int d = 0; d < cfg.n_dynamic_landmarks; ++d) {
      for (int r = 0; r < kRidersPerDynamic; ++r) {
        world.grid_dynamic_sources.emplace_back(
            d, 0.08 * scene_rng.unit_vector3());
      }
    }
  }

  // Hidden prior scale walk; starts at exactly 1 so the first prior batch is
  // s* times the true depth.
  Rng walk_rng(substream(cfg.seed, 0x3A1C));
  world.gamma.resize(cfg.n_keyframes);
  world.gamma[0] = 1.0;
  for (int k = 1; k < cfg.n_keyframes; ++k) {
    world.gamma[k] =
        world.gamma[k - 1] *
        std::exp(walk_rng.gaussian(0.0, cfg.prior_scale_walk_sigma));
  }

  // Observations.
  Rng obs_rng(substream(cfg.seed, 0x0B5));
  const CameraIntrinsics& K = cfg.intrinsics;
  world.observations.reserve(cfg.n_keyframes);
  for (int k = 0; k < cfg.n_keyframes; ++k) {
    FrameObservation frame;
    frame.keyframe_id = k;
    const Pose& T = world.cam_from_world[k];

    // First pass: geometry of every visible landmark.
    std::vector<Eigen::Vector2d> dynamic_pixels;
    for (int id = 0; id < world.n_landmarks(); ++id) {
      const Eigen::Vector3d pos = world.landmark_position(id, k);
      const auto px = project(K, T, pos);
      if (!px || !in_bounds(*px, K)) {
        continue;
      }
      TrackObservation track;
      track.landmark_id = id;
      track.is_dynamic = world.landmark_is_dynamic(id);
      track.pixel = *px + cfg.pixel_noise_sigma * obs_rng.gaussian2();
      const double true_depth = (T * pos).z();
      track.prior_depth = cfg.true_global_scale * world.gamma[k] * true_depth *
                          std::exp(obs_rng.gaussian(0.0, cfg.prior_log_noise_sigma));
      if (track.is_dynamic) {
        dynamic_pixels.push_back(track.pixel);
      }
      frame.tracks.push_back(track);
    }
    if (frame.tracks.empty()) {
      throw std::invalid_argument(
          "generate_world: no landmark visible in keyframe " +
          std::to_string(k));
    }

    // Second pass: confidence needs the dynamic image regions of this frame.
    for (auto& track : frame.tracks) {
      track.spatial_confidence =
          confidence_model(track.pixel, dynamic_pixels, obs_rng);
    }

    // Dense-fusion grid samples.
    const int n_grid_sources =
        static_cast<int>(world.grid_static_sources.size() +
                         world.grid_dynamic_sources.size());
    for (int sid = 0; sid < n_grid_sources; ++sid) {
      const Eigen::Vector3d pos = world.grid_source_position(sid, k);
      const auto px = project(K, T, pos);
      if (!px || !in_bounds(*px, K)) {
        continue;
      }
      GridSample sample;
      sample.source_id = sid;
      sample.on_dynamic =
          sid >= static_cast<int>(world.grid_static_sources.size());
      sample.pixel = *px;  // grid pixels are exact sampling locations
      const double true_depth = (T * pos).z();
      sample.prior_depth = cfg.true_global_scale * world.gamma[k] * true_depth *
                           std::exp(obs_rng.gaussian(0.0, cfg.prior_log_noise_sigma));
      sample.confidence = confidence_model(sample.pixel, dynamic_pixels, obs_rng);
      sample.color = color_from_id(sid);
      frame.grid.push_back(sample);
    }

    frame.descriptor = simulate_descriptor(world.world_from_camera(k), cfg);
    world.observations.push_back(std::move(frame));
  }

  return world;
}

}  // namespace mslam
