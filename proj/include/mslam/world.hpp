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
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mslam/geometry.hpp"

namespace mslam {

enum class TrajectoryKind { kCircle, kLissajous, kLineWithReturn };

/// Deterministic scene generator configuration. With a fixed seed every
/// generated artifact is bit-identical across runs.
struct WorldConfig {
  uint64_t seed = 7;
  int n_static_landmarks = 200;
  int n_dynamic_landmarks = 0;
  TrajectoryKind trajectory = TrajectoryKind::kCircle;
  int n_keyframes = 30;
  double pixel_noise_sigma = 0.0;       ///< px
  double prior_log_noise_sigma = 0.0;   ///< log-depth noise of the prior
  double prior_scale_walk_sigma = 0.0;  ///< log random-walk step per keyframe
  double true_global_scale = 1.0;       ///< s*, applied to the prior depths
  double dynamic_velocity = 0.0;        ///< m per keyframe
  CameraIntrinsics intrinsics{320.0, 320.0, 320.0, 240.0, 640, 480};
  int grid_points = 0;     ///< auxiliary dense-fusion samples (0 disables)
  int descriptor_dim = 64; ///< must be even

  bool valid() const {
    return n_keyframes >= 2 && n_static_landmarks >= 1 &&
           n_dynamic_landmarks >= 0 && pixel_noise_sigma >= 0.0 &&
           prior_log_noise_sigma >= 0.0 && prior_scale_walk_sigma >= 0.0 &&
           true_global_scale > 0.0 && intrinsics.valid() &&
           descriptor_dim >= 2 && descriptor_dim % 2 == 0;
  }
};

/// One tracked correspondence in a frame. The is_dynamic flag is ground
/// truth for tests and stays hidden from the estimator.
struct TrackObservation {
  int landmark_id = -1;
  Eigen::Vector2d pixel{0.0, 0.0};
  bool is_dynamic = false;
  double prior_depth = 0.0;        ///< simulated metric depth prior (m)
  double spatial_confidence = 1.0; ///< simulated network confidence in [0,1]
};

/// Sparse dense-fusion sample: the projection of an auxiliary scene point,
/// with the same prior depth / confidence model as the tracks. source_id
/// links the same point across frames.
struct GridSample {
  int source_id = -1;
  Eigen::Vector2d pixel{0.0, 0.0};
  double prior_depth = 0.0;
  double confidence = 1.0;
  std::array<uint8_t, 3> color{0, 0, 0};
  bool on_dynamic = false;  ///< ground truth, withheld from the estimator
};

/// Everything the estimator receives for one keyframe.
struct FrameObservation {
  int keyframe_id = -1;
  std::vector<TrackObservation> tracks;
  std::vector<GridSample> grid;
  Eigen::VectorXd descriptor;
};

/// Generated scene: ground truth plus the observation stream.
struct SimWorld {
  WorldConfig config;
  std::vector<Pose> cam_from_world;  ///< ground-truth poses
  std::vector<Landmark> static_landmarks;
  std::vector<Eigen::Vector3d> dynamic_start;
  std::vector<Eigen::Vector3d> dynamic_step;
  std::vector<double> gamma;  ///< hidden per-keyframe prior scale walk
  std::vector<FrameObservation> observations;
  std::vector<Eigen::Vector3d> grid_static_sources;
  /// Riders attached to dynamic landmarks: (dynamic index, body offset).
  std::vector<std::pair<int, Eigen::Vector3d>> grid_dynamic_sources;

  int n_landmarks() const {
    return static_cast<int>(static_landmarks.size() + dynamic_start.size());
  }
  bool landmark_is_dynamic(int landmark_id) const {
    return landmark_id >= static_cast<int>(static_landmarks.size());
  }
  /// World position of any landmark at a keyframe (dynamic ones move).
  Eigen::Vector3d landmark_position(int landmark_id, int keyframe) const;
  /// World position of a grid source at a keyframe.
  Eigen::Vector3d grid_source_position(int source_id, int keyframe) const;
  Pose world_from_camera(int keyframe) const {
    return cam_from_world[keyframe].inverse();
  }
};

/// Generates trajectory, landmarks, and the observation stream. Throws
/// std::invalid_argument on a bad config or when some frame would see no
/// landmark at all.
SimWorld generate_world(const WorldConfig& cfg);

/// Same generation but for an externally supplied trajectory; used to build
/// degenerate-motion scenes the stock trajectory kinds do not cover.
SimWorld generate_world_with_trajectory(const WorldConfig& cfg,
                                        const std::vector<Pose>& cam_from_world);

/// Simulated global scene descriptor: seeded random Fourier features of the
/// camera center and viewing direction, so nearby poses get high cosine
/// similarity. `world_from_camera` is the camera pose in the world frame.
/// The output has exactly unit norm.
Eigen::VectorXd simulate_descriptor(const Pose& world_from_camera,
                                    const WorldConfig& cfg);

}  // namespace mslam
