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

#include <span>
#include <variant>

#include "mslam/geometry.hpp"

namespace mslam {

enum class FactorKind { kReprojection, kRayDistance, kDepthPrior, kRelativePose };

/// Observed pixel of a landmark in the owning pose's image.
struct ReprojectionMeasurement {
  Eigen::Vector2d pixel;
};

/// Anchored back-projection ray. `ray` is the world-frame snapshot taken at
/// anchor time; `bearing_cam` is the pose-independent unit camera-frame
/// direction used to re-derive the ray when the anchor pose is treated as a
/// variable, and to re-anchor after an optimization pass.
struct RayDistanceMeasurement {
  PluckerRay ray;
  Eigen::Vector3d bearing_cam;
  bool pose_variable = false;
};

/// Log of the metric depth prior for a landmark seen from the owning pose.
struct DepthPriorMeasurement {
  double log_depth;
};

/// Loop edge: full relative rotation plus the translation direction only
/// (its magnitude is unobservable from the essential matrix).
struct RelativePoseMeasurement {
  Eigen::Quaterniond rotation_j_from_i;
  Eigen::Vector3d translation_direction;  ///< unit norm
};

using FactorMeasurement =
    std::variant<ReprojectionMeasurement, RayDistanceMeasurement,
                 DepthPriorMeasurement, RelativePoseMeasurement>;

/// One residual term of the graph. `information` is the scalar precision
/// weight (the gated omega for ray and depth factors, 1/sigma_px^2 for
/// reprojection); `robust_delta` the Huber threshold applied to the raw
/// residual norm.
struct Factor {
  int pose_i = -1;
  int pose_j = -1;     ///< second pose, RelativePose only
  int landmark = -1;   ///< landmark index, -1 when not involved
  FactorMeasurement measurement;
  double information = 1.0;
  double robust_delta = 1.0;

  FactorKind kind() const {
    return static_cast<FactorKind>(measurement.index());
  }
};

/// Residual and Jacobians of one factor at the given state. Pose Jacobians
/// are with respect to a left-multiplied twist [omega; v] on the
/// world-to-camera pose (the update convention of the optimizer). A factor
/// whose landmark falls behind the camera is deactivated for the iteration:
/// active = false, residual and Jacobians empty.
struct FactorEvaluation {
  Eigen::VectorXd residual;
  Eigen::MatrixXd J_pose_i;
  Eigen::MatrixXd J_pose_j;
  Eigen::MatrixXd J_landmark;
  bool active = true;

  int dim() const { return static_cast<int>(residual.size()); }
};

FactorEvaluation evaluate_factor(const Factor& factor,
                                 std::span<const Pose> poses,
                                 std::span<const Landmark> landmarks,
                                 const CameraIntrinsics& K);

/// IRLS weight of the Huber loss: 1 for ||r|| <= delta, delta/||r|| beyond.
double huber_weight(double residual_norm, double delta);

/// Huber rho: r^2 inside delta, delta*(2r - delta) outside. The factor cost
/// is 0.5 * information * huber_rho(||r||), whose exact gradient is
/// information * huber_weight * J^T r.
double huber_rho(double residual_norm, double delta);

/// Convenience constructors.
Factor make_reprojection_factor(int pose, int landmark,
                                const Eigen::Vector2d& pixel,
                                double information, double robust_delta);
Factor make_ray_factor(int pose, int landmark, const Pose& anchor_cam_from_world,
                       const Eigen::Vector2d& pixel, const CameraIntrinsics& K,
                       double information, double robust_delta,
                       bool pose_variable = false);
Factor make_depth_prior_factor(int pose, int landmark, double prior_depth,
                               double information, double robust_delta);
Factor make_relative_pose_factor(int pose_i, int pose_j,
                                 const Pose& measured_j_from_i,
                                 double information, double robust_delta);

/// Rebuilds the world-frame ray snapshot of a ray factor from its stored
/// camera-frame bearing at the given anchor pose.
void reanchor_ray_factor(Factor& factor, const Pose& anchor_cam_from_world);

}  // namespace mslam
