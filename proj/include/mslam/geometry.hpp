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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>

namespace mslam {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Camera-frame depths below this threshold count as behind the camera.
inline constexpr double kMinDepth = 1e-6;

/// Small-angle cutoff below which exp/log switch to their Taylor series.
inline constexpr double kSmallAngle = 1e-8;

/// Rigid transform in SE(3), stored as a unit quaternion plus translation.
///
/// Throughout the estimator poses map world coordinates into the camera
/// frame (x_cam = R * x_world + t); helper names make the direction
/// explicit where it matters.
struct Pose {
  Eigen::Quaterniond rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation{0.0, 0.0, 0.0};

  static Pose Identity() { return Pose{}; }

  Eigen::Matrix3d rotation_matrix() const { return rotation.toRotationMatrix(); }

  /// Applies the transform to a point.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation * p + translation;
  }

  /// Composition: (*this) after `other`, i.e. result maps x through
  /// `other` first.
  Pose operator*(const Pose& other) const;

  Pose inverse() const;

  /// Position of the camera center in world coordinates when this pose
  /// maps world to camera.
  Eigen::Vector3d camera_center() const {
    return rotation.conjugate() * (-translation);
  }

  bool is_approx(const Pose& other, double tol = 1e-9) const;
};

/// Pinhole camera parameters in pixels.
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  bool valid() const { return fx > 0.0 && fy > 0.0 && width > 0 && height > 0; }

  /// Unit-norm camera-frame bearing of a pixel.
  Eigen::Vector3d bearing(const Eigen::Vector2d& pixel) const {
    return Eigen::Vector3d((pixel.x() - cx) / fx, (pixel.y() - cy) / fy, 1.0)
        .normalized();
  }
};

/// A 3D point variable in the world frame.
struct Landmark {
  Eigen::Vector3d position{0.0, 0.0, 0.0};
  int id = -1;
};

/// A 3D line in Plucker coordinates: unit direction d and moment m = C x d,
/// where C is a point on the line (here always a camera center). The
/// orthogonality d . m = 0 holds by construction.
struct PluckerRay {
  Eigen::Vector3d direction{0.0, 0.0, 1.0};
  Eigen::Vector3d moment{0.0, 0.0, 0.0};

  bool satisfies_invariants(double tol = 1e-9) const {
    return std::abs(direction.norm() - 1.0) <= tol &&
           std::abs(direction.dot(moment)) <= tol;
  }
};

/// Cross-product (skew-symmetric) matrix: skew(a) * b == a x b.
Eigen::Matrix3d skew(const Eigen::Vector3d& v);

// SO(3) maps, used by the SE(3) maps and the relative-pose factor.
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation);
/// Inverse of the left Jacobian of SO(3) at phi.
Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& phi);

/// Exponential map of SE(3). Twist layout is [omega; v]: rotation part
/// first (radians), translation part second (meters).
Pose se3_exp(const Vector6d& twist);

/// Logarithm map, inverse of se3_exp for rotation angles below pi.
Vector6d se3_log(const Pose& pose);

/// Pinhole projection of a world point through a world-to-camera pose.
/// Returns nothing when the camera-frame depth is at or below kMinDepth
/// (behind-camera signal, also guards the projective division).
std::optional<Eigen::Vector2d> project(const CameraIntrinsics& K,
                                       const Pose& cam_from_world,
                                       const Eigen::Vector3d& point_world);

/// Back-projects a pixel into the anchored world-frame ray through the
/// camera center: d is the unit world direction, m = center x d.
PluckerRay plucker_from_camera(const Pose& cam_from_world,
                               const Eigen::Vector2d& pixel,
                               const CameraIntrinsics& K);

/// Builds the ray from a precomputed unit camera-frame direction.
PluckerRay plucker_from_bearing(const Pose& cam_from_world,
                                const Eigen::Vector3d& bearing_cam);

/// Euclidean distance from a point to the ray's infinite line:
/// ||d x X + m|| / ||d||.
double ray_point_distance(const PluckerRay& ray, const Eigen::Vector3d& point);

}  // namespace mslam
