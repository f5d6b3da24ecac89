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
#include "mslam/geometry.hpp"

#include <cmath>

namespace mslam {

namespace {

// Renormalize only when accumulated drift is detectable.
void renormalize(Eigen::Quaterniond& q) {
  if (std::abs(q.squaredNorm() - 1.0) > 1e-12) {
    q.normalize();
  }
}

}  // namespace

Pose Pose::operator*(const Pose& other) const {
  Pose out;
  out.rotation = rotation * other.rotation;
  renormalize(out.rotation);
  out.translation = rotation * other.translation + translation;
  return out;
}

Pose Pose::inverse() const {
  Pose out;
  out.rotation = rotation.conjugate();
  out.translation = -(out.rotation * translation);
  return out;
}

bool Pose::is_approx(const Pose& other, double tol) const {
  const double rot_err =
      (rotation.toRotationMatrix() - other.rotation.toRotationMatrix()).norm();
  return rot_err <= tol && (translation - other.translation).norm() <= tol;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& omega) {
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);
  double a, b;  // R = I + a*w + b*w^2
  if (theta < kSmallAngle) {
    a = 1.0 - theta * theta / 6.0;
    b = 0.5 - theta * theta / 24.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
  }
  return Eigen::Matrix3d::Identity() + a * w + b * w * w;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& rotation) {
  // Quaternion form is stable near identity and near pi.
  Eigen::Quaterniond q(rotation);
  if (q.w() < 0.0) {
    q.coeffs() = -q.coeffs();
  }
  const Eigen::Vector3d vec(q.x(), q.y(), q.z());
  const double vec_norm = vec.norm();
  if (vec_norm < kSmallAngle) {
    return 2.0 * vec / q.w();
  }
  const double angle = 2.0 * std::atan2(vec_norm, q.w());
  return angle * vec / vec_norm;
}

Eigen::Matrix3d so3_left_jacobian_inverse(const Eigen::Vector3d& phi) {
  const double theta = phi.norm();
  const Eigen::Matrix3d w = skew(phi);
  double c;  // Jl^-1 = I - w/2 + c*w^2
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  return Eigen::Matrix3d::Identity() - 0.5 * w + c * w * w;
}

Pose se3_exp(const Vector6d& twist) {
  const Eigen::Vector3d omega = twist.head<3>();
  const Eigen::Vector3d v = twist.tail<3>();
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);

  double a, b;  // V = I + a*w + b*w^2
  if (theta < kSmallAngle) {
    a = 0.5 - theta * theta / 24.0;
    b = 1.0 / 6.0 - theta * theta / 120.0;
  } else {
    a = (1.0 - std::cos(theta)) / (theta * theta);
    b = (theta - std::sin(theta)) / (theta * theta * theta);
  }
  const Eigen::Matrix3d V = Eigen::Matrix3d::Identity() + a * w + b * w * w;

  Pose out;
  out.rotation = Eigen::Quaterniond(so3_exp(omega));
  out.translation = V * v;
  return out;
}

Vector6d se3_log(const Pose& pose) {
  const Eigen::Vector3d omega = so3_log(pose.rotation_matrix());
  const double theta = omega.norm();
  const Eigen::Matrix3d w = skew(omega);

  double c;  // V^-1 = I - w/2 + c*w^2
  if (theta < kSmallAngle) {
    c = 1.0 / 12.0 + theta * theta / 720.0;
  } else {
    c = 1.0 / (theta * theta) -
        (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
  }
  const Eigen::Matrix3d V_inv = Eigen::Matrix3d::Identity() - 0.5 * w + c * w * w;

  Vector6d twist;
  twist.head<3>() = omega;
  twist.tail<3>() = V_inv * pose.translation;
  return twist;
}

std::optional<Eigen::Vector2d> project(const CameraIntrinsics& K,
                                       const Pose& cam_from_world,
                                       const Eigen::Vector3d& point_world) {
  const Eigen::Vector3d p = cam_from_world * point_world;
  if (p.z() <= kMinDepth) {
    return std::nullopt;
  }
  return Eigen::Vector2d(K.fx * p.x() / p.z() + K.cx,
                         K.fy * p.y() / p.z() + K.cy);
}

PluckerRay plucker_from_camera(const Pose& cam_from_world,
                               const Eigen::Vector2d& pixel,
                               const CameraIntrinsics& K) {
  return plucker_from_bearing(cam_from_world, K.bearing(pixel));
}

PluckerRay plucker_from_bearing(const Pose& cam_from_world,
                                const Eigen::Vector3d& bearing_cam) {
  PluckerRay ray;
  ray.direction = cam_from_world.rotation.conjugate() * bearing_cam;
  ray.moment = cam_from_world.camera_center().cross(ray.direction);
  return ray;
}

double ray_point_distance(const PluckerRay& ray, const Eigen::Vector3d& point) {
  return (ray.direction.cross(point) + ray.moment).norm() / ray.direction.norm();
}

}  // namespace mslam
