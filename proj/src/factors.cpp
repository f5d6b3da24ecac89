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
#include "mslam/factors.hpp"

#include <cmath>

namespace mslam {

namespace {

FactorEvaluation deactivated() {
  FactorEvaluation eval;
  eval.active = false;
  return eval;
}

// d(pi)/d(x_cam) for the pinhole projection.
Eigen::Matrix<double, 2, 3> projection_jacobian(const CameraIntrinsics& K,
                                                const Eigen::Vector3d& p) {
  const double iz = 1.0 / p.z();
  Eigen::Matrix<double, 2, 3> J;
  J << K.fx * iz, 0.0, -K.fx * p.x() * iz * iz,  //
      0.0, K.fy * iz, -K.fy * p.y() * iz * iz;
  return J;
}

// d(x_cam)/d(xi) under a left-multiplied twist [omega; v] on cam_from_world.
Eigen::Matrix<double, 3, 6> point_pose_jacobian(const Eigen::Vector3d& p_cam) {
  Eigen::Matrix<double, 3, 6> J;
  J.leftCols<3>() = -skew(p_cam);
  J.rightCols<3>() = Eigen::Matrix3d::Identity();
  return J;
}

FactorEvaluation evaluate_reprojection(const Factor& factor,
                                       const ReprojectionMeasurement& meas,
                                       std::span<const Pose> poses,
                                       std::span<const Landmark> landmarks,
                                       const CameraIntrinsics& K) {
  const Pose& T = poses[factor.pose_i];
  const Eigen::Vector3d p_cam = T * landmarks[factor.landmark].position;
  if (p_cam.z() <= kMinDepth) {
    return deactivated();
  }

  FactorEvaluation eval;
  const Eigen::Vector2d projected(K.fx * p_cam.x() / p_cam.z() + K.cx,
                                  K.fy * p_cam.y() / p_cam.z() + K.cy);
  eval.residual = meas.pixel - projected;

  const Eigen::Matrix<double, 2, 3> J_pi = projection_jacobian(K, p_cam);
  eval.J_pose_i = -J_pi * point_pose_jacobian(p_cam);
  eval.J_landmark = -J_pi * T.rotation_matrix();
  return eval;
}

FactorEvaluation evaluate_ray(const Factor& factor,
                              const RayDistanceMeasurement& meas,
                              std::span<const Pose> poses,
                              std::span<const Landmark> landmarks) {
  FactorEvaluation eval;
  const Eigen::Vector3d X = landmarks[factor.landmark].position;

  if (!meas.pose_variable) {
    // Anchored mode: the ray is a constant. Residual vector d x X + m,
    // whose norm is the point-to-line distance; smooth everywhere.
    eval.residual = meas.ray.direction.cross(X) + meas.ray.moment;
    eval.J_landmark = skew(meas.ray.direction);
    return eval;
  }

  // Anchor-variable mode: re-derive the ray from the current pose. With
  // R = cam_from_world rotation, C the camera center, and d_w = R^T b the
  // world direction of the stored bearing b, the residual is
  // d_w x (X - C). Under a left twist [omega; v]:
  //   dd_w/domega = R^T [b]x,  dC/dv = -R^T,  dC/domega = 0.
  const Pose& T = poses[factor.pose_i];
  const Eigen::Matrix3d R = T.rotation_matrix();
  const Eigen::Vector3d d_w = R.transpose() * meas.bearing_cam;
  const Eigen::Vector3d C = T.camera_center();

  eval.residual = d_w.cross(X - C);
  eval.J_landmark = skew(d_w);
  eval.J_pose_i.resize(3, 6);
  eval.J_pose_i.leftCols<3>() =
      -skew(X - C) * R.transpose() * skew(meas.bearing_cam);
  eval.J_pose_i.rightCols<3>() = skew(d_w) * R.transpose();
  return eval;
}

FactorEvaluation evaluate_depth_prior(const Factor& factor,
                                      const DepthPriorMeasurement& meas,
                                      std::span<const Pose> poses,
                                      std::span<const Landmark> landmarks) {
  const Pose& T = poses[factor.pose_i];
  const Eigen::Vector3d p_cam = T * landmarks[factor.landmark].position;
  if (p_cam.z() <= kMinDepth) {
    return deactivated();
  }

  FactorEvaluation eval;
  eval.residual.resize(1);
  eval.residual[0] = std::log(p_cam.z()) - meas.log_depth;

  const Eigen::RowVector3d dz(0.0, 0.0, 1.0 / p_cam.z());
  eval.J_pose_i = dz * point_pose_jacobian(p_cam);
  eval.J_landmark = dz * T.rotation_matrix();
  return eval;
}

FactorEvaluation evaluate_relative_pose(const Factor& factor,
                                        const RelativePoseMeasurement& meas,
                                        std::span<const Pose> poses) {
  const Pose& T_i = poses[factor.pose_i];
  const Pose& T_j = poses[factor.pose_j];
  const Pose T_rel = T_j * T_i.inverse();
  const Eigen::Matrix3d R_rel = T_rel.rotation_matrix();
  const Eigen::Matrix3d R_meas = meas.rotation_j_from_i.toRotationMatrix();

  FactorEvaluation eval;
  eval.residual.resize(6);
  eval.J_pose_i = Eigen::MatrixXd::Zero(6, 6);
  eval.J_pose_j = Eigen::MatrixXd::Zero(6, 6);

  // Rotation block: phi = log(R_meas^T R_rel). A left twist omega_j on T_j
  // perturbs the argument on the left by R_meas^T omega_j; a left twist
  // omega_i on T_i perturbs it on the right by -omega_i.
  const Eigen::Vector3d phi = so3_log(R_meas.transpose() * R_rel);
  eval.residual.head<3>() = phi;
  const Eigen::Matrix3d Jl_inv = so3_left_jacobian_inverse(phi);
  const Eigen::Matrix3d Jr_inv = so3_left_jacobian_inverse(-phi);
  eval.J_pose_j.topLeftCorner<3, 3>() = Jl_inv * R_meas.transpose();
  eval.J_pose_i.topLeftCorner<3, 3>() = -Jr_inv;

  // Direction block: unit relative translation minus the measured direction.
  // Scale-free by construction, so loop edges never constrain the metric
  // scale.
  const Eigen::Vector3d t_rel = T_rel.translation;
  const double norm = t_rel.norm();
  const Eigen::Vector3d t_hat = t_rel / norm;
  eval.residual.tail<3>() = t_hat - meas.translation_direction;

  const Eigen::Matrix3d N =
      (Eigen::Matrix3d::Identity() - t_hat * t_hat.transpose()) / norm;
  eval.J_pose_j.bottomLeftCorner<3, 3>() = N * (-skew(t_rel));
  eval.J_pose_j.bottomRightCorner<3, 3>() = N;
  eval.J_pose_i.bottomRightCorner<3, 3>() = -N * R_rel;
  return eval;
}

}  // namespace

FactorEvaluation evaluate_factor(const Factor& factor,
                                 std::span<const Pose> poses,
                                 std::span<const Landmark> landmarks,
                                 const CameraIntrinsics& K) {
  switch (factor.kind()) {
    case FactorKind::kReprojection:
      return evaluate_reprojection(
          factor, std::get<ReprojectionMeasurement>(factor.measurement), poses,
          landmarks, K);
    case FactorKind::kRayDistance:
      return evaluate_ray(factor,
                          std::get<RayDistanceMeasurement>(factor.measurement),
                          poses, landmarks);
    case FactorKind::kDepthPrior:
      return evaluate_depth_prior(
          factor, std::get<DepthPriorMeasurement>(factor.measurement), poses,
          landmarks);
    case FactorKind::kRelativePose:
      return evaluate_relative_pose(
          factor, std::get<RelativePoseMeasurement>(factor.measurement), poses);
  }
  return deactivated();
}

double huber_weight(double residual_norm, double delta) {
  return residual_norm <= delta ? 1.0 : delta / residual_norm;
}

double huber_rho(double residual_norm, double delta) {
  if (residual_norm <= delta) {
    return residual_norm * residual_norm;
  }
  return delta * (2.0 * residual_norm - delta);
}

Factor make_reprojection_factor(int pose, int landmark,
                                const Eigen::Vector2d& pixel,
                                double information, double robust_delta) {
  Factor f;
  f.pose_i = pose;
  f.landmark = landmark;
  f.measurement = ReprojectionMeasurement{pixel};
  f.information = information;
  f.robust_delta = robust_delta;
  return f;
}

Factor make_ray_factor(int pose, int landmark, const Pose& anchor_cam_from_world,
                       const Eigen::Vector2d& pixel, const CameraIntrinsics& K,
                       double information, double robust_delta,
                       bool pose_variable) {
  Factor f;
  f.pose_i = pose;
  f.landmark = landmark;
  RayDistanceMeasurement meas;
  meas.bearing_cam = K.bearing(pixel);
  meas.ray = plucker_from_bearing(anchor_cam_from_world, meas.bearing_cam);
  meas.pose_variable = pose_variable;
  f.measurement = meas;
  f.information = information;
  f.robust_delta = robust_delta;
  return f;
}

Factor make_depth_prior_factor(int pose, int landmark, double prior_depth,
                               double information, double robust_delta) {
  Factor f;
  f.pose_i = pose;
  f.landmark = landmark;
  f.measurement = DepthPriorMeasurement{std::log(prior_depth)};
  f.information = information;
  f.robust_delta = robust_delta;
  return f;
}

Factor make_relative_pose_factor(int pose_i, int pose_j,
                                 const Pose& measured_j_from_i,
                                 double information, double robust_delta) {
  Factor f;
  f.pose_i = pose_i;
  f.pose_j = pose_j;
  RelativePoseMeasurement meas;
  meas.rotation_j_from_i = measured_j_from_i.rotation;
  meas.translation_direction = measured_j_from_i.translation.normalized();
  f.measurement = meas;
  f.information = information;
  f.robust_delta = robust_delta;
  return f;
}

void reanchor_ray_factor(Factor& factor, const Pose& anchor_cam_from_world) {
  auto& meas = std::get<RayDistanceMeasurement>(factor.measurement);
  meas.ray = plucker_from_bearing(anchor_cam_from_world, meas.bearing_cam);
}

}  // namespace mslam
