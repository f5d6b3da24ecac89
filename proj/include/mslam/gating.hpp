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

#include <vector>

#include "mslam/geometry.hpp"

namespace mslam {

/// Uncertainty assigned to tracks whose temporal residual cannot be formed
/// (transformed point behind the camera). Far above any useful threshold,
/// so the gate drives the weight to ~0 while staying finite.
inline constexpr double kMaxUncertainty = 1.0;

/// Parameters of the soft uncertainty gate.
struct GateParams {
  double alpha = 0.5;        ///< balance between spatial and temporal terms
  double tau = 0.07;         ///< gate threshold
  double temperature = 0.02; ///< sigmoid temperature
  double sigma0_sq = 1.0;    ///< nominal measurement noise variance

  bool valid() const {
    return alpha >= 0.0 && alpha <= 1.0 && temperature > 0.0 && sigma0_sq > 0.0;
  }
};

/// Per-track gate outputs: uncertainty u, bounded weight w in [0,1], and
/// precision omega = w / sigma0^2.
struct GateField {
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> omega;

  size_t size() const { return u.size(); }
};

/// Pose-compensated relative depth residual between two observations of the
/// same tracks. Each track's depth at frame i is back-projected along
/// pixel_i, moved through cam_j_from_cam_i, and its predicted depth in
/// frame j compared against the observed one:
///   u = |d_obs - d_pred| / d_pred.
/// Tracks whose transformed point lands behind the camera get
/// kMaxUncertainty.
std::vector<double> temporal_uncertainty(
    const std::vector<double>& depths_i, const std::vector<double>& depths_j,
    const std::vector<Eigen::Vector2d>& pixels_i, const Pose& cam_j_from_cam_i,
    const CameraIntrinsics& K);

/// Convex blend u = alpha * u_spatial + (1 - alpha) * u_temporal.
std::vector<double> fuse_uncertainty(const std::vector<double>& u_spatial,
                                     const std::vector<double>& u_temporal,
                                     const GateParams& params);

/// Bounded sigmoid gate: w = 1 / (1 + exp(-(tau - u) / T)), omega = w/sigma0^2.
GateField gate(const std::vector<double>& u, const GateParams& params);

/// Scalar form of the gate weight.
double gate_weight(double u, const GateParams& params);

}  // namespace mslam
