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
#include "mslam/gating.hpp"

#include <cassert>
#include <cmath>

namespace mslam {

std::vector<double> temporal_uncertainty(
    const std::vector<double>& depths_i, const std::vector<double>& depths_j,
    const std::vector<Eigen::Vector2d>& pixels_i, const Pose& cam_j_from_cam_i,
    const CameraIntrinsics& K) {
  assert(depths_i.size() == depths_j.size());
  assert(depths_i.size() == pixels_i.size());

  std::vector<double> u(depths_i.size(), kMaxUncertainty);
  for (size_t k = 0; k < depths_i.size(); ++k) {
    const Eigen::Vector3d dir(
        (pixels_i[k].x() - K.cx) / K.fx, (pixels_i[k].y() - K.cy) / K.fy, 1.0);
    const Eigen::Vector3d point_i = depths_i[k] * dir;
    const Eigen::Vector3d point_j = cam_j_from_cam_i * point_i;
    const double predicted = point_j.z();
    if (predicted <= kMinDepth) {
      continue;  // behind the camera, keep max uncertainty
    }
    u[k] = std::abs(depths_j[k] - predicted) / predicted;
  }
  return u;
}

std::vector<double> fuse_uncertainty(const std::vector<double>& u_spatial,
                                     const std::vector<double>& u_temporal,
                                     const GateParams& params) {
  assert(u_spatial.size() == u_temporal.size());
  std::vector<double> u(u_spatial.size());
  for (size_t k = 0; k < u.size(); ++k) {
    u[k] = params.alpha * u_spatial[k] + (1.0 - params.alpha) * u_temporal[k];
  }
  return u;
}

double gate_weight(double u, const GateParams& params) {
  return 1.0 / (1.0 + std::exp(-(params.tau - u) / params.temperature));
}

GateField gate(const std::vector<double>& u, const GateParams& params) {
  GateField field;
  field.u = u;
  field.w.resize(u.size());
  field.omega.resize(u.size());
  for (size_t k = 0; k < u.size(); ++k) {
    field.w[k] = gate_weight(u[k], params);
    field.omega[k] = field.w[k] / params.sigma0_sq;
  }
  return field;
}

}  // namespace mslam
