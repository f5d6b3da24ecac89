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

#include <optional>
#include <vector>

namespace mslam {

/// Log-domain scale state tracked by the 1D Kalman filter. Working in
/// log-space keeps the reported scale exp(log_mean) strictly positive no
/// matter what update sequence the filter sees.
struct ScaleBelief {
  double log_mean = 0.0;
  double variance = 1e6;  ///< diffuse prior before the first observation
  int keyframe_id = -1;
};

/// Single-frame scale observation from the weighted least-squares fit:
/// log_scale is the precision-weighted mean of per-track log depth ratios,
/// variance its WLS variance 1 / sum(omega).
struct ScaleObservation {
  double log_scale = 0.0;
  double variance = 0.0;
  double n_effective = 0.0;  ///< sum of precisions
};

/// Weighted least-squares log-scale fit between tracked depths and prior
/// depths. Per-track residual z_k = log(prior_k) - log(track_k); the result
/// is the omega-weighted mean with variance 1/sum(omega). Returns nothing
/// when the weights carry no information (all omega zero), in which case the
/// caller must skip the filter update.
std::optional<ScaleObservation> wls_log_scale(
    const std::vector<double>& track_depths,
    const std::vector<double>& prior_depths,
    const std::vector<double>& omega);

/// Random-walk prediction: the mean is carried over, variance grows by q.
ScaleBelief kalman_predict(const ScaleBelief& belief, double process_noise_q);

/// Scalar Kalman update with the WLS variance as measurement noise.
ScaleBelief kalman_update(const ScaleBelief& belief,
                          const ScaleObservation& obs);

}  // namespace mslam
