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
#include "mslam/scale_filter.hpp"

#include <cassert>
#include <cmath>

namespace mslam {

std::optional<ScaleObservation> wls_log_scale(
    const std::vector<double>& track_depths,
    const std::vector<double>& prior_depths,
    const std::vector<double>& omega) {
  assert(track_depths.size() == prior_depths.size());
  assert(track_depths.size() == omega.size());

  double weighted_sum = 0.0;
  double weight_total = 0.0;
  for (size_t k = 0; k < track_depths.size(); ++k) {
    if (omega[k] <= 0.0) {
      continue;
    }
    assert(track_depths[k] > 0.0 && prior_depths[k] > 0.0);
    const double z = std::log(prior_depths[k]) - std::log(track_depths[k]);
    weighted_sum += omega[k] * z;
    weight_total += omega[k];
  }
  if (weight_total <= 0.0) {
    return std::nullopt;  // every track gated out
  }

  ScaleObservation obs;
  obs.log_scale = weighted_sum / weight_total;
  obs.variance = 1.0 / weight_total;
  obs.n_effective = weight_total;
  return obs;
}

ScaleBelief kalman_predict(const ScaleBelief& belief, double process_noise_q) {
  ScaleBelief out = belief;
  out.variance += process_noise_q;
  return out;
}

ScaleBelief kalman_update(const ScaleBelief& belief,
                          const ScaleObservation& obs) {
  assert(obs.variance > 0.0);
  const double gain = belief.variance / (belief.variance + obs.variance);
  ScaleBelief out = belief;
  out.log_mean += gain * (obs.log_scale - belief.log_mean);
  out.variance = (1.0 - gain) * belief.variance;
  return out;
}

}  // namespace mslam
