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

#include <stdexcept>
#include <string>

namespace mslam {

/// Metric initialization could not establish a stable baseline (degenerate
/// motion past the window-extension cap, or too few correspondences).
struct InitializationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Too few landmark matches survived gating to keep tracking.
struct TrackingLost : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Damped normal equations numerically singular at maximum damping.
struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Trajectory geometry too degenerate for the requested alignment.
struct DegenerateGeometry : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mslam
