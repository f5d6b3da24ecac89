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

#include <iosfwd>
#include <vector>

#include "mslam/factors.hpp"
#include "mslam/geometry.hpp"

namespace mslam {

/// Poses, landmarks, and heterogeneous residual factors. Poses map world to
/// camera. At least one pose must be fixed as the gauge; metric factors
/// remove the scale gauge but not the rigid one.
struct FactorGraph {
  CameraIntrinsics intrinsics;
  std::vector<Pose> poses;
  std::vector<uint8_t> pose_fixed;
  std::vector<Landmark> landmarks;
  std::vector<uint8_t> landmark_fixed;
  std::vector<Factor> factors;
  int gauge_pose = 0;

  int add_pose(const Pose& pose, bool fixed = false);
  int add_landmark(const Landmark& landmark, bool fixed = false);
};

struct SolveOptions {
  int max_iterations = 15;
  double rel_tol = 1e-10;
  /// Initial damping as a fraction of the mean Hessian diagonal.
  double initial_lambda_factor = 1e-4;
  double lambda_max = 1e8;
};

struct SolveReport {
  int iterations = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  int deactivated_factors = 0;
  double damping_final = 0.0;
};

/// Total robustified cost at the current state:
/// sum over active factors of 0.5 * information * huber_rho(||r||).
double graph_cost(const FactorGraph& graph, int* deactivated = nullptr);

/// Levenberg-Marquardt over the graph. Landmarks are eliminated through the
/// Schur complement; the reduced camera system is solved densely. Pose
/// updates are applied on the manifold via se3_exp (left multiplication).
/// Accepted steps never increase the cost; damping grows by 10 on rejection
/// and halves on acceptance. Throws SolverFailure when the damped normal
/// equations stay singular at maximum damping.
SolveReport solve(FactorGraph& graph, const SolveOptions& options = {});

/// Sliding-window setup: poses before `first_free_pose` are fixed (boundary
/// anchors), later ones freed; landmarks are freed exactly when some factor
/// connects them to a free pose. The gauge pose stays fixed.
void set_window(FactorGraph& graph, int first_free_pose);

/// Frees every pose and landmark except the gauge pose.
void set_all_free(FactorGraph& graph);

SolveReport window_ba(FactorGraph& graph, int first_free_pose,
                      const SolveOptions& options = {});

/// Directional derivative and Gauss-Newton curvature of the cost along the
/// global scale direction v_s (delta t_i = t_i over free poses, delta X_j =
/// X_j over free landmarks, normalized), split by factor family.
/// Reprojection and relative-pose edges form the scale-null family; ray and
/// depth-prior factors the metric family.
struct ScaleDirectionReport {
  double reprojection_gradient = 0.0;
  double metric_gradient = 0.0;
  double reprojection_curvature = 0.0;
  double metric_curvature = 0.0;
  double gradient_norm = 0.0;   ///< norm of the full cost gradient
  double hessian_trace = 0.0;   ///< trace of the full GN Hessian
  int n_free_variables = 0;
};

ScaleDirectionReport scale_direction_derivative(const FactorGraph& graph);

/// Line-oriented debug dump (one variable or factor per line):
///   intrinsics fx fy cx cy width height
///   gauge <pose index>
///   pose <index> <fixed> qw qx qy qz tx ty tz
///   landmark <index> <fixed> <id> x y z
///   factor reproj  <pose> <lm> <info> <delta> <px> <py>
///   factor ray     <pose> <lm> <info> <delta> <posevar> <d> <m> <bearing>
///   factor depth   <pose> <lm> <info> <delta> <log_depth>
///   factor relpose <pose_i> <pose_j> <info> <delta> <qw qx qy qz> <dir>
void dump_graph(const FactorGraph& graph, std::ostream& out);

}  // namespace mslam
