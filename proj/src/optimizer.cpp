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
#include "mslam/optimizer.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <ostream>

#include "mslam/errors.hpp"

namespace mslam {

namespace {

using Matrix63 = Eigen::Matrix<double, 6, 3>;

struct Indexing {
  std::vector<int> pose_var;      // pose index -> variable slot, -1 if fixed
  std::vector<int> landmark_var;  // landmark index -> slot, -1 if fixed
  int n_pose_vars = 0;
  int n_landmark_vars = 0;
};

Indexing build_indexing(const FactorGraph& graph) {
  Indexing idx;
  idx.pose_var.assign(graph.poses.size(), -1);
  idx.landmark_var.assign(graph.landmarks.size(), -1);
  for (size_t i = 0; i < graph.poses.size(); ++i) {
    if (!graph.pose_fixed[i]) {
      idx.pose_var[i] = idx.n_pose_vars++;
    }
  }
  for (size_t i = 0; i < graph.landmarks.size(); ++i) {
    if (!graph.landmark_fixed[i]) {
      idx.landmark_var[i] = idx.n_landmark_vars++;
    }
  }
  return idx;
}

struct NormalEquations {
  Eigen::MatrixXd Hpp;                             // 6P x 6P
  Eigen::VectorXd g_p;                             // 6P
  std::vector<Eigen::Matrix3d> Hll;                // per landmark var
  std::vector<Eigen::Vector3d> g_l;                // per landmark var
  std::vector<std::map<int, Matrix63>> Hpl;        // per landmark var: pose var -> block
  double diag_sum = 0.0;
  int diag_count = 0;

  double mean_diagonal() const {
    return diag_count > 0 ? diag_sum / diag_count : 1.0;
  }
};

double evaluate_all(const FactorGraph& graph,
                    std::vector<FactorEvaluation>* evals, int* deactivated) {
  double cost = 0.0;
  int dead = 0;
  if (evals) {
    evals->clear();
    evals->reserve(graph.factors.size());
  }
  for (const Factor& f : graph.factors) {
    FactorEvaluation eval =
        evaluate_factor(f, graph.poses, graph.landmarks, graph.intrinsics);
    if (eval.active) {
      cost += 0.5 * f.information * huber_rho(eval.residual.norm(), f.robust_delta);
    } else {
      ++dead;
    }
    if (evals) {
      evals->push_back(std::move(eval));
    }
  }
  if (deactivated) {
    *deactivated = dead;
  }
  return cost;
}

NormalEquations assemble(const FactorGraph& graph, const Indexing& idx,
                         const std::vector<FactorEvaluation>& evals) {
  NormalEquations eq;
  const int P = idx.n_pose_vars;
  eq.Hpp = Eigen::MatrixXd::Zero(6 * P, 6 * P);
  eq.g_p = Eigen::VectorXd::Zero(6 * P);
  eq.Hll.assign(idx.n_landmark_vars, Eigen::Matrix3d::Zero());
  eq.g_l.assign(idx.n_landmark_vars, Eigen::Vector3d::Zero());
  eq.Hpl.resize(idx.n_landmark_vars);

  for (size_t fi = 0; fi < graph.factors.size(); ++fi) {
    const Factor& f = graph.factors[fi];
    const FactorEvaluation& ev = evals[fi];
    if (!ev.active) {
      continue;
    }
    const double w =
        f.information * huber_weight(ev.residual.norm(), f.robust_delta);
    if (w <= 0.0) {
      continue;  // gated out: exactly zero contribution
    }

    const int pi = f.pose_i >= 0 ? idx.pose_var[f.pose_i] : -1;
    const int pj = f.pose_j >= 0 ? idx.pose_var[f.pose_j] : -1;
    const int lv = f.landmark >= 0 ? idx.landmark_var[f.landmark] : -1;
    const bool has_pi = pi >= 0 && ev.J_pose_i.size() > 0;
    const bool has_pj = pj >= 0 && ev.J_pose_j.size() > 0;
    const bool has_l = lv >= 0 && ev.J_landmark.size() > 0;

    if (has_pi) {
      eq.Hpp.block<6, 6>(6 * pi, 6 * pi) +=
          w * ev.J_pose_i.transpose() * ev.J_pose_i;
      eq.g_p.segment<6>(6 * pi) += w * ev.J_pose_i.transpose() * ev.residual;
    }
    if (has_pj) {
      eq.Hpp.block<6, 6>(6 * pj, 6 * pj) +=
          w * ev.J_pose_j.transpose() * ev.J_pose_j;
      eq.g_p.segment<6>(6 * pj) += w * ev.J_pose_j.transpose() * ev.residual;
    }
    if (has_pi && has_pj) {
      const Matrix6d cross = w * ev.J_pose_i.transpose() * ev.J_pose_j;
      eq.Hpp.block<6, 6>(6 * pi, 6 * pj) += cross;
      eq.Hpp.block<6, 6>(6 * pj, 6 * pi) += cross.transpose();
    }
    if (has_l) {
      eq.Hll[lv] += w * ev.J_landmark.transpose() * ev.J_landmark;
      eq.g_l[lv] += w * ev.J_landmark.transpose() * ev.residual;
      if (has_pi) {
        const Matrix63 block = w * ev.J_pose_i.transpose() * ev.J_landmark;
        auto [it, inserted] = eq.Hpl[lv].try_emplace(pi, block);
        if (!inserted) {
          it->second += block;
        }
      }
      if (has_pj) {
        const Matrix63 block = w * ev.J_pose_j.transpose() * ev.J_landmark;
        auto [it, inserted] = eq.Hpl[lv].try_emplace(pj, block);
        if (!inserted) {
          it->second += block;
        }
      }
    }
  }

  eq.diag_sum = eq.Hpp.diagonal().sum();
  eq.diag_count = 6 * P;
  for (const auto& h : eq.Hll) {
    eq.diag_sum += h.trace();
    eq.diag_count += 3;
  }
  return eq;
}

// Solves the damped system via the Schur complement over landmarks.
// Returns false when the reduced factorization is not usable.
bool solve_damped(const NormalEquations& eq, double lambda,
                  Eigen::VectorXd* delta_p,
                  std::vector<Eigen::Vector3d>* delta_l) {
  const int P6 = static_cast<int>(eq.g_p.size());
  const int L = static_cast<int>(eq.Hll.size());

  Eigen::MatrixXd S = eq.Hpp;
  S.diagonal().array() += lambda;
  Eigen::VectorXd b = -eq.g_p;

  std::vector<Eigen::Matrix3d> W_inv(L);
  for (int l = 0; l < L; ++l) {
    Eigen::Matrix3d W = eq.Hll[l];
    W.diagonal().array() += lambda;
    const Eigen::Matrix3d inv = W.inverse();
    if (!inv.allFinite()) {
      return false;
    }
    W_inv[l] = inv;
    for (const auto& [a, block_a] : eq.Hpl[l]) {
      b.segment<6>(6 * a) += block_a * (W_inv[l] * eq.g_l[l]);
      for (const auto& [c, block_c] : eq.Hpl[l]) {
        S.block<6, 6>(6 * a, 6 * c) -= block_a * W_inv[l] * block_c.transpose();
      }
    }
  }

  Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
  if (ldlt.info() != Eigen::Success) {
    return false;
  }
  *delta_p = ldlt.solve(b);
  if (!delta_p->allFinite()) {
    return false;
  }

  delta_l->assign(L, Eigen::Vector3d::Zero());
  for (int l = 0; l < L; ++l) {
    Eigen::Vector3d rhs = -eq.g_l[l];
    for (const auto& [a, block_a] : eq.Hpl[l]) {
      rhs -= block_a.transpose() * delta_p->segment<6>(6 * a);
    }
    (*delta_l)[l] = W_inv[l] * rhs;
    if (!(*delta_l)[l].allFinite()) {
      return false;
    }
  }
  (void)P6;
  return true;
}

void apply_step(const FactorGraph& graph, const Indexing& idx,
                const Eigen::VectorXd& delta_p,
                const std::vector<Eigen::Vector3d>& delta_l,
                FactorGraph* candidate) {
  *candidate = graph;
  for (size_t i = 0; i < graph.poses.size(); ++i) {
    const int v = idx.pose_var[i];
    if (v >= 0) {
      candidate->poses[i] = se3_exp(delta_p.segment<6>(6 * v)) * graph.poses[i];
    }
  }
  for (size_t i = 0; i < graph.landmarks.size(); ++i) {
    const int v = idx.landmark_var[i];
    if (v >= 0) {
      candidate->landmarks[i].position += delta_l[v];
    }
  }
}

}  // namespace

int FactorGraph::add_pose(const Pose& pose, bool fixed) {
  poses.push_back(pose);
  pose_fixed.push_back(fixed ? 1 : 0);
  return static_cast<int>(poses.size()) - 1;
}

int FactorGraph::add_landmark(const Landmark& landmark, bool fixed) {
  landmarks.push_back(landmark);
  landmark_fixed.push_back(fixed ? 1 : 0);
  return static_cast<int>(landmarks.size()) - 1;
}

double graph_cost(const FactorGraph& graph, int* deactivated) {
  return evaluate_all(graph, nullptr, deactivated);
}

SolveReport solve(FactorGraph& graph, const SolveOptions& options) {
  SolveReport report;
  Indexing idx = build_indexing(graph);

  std::vector<FactorEvaluation> evals;
  double cost = evaluate_all(graph, &evals, &report.deactivated_factors);
  report.initial_cost = cost;
  report.final_cost = cost;

  double lambda = -1.0;  // set from the first Hessian
  FactorGraph candidate;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    NormalEquations eq = assemble(graph, idx, evals);
    if (lambda < 0.0) {
      lambda = options.initial_lambda_factor * eq.mean_diagonal();
      if (lambda <= 0.0) {
        lambda = options.initial_lambda_factor;
      }
    }

    if (eq.g_p.lpNorm<Eigen::Infinity>() < 1e-15 &&
        [&] {
          for (const auto& g : eq.g_l) {
            if (g.lpNorm<Eigen::Infinity>() >= 1e-15) return false;
          }
          return true;
        }()) {
      report.converged = true;  // stationary point
      break;
    }

    // Retry the damped solve until a step is accepted or damping tops out.
    bool accepted = false;
    while (true) {
      Eigen::VectorXd delta_p;
      std::vector<Eigen::Vector3d> delta_l;
      const bool ok = solve_damped(eq, lambda, &delta_p, &delta_l);
      if (!ok) {
        if (lambda >= options.lambda_max) {
          throw SolverFailure(
              "normal equations singular at maximum damping (lambda=" +
              std::to_string(lambda) + ")");
        }
        lambda *= 10.0;
        continue;
      }

      apply_step(graph, idx, delta_p, delta_l, &candidate);
      std::vector<FactorEvaluation> cand_evals;
      int cand_dead = 0;
      const double cand_cost = evaluate_all(candidate, &cand_evals, &cand_dead);

      if (std::isfinite(cand_cost) && cand_cost <= cost) {
        const double decrease = cost - cand_cost;
        graph = std::move(candidate);
        evals = std::move(cand_evals);
        report.deactivated_factors = cand_dead;
        cost = cand_cost;
        lambda = std::max(lambda * 0.5, 1e-12);
        accepted = true;
        ++report.iterations;
        if (decrease <= options.rel_tol * std::max(cost, 1e-300)) {
          report.converged = true;
        }
        break;
      }

      if (lambda >= options.lambda_max) {
        // No direction decreases the cost at maximum damping: numerically at
        // a local minimum.
        report.converged = true;
        break;
      }
      lambda *= 10.0;
    }

    if (report.converged || !accepted) {
      break;
    }
  }

  report.final_cost = cost;
  report.damping_final = std::max(lambda, 0.0);
  if (report.iterations == 0 && report.final_cost <= report.initial_cost) {
    // Started at a stationary point.
    report.converged = true;
  }
  return report;
}

void set_window(FactorGraph& graph, int first_free_pose) {
  for (size_t i = 0; i < graph.poses.size(); ++i) {
    graph.pose_fixed[i] =
        (static_cast<int>(i) < first_free_pose ||
         static_cast<int>(i) == graph.gauge_pose)
            ? 1
            : 0;
  }
  std::fill(graph.landmark_fixed.begin(), graph.landmark_fixed.end(), 1);
  for (const Factor& f : graph.factors) {
    if (f.landmark < 0) {
      continue;
    }
    const bool free_pose =
        (f.pose_i >= 0 && !graph.pose_fixed[f.pose_i]) ||
        (f.pose_j >= 0 && !graph.pose_fixed[f.pose_j]);
    if (free_pose) {
      graph.landmark_fixed[f.landmark] = 0;
    }
  }
}

void set_all_free(FactorGraph& graph) {
  for (size_t i = 0; i < graph.poses.size(); ++i) {
    graph.pose_fixed[i] = static_cast<int>(i) == graph.gauge_pose ? 1 : 0;
  }
  std::fill(graph.landmark_fixed.begin(), graph.landmark_fixed.end(), 0);
}

SolveReport window_ba(FactorGraph& graph, int first_free_pose,
                      const SolveOptions& options) {
  set_window(graph, first_free_pose);
  return solve(graph, options);
}

ScaleDirectionReport scale_direction_derivative(const FactorGraph& graph) {
  ScaleDirectionReport report;
  Indexing idx = build_indexing(graph);
  report.n_free_variables = 6 * idx.n_pose_vars + 3 * idx.n_landmark_vars;

  // Normalization of v_s over the free variables.
  double v_norm_sq = 0.0;
  for (size_t i = 0; i < graph.poses.size(); ++i) {
    if (idx.pose_var[i] >= 0) {
      v_norm_sq += graph.poses[i].translation.squaredNorm();
    }
  }
  for (size_t i = 0; i < graph.landmarks.size(); ++i) {
    if (idx.landmark_var[i] >= 0) {
      v_norm_sq += graph.landmarks[i].position.squaredNorm();
    }
  }
  const double v_norm = std::sqrt(v_norm_sq);
  if (v_norm <= 0.0) {
    return report;
  }

  Eigen::VectorXd gradient =
      Eigen::VectorXd::Zero(6 * idx.n_pose_vars + 3 * idx.n_landmark_vars);

  for (const Factor& f : graph.factors) {
    const FactorEvaluation ev =
        evaluate_factor(f, graph.poses, graph.landmarks, graph.intrinsics);
    if (!ev.active) {
      continue;
    }
    const double w =
        f.information * huber_weight(ev.residual.norm(), f.robust_delta);
    if (w <= 0.0) {
      continue;
    }

    Eigen::VectorXd Jv = Eigen::VectorXd::Zero(ev.dim());
    if (f.pose_i >= 0 && idx.pose_var[f.pose_i] >= 0 && ev.J_pose_i.size() > 0) {
      Vector6d v;
      v.head<3>().setZero();
      v.tail<3>() = graph.poses[f.pose_i].translation / v_norm;
      Jv += ev.J_pose_i * v;
      gradient.segment<6>(6 * idx.pose_var[f.pose_i]) +=
          w * ev.J_pose_i.transpose() * ev.residual;
    }
    if (f.pose_j >= 0 && idx.pose_var[f.pose_j] >= 0 && ev.J_pose_j.size() > 0) {
      Vector6d v;
      v.head<3>().setZero();
      v.tail<3>() = graph.poses[f.pose_j].translation / v_norm;
      Jv += ev.J_pose_j * v;
      gradient.segment<6>(6 * idx.pose_var[f.pose_j]) +=
          w * ev.J_pose_j.transpose() * ev.residual;
    }
    if (f.landmark >= 0 && idx.landmark_var[f.landmark] >= 0 &&
        ev.J_landmark.size() > 0) {
      Jv += ev.J_landmark * (graph.landmarks[f.landmark].position / v_norm);
      gradient.segment<3>(6 * idx.n_pose_vars +
                          3 * idx.landmark_var[f.landmark]) +=
          w * ev.J_landmark.transpose() * ev.residual;
    }

    const double grad_along = w * ev.residual.dot(Jv);
    const double curv_along = w * Jv.squaredNorm();

    double trace = 0.0;
    if (f.pose_i >= 0 && idx.pose_var[f.pose_i] >= 0 && ev.J_pose_i.size() > 0) {
      trace += ev.J_pose_i.squaredNorm();
    }
    if (f.pose_j >= 0 && idx.pose_var[f.pose_j] >= 0 && ev.J_pose_j.size() > 0) {
      trace += ev.J_pose_j.squaredNorm();
    }
    if (f.landmark >= 0 && idx.landmark_var[f.landmark] >= 0 &&
        ev.J_landmark.size() > 0) {
      trace += ev.J_landmark.squaredNorm();
    }
    report.hessian_trace += w * trace;

    switch (f.kind()) {
      case FactorKind::kRayDistance:
      case FactorKind::kDepthPrior:
        report.metric_gradient += grad_along;
        report.metric_curvature += curv_along;
        break;
      case FactorKind::kReprojection:
      case FactorKind::kRelativePose:
        report.reprojection_gradient += grad_along;
        report.reprojection_curvature += curv_along;
        break;
    }
  }

  report.gradient_norm = gradient.norm();
  return report;
}

void dump_graph(const FactorGraph& graph, std::ostream& out) {
  const auto& K = graph.intrinsics;
  out.precision(17);
  out << "# mslam factor graph v1\n";
  out << "intrinsics " << K.fx << ' ' << K.fy << ' ' << K.cx << ' ' << K.cy
      << ' ' << K.width << ' ' << K.height << '\n';
  out << "gauge " << graph.gauge_pose << '\n';
  for (size_t i = 0; i < graph.poses.size(); ++i) {
    const Pose& p = graph.poses[i];
    out << "pose " << i << ' ' << int(graph.pose_fixed[i]) << ' '
        << p.rotation.w() << ' ' << p.rotation.x() << ' ' << p.rotation.y()
        << ' ' << p.rotation.z() << ' ' << p.translation.x() << ' '
        << p.translation.y() << ' ' << p.translation.z() << '\n';
  }
  for (size_t i = 0; i < graph.landmarks.size(); ++i) {
    const Landmark& l = graph.landmarks[i];
    out << "landmark " << i << ' ' << int(graph.landmark_fixed[i]) << ' '
        << l.id << ' ' << l.position.x() << ' ' << l.position.y() << ' '
        << l.position.z() << '\n';
  }
  for (const Factor& f : graph.factors) {
    switch (f.kind()) {
      case FactorKind::kReprojection: {
        const auto& m = std::get<ReprojectionMeasurement>(f.measurement);
        out << "factor reproj " << f.pose_i << ' ' << f.landmark << ' '
            << f.information << ' ' << f.robust_delta << ' ' << m.pixel.x()
            << ' ' << m.pixel.y() << '\n';
        break;
      }
      case FactorKind::kRayDistance: {
        const auto& m = std::get<RayDistanceMeasurement>(f.measurement);
        out << "factor ray " << f.pose_i << ' ' << f.landmark << ' '
            << f.information << ' ' << f.robust_delta << ' '
            << int(m.pose_variable);
        for (int c = 0; c < 3; ++c) out << ' ' << m.ray.direction[c];
        for (int c = 0; c < 3; ++c) out << ' ' << m.ray.moment[c];
        for (int c = 0; c < 3; ++c) out << ' ' << m.bearing_cam[c];
        out << '\n';
        break;
      }
      case FactorKind::kDepthPrior: {
        const auto& m = std::get<DepthPriorMeasurement>(f.measurement);
        out << "factor depth " << f.pose_i << ' ' << f.landmark << ' '
            << f.information << ' ' << f.robust_delta << ' ' << m.log_depth
            << '\n';
        break;
      }
      case FactorKind::kRelativePose: {
        const auto& m = std::get<RelativePoseMeasurement>(f.measurement);
        out << "factor relpose " << f.pose_i << ' ' << f.pose_j << ' '
            << f.information << ' ' << f.robust_delta << ' '
            << m.rotation_j_from_i.w() << ' ' << m.rotation_j_from_i.x() << ' '
            << m.rotation_j_from_i.y() << ' ' << m.rotation_j_from_i.z();
        for (int c = 0; c < 3; ++c) out << ' ' << m.translation_direction[c];
        out << '\n';
        break;
      }
    }
  }
}

}  // namespace mslam
