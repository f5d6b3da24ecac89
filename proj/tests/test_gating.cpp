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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mslam/gating.hpp"
#include "mslam/rng.hpp"
#include "mslam/world.hpp"

using namespace mslam;

namespace {
const CameraIntrinsics kCam{320.0, 320.0, 320.0, 240.0, 640, 480};
}

TEST_CASE("temporal_uncertainty: static point with exact data is zero") {
  // Frame i at identity; frame j translated and slightly rotated.
  const Eigen::Vector3d X(0.3, -0.2, 2.0);
  Vector6d twist;
  twist << 0.02, -0.01, 0.03, 0.1, 0.05, -0.2;
  const Pose T_j = se3_exp(twist);  // cam_j_from_world == cam_j_from_cam_i

  const auto px_i = project(kCam, Pose::Identity(), X);
  REQUIRE(px_i.has_value());
  const double depth_i = X.z();
  const double depth_j = (T_j * X).z();

  const auto u = temporal_uncertainty({depth_i}, {depth_j}, {*px_i}, T_j, kCam);
  REQUIRE(u.size() == 1);
  CHECK(u[0] < 1e-12);
}

TEST_CASE("temporal_uncertainty: point moved 0.1 m along the optical axis") {
  // Static cameras, true depth 2.0, observed depth 2.1 after the move.
  const Eigen::Vector2d px(kCam.cx, kCam.cy);
  const auto u =
      temporal_uncertainty({2.0}, {2.1}, {px}, Pose::Identity(), kCam);
  CHECK(u[0] == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("temporal_uncertainty: 10% perturbed observation, identity pose") {
  const Eigen::Vector2d px(100.0, 200.0);
  const auto u =
      temporal_uncertainty({2.0}, {2.2}, {px}, Pose::Identity(), kCam);
  CHECK(u[0] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("temporal_uncertainty: behind-camera prediction gets max uncertainty") {
  Vector6d twist = Vector6d::Zero();
  twist[5] = -5.0;  // move camera so the point lands behind it
  const auto u = temporal_uncertainty({2.0}, {2.0}, {{kCam.cx, kCam.cy}},
                                      se3_exp(twist), kCam);
  CHECK(u[0] == kMaxUncertainty);
}

TEST_CASE("fuse_uncertainty: degenerate and midpoint balances") {
  GateParams params;
  params.alpha = 1.0;
  CHECK(fuse_uncertainty({0.2}, {0.4}, params)[0] == doctest::Approx(0.2));
  params.alpha = 0.0;
  CHECK(fuse_uncertainty({0.2}, {0.4}, params)[0] == doctest::Approx(0.4));
  params.alpha = 0.5;
  CHECK(fuse_uncertainty({0.2}, {0.4}, params)[0] ==
        doctest::Approx(0.3).epsilon(1e-15));
}

TEST_CASE("gate: sigmoid midpoint, paper operating points, boundedness") {
  GateParams params;  // tau = 0.07, T = 0.02, sigma0_sq = 1
  const GateField at_tau = gate({params.tau}, params);
  CHECK(at_tau.w[0] == doctest::Approx(0.5).epsilon(1e-15));

  const GateField above = gate({0.11}, params);
  CHECK(above.w[0] == doctest::Approx(1.0 / (1.0 + std::exp(2.0))).epsilon(1e-12));
  CHECK(above.w[0] == doctest::Approx(0.11920).epsilon(1e-4));

  const GateField at_zero = gate({0.0}, params);
  CHECK(at_zero.w[0] == doctest::Approx(1.0 / (1.0 + std::exp(-3.5))).epsilon(1e-12));
  CHECK(at_zero.w[0] == doctest::Approx(0.97069).epsilon(1e-4));
  CHECK(std::isfinite(at_zero.omega[0]));  // bounded even as u -> 0

  CHECK(at_zero.omega[0] == doctest::Approx(at_zero.w[0] / params.sigma0_sq));
}

TEST_CASE("gate: weight bounded in [0,1] over extreme inputs") {
  GateParams params;
  for (double u : {-1e9, -100.0, -1.0, 0.0, 0.07, 1.0, 100.0, 1e9}) {
    const double w = gate_weight(u, params);
    CHECK(std::isfinite(w));
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
  }
}

TEST_CASE("gate: strictly monotone decreasing in u") {
  GateParams params;
  Rng rng(21);
  for (int i = 0; i < 200; ++i) {
    const double u1 = rng.uniform(-0.5, 0.7);
    const double u2 = u1 + rng.uniform(1e-6, 0.5);
    CHECK(gate_weight(u1, params) > gate_weight(u2, params));
  }
}

TEST_CASE("gate: sigmoid Lipschitz bound |dw| <= h / (4T)") {
  GateParams params;
  Rng rng(22);
  for (int i = 0; i < 500; ++i) {
    const double u = rng.uniform(-0.3, 0.5);
    const double h = rng.uniform(1e-6, 0.2);
    const double dw = std::abs(gate_weight(u + h, params) - gate_weight(u, params));
    CHECK(dw <= h / (4.0 * params.temperature) + 1e-12);
  }
}

TEST_CASE("gate separates dynamic from static tracks on a simulated scene") {
  WorldConfig cfg;
  cfg.seed = 5;
  cfg.n_static_landmarks = 120;
  cfg.n_dynamic_landmarks = 40;
  cfg.dynamic_velocity = 0.05;
  cfg.n_keyframes = 12;
  cfg.pixel_noise_sigma = 0.3;
  cfg.prior_log_noise_sigma = 0.02;
  const SimWorld world = generate_world(cfg);

  GateParams params;
  double w_static_sum = 0.0, w_dynamic_sum = 0.0;
  int n_static = 0, n_dynamic = 0;

  for (int k = 1; k < cfg.n_keyframes; ++k) {
    const auto& prev = world.observations[k - 1];
    const auto& cur = world.observations[k];
    const Pose rel = world.cam_from_world[k] * world.cam_from_world[k - 1].inverse();

    // Join consecutive frames on landmark id.
    std::vector<double> d_i, d_j, u_spatial;
    std::vector<Eigen::Vector2d> px_i;
    std::vector<bool> dynamic;
    for (const auto& t_prev : prev.tracks) {
      for (const auto& t_cur : cur.tracks) {
        if (t_prev.landmark_id == t_cur.landmark_id) {
          d_i.push_back(t_prev.prior_depth);
          d_j.push_back(t_cur.prior_depth);
          px_i.push_back(t_prev.pixel);
          u_spatial.push_back(1.0 - t_cur.spatial_confidence);
          dynamic.push_back(t_cur.is_dynamic);
          break;
        }
      }
    }

    const auto u_temporal =
        temporal_uncertainty(d_i, d_j, px_i, rel, cfg.intrinsics);
    const auto u = fuse_uncertainty(u_spatial, u_temporal, params);
    const GateField field = gate(u, params);
    for (size_t t = 0; t < field.size(); ++t) {
      if (dynamic[t]) {
        w_dynamic_sum += field.w[t];
        ++n_dynamic;
      } else {
        w_static_sum += field.w[t];
        ++n_static;
      }
    }
  }

  REQUIRE(n_static > 100);
  REQUIRE(n_dynamic > 30);
  const double mean_static = w_static_sum / n_static;
  const double mean_dynamic = w_dynamic_sum / n_dynamic;
  CHECK(mean_dynamic < mean_static);
  CHECK(mean_dynamic < 0.25 * mean_static);  // clear separation at seed scale
}
