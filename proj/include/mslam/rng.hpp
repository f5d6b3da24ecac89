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

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>

namespace mslam {

/// Seeded random source with hand-rolled transforms. std::mt19937_64 output
/// is pinned by the standard, while the distribution adaptors are not, so
/// drawing through this class keeps generated streams identical across
/// standard libraries (the determinism contract of the simulator).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [lo, hi], rejection-sampled to avoid modulo bias.
  int uniform_int(int lo, int hi) {
    const uint64_t range = static_cast<uint64_t>(hi - lo) + 1;
    const uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    uint64_t draw = gen_();
    while (draw >= limit) {
      draw = gen_();
    }
    return lo + static_cast<int>(draw % range);
  }

  /// Standard normal via Box-Muller (no state caching, one draw per call).
  double gaussian() {
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  double gaussian(double mean, double stddev) {
    return mean + stddev * gaussian();
  }

  Eigen::Vector2d gaussian2() {
    const double a = gaussian();
    const double b = gaussian();
    return {a, b};
  }

  Eigen::Vector3d gaussian3() {
    const double a = gaussian();
    const double b = gaussian();
    const double c = gaussian();
    return {a, b, c};
  }

  Eigen::Vector3d unit_vector3() {
    Eigen::Vector3d v = gaussian3();
    while (v.norm() < 1e-12) {
      v = gaussian3();
    }
    return v.normalized();
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace mslam
