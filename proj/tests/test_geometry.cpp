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

#include "mslam/geometry.hpp"
#include "mslam/rng.hpp"

using namespace mslam;

namespace {

Vector6d random_twist(Rng& rng, double max_angle = 3.0) {
  Vector6d twist;
  twist.head<3>() = rng.uniform(0.0, max_angle) * rng.unit_vector3();
  twist.tail<3>() = rng.gaussian3();
  return twist;
}

Pose random_pose(Rng& rng) { return se3_exp(random_twist(rng)); }

}  // namespace

TEST_CASE("se3_exp: zero twist is the identity") {
  const Pose p = se3_exp(Vector6d::Zero());
  CHECK(p.is_approx(Pose::Identity(), 1e-15));
}

TEST_CASE("se3_exp: quarter turn about z") {
  Vector6d twist = Vector6d::Zero();
  twist[2] = M_PI / 2.0;
  const Pose p = se3_exp(twist);

  // Rodrigues by hand: R maps x to y.
  Eigen::Matrix3d expected;
  expected << 0, -1, 0,  //
      1, 0, 0,           //
      0, 0, 1;
  CHECK((p.rotation_matrix() - expected).norm() < 1e-12);
  CHECK(p.translation.norm() < 1e-15);
}

TEST_CASE("se3 log/exp round-trip on 100 random twists") {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vector6d twist = random_twist(rng, 3.1);  // below pi
    const Vector6d back = se3_log(se3_exp(twist));
    CHECK((back - twist).norm() < 1e-9);
  }
}

TEST_CASE("se3_exp small-angle branch stays consistent") {
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    Vector6d twist;
    twist.head<3>() = 1e-9 * rng.unit_vector3();
    twist.tail<3>() = rng.gaussian3();
    const Vector6d back = se3_log(se3_exp(twist));
    CHECK((back - twist).norm() < 1e-12);
  }
}

TEST_CASE("pose group laws") {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Pose a = random_pose(rng);
    const Pose b = random_pose(rng);
    const Pose c = random_pose(rng);

    CHECK(((a * b) * c).is_approx(a * (b * c), 1e-9));
    CHECK((a * a.inverse()).is_approx(Pose::Identity(), 1e-9));
    CHECK((a.inverse() * a).is_approx(Pose::Identity(), 1e-9));

    const Eigen::Vector3d p = rng.gaussian3();
    CHECK(((a * b) * p - a * (b * p)).norm() < 1e-9);
  }
}

TEST_CASE("rotation stays orthonormal through long composition chains") {
  Rng rng(14);
  Pose acc = Pose::Identity();
  for (int i = 0; i < 2000; ++i) {
    acc = acc * random_pose(rng);
  }
  const Eigen::Matrix3d R = acc.rotation_matrix();
  CHECK((R * R.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-9);
  CHECK(R.determinant() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("project: optical axis") {
  CameraIntrinsics K{1.0, 1.0, 0.0, 0.0, 640, 480};
  const auto px = project(K, Pose::Identity(), Eigen::Vector3d(0, 0, 2));
  REQUIRE(px.has_value());
  CHECK(px->norm() < 1e-15);
}

TEST_CASE("project: hand-evaluated pinhole") {
  CameraIntrinsics K{100.0, 100.0, 50.0, 50.0, 640, 480};
  const auto px = project(K, Pose::Identity(), Eigen::Vector3d(1, 0, 2));
  REQUIRE(px.has_value());
  CHECK(px->x() == doctest::Approx(100.0).epsilon(1e-12));
  CHECK(px->y() == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("project: behind-camera signal") {
  CameraIntrinsics K{100.0, 100.0, 50.0, 50.0, 640, 480};
  CHECK_FALSE(project(K, Pose::Identity(), Eigen::Vector3d(0, 0, -1)).has_value());
  CHECK_FALSE(project(K, Pose::Identity(), Eigen::Vector3d(0, 0, 0)).has_value());
  CHECK_FALSE(project(K, Pose::Identity(), Eigen::Vector3d(0, 0, 1e-7)).has_value());
}

TEST_CASE("project: joint scaling of translation and landmark is invariant") {
  CameraIntrinsics K{320.0, 320.0, 320.0, 240.0, 640, 480};
  Rng rng(15);
  for (int i = 0; i < 50; ++i) {
    Pose T = random_pose(rng);
    Eigen::Vector3d X = rng.gaussian3() + Eigen::Vector3d(0, 0, 4);
    const auto base = project(K, T, X);
    if (!base) {
      continue;
    }
    for (double s : {0.5, 2.0, 10.0}) {
      Pose Ts = T;
      Ts.translation *= s;
      const auto scaled = project(K, Ts, (s * X).eval());
      REQUIRE(scaled.has_value());
      CHECK((*scaled - *base).norm() < 1e-9);
    }
  }
}

TEST_CASE("plucker_from_camera: camera at origin has zero moment") {
  CameraIntrinsics K{320.0, 320.0, 320.0, 240.0, 640, 480};
  Rng rng(16);
  for (int i = 0; i < 20; ++i) {
    Pose T;
    T.rotation = random_pose(rng).rotation;  // rotation only, center at origin
    const Eigen::Vector2d px(rng.uniform(0, 640), rng.uniform(0, 480));
    const PluckerRay ray = plucker_from_camera(T, px, K);
    CHECK(ray.moment.norm() < 1e-12);
    CHECK(ray.satisfies_invariants());
  }
}

TEST_CASE("plucker_from_camera: hand-computed moment") {
  CameraIntrinsics K{320.0, 320.0, 320.0, 240.0, 640, 480};
  // Identity rotation, camera center (1,0,0): cam_from_world translation -C.
  Pose T;
  T.translation = Eigen::Vector3d(-1, 0, 0);
  const PluckerRay ray =
      plucker_from_camera(T, Eigen::Vector2d(K.cx, K.cy), K);
  CHECK((ray.direction - Eigen::Vector3d(0, 0, 1)).norm() < 1e-12);
  CHECK((ray.moment - Eigen::Vector3d(0, -1, 0)).norm() < 1e-12);
}

TEST_CASE("plucker rays always satisfy d.m = 0") {
  CameraIntrinsics K{320.0, 320.0, 320.0, 240.0, 640, 480};
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const Pose T = random_pose(rng);
    const Eigen::Vector2d px(rng.uniform(0, 640), rng.uniform(0, 480));
    const PluckerRay ray = plucker_from_camera(T, px, K);
    CHECK(std::abs(ray.direction.norm() - 1.0) < 1e-12);
    CHECK(std::abs(ray.direction.dot(ray.moment)) < 1e-12);
  }
}

TEST_CASE("ray_point_distance: hand-computed cases") {
  PluckerRay ray;
  ray.direction = Eigen::Vector3d(0, 0, 1);
  ray.moment = Eigen::Vector3d(1, 0, 0).cross(ray.direction);  // center (1,0,0)
  CHECK(ray_point_distance(ray, Eigen::Vector3d(1, 0, 3)) < 1e-15);
  // Scaling the on-ray point by 2 moves it one unit off the line.
  CHECK(ray_point_distance(ray, Eigen::Vector3d(2, 0, 6)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  PluckerRay axis;  // the z axis
  axis.direction = Eigen::Vector3d(0, 0, 1);
  axis.moment.setZero();
  CHECK(ray_point_distance(axis, Eigen::Vector3d(1, 0, 5)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ray_point_distance agrees with the parametric closest-point oracle") {
  CameraIntrinsics K{320.0, 320.0, 320.0, 240.0, 640, 480};
  Rng rng(18);
  for (int i = 0; i < 200; ++i) {
    const Pose T = random_pose(rng);
    const Eigen::Vector2d px(rng.uniform(0, 640), rng.uniform(0, 480));
    const PluckerRay ray = plucker_from_camera(T, px, K);
    const Eigen::Vector3d X = 3.0 * rng.gaussian3();

    // Independent oracle: || (X - C) - ((X - C) . d) d ||.
    const Eigen::Vector3d C = T.camera_center();
    const Eigen::Vector3d rel = X - C;
    const double oracle = (rel - rel.dot(ray.direction) * ray.direction).norm();
    CHECK(ray_point_distance(ray, X) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("ray distance is scale sensitive for off-origin centers") {
  CameraIntrinsics K{320.0, 320.0, 320.0, 240.0, 640, 480};
  Rng rng(19);
  int tested = 0;
  for (int i = 0; i < 200 && tested < 100; ++i) {
    Pose T = random_pose(rng);
    if (T.camera_center().norm() < 0.3) {
      continue;
    }
    const Eigen::Vector2d px(rng.uniform(0, 640), rng.uniform(0, 480));
    const PluckerRay ray = plucker_from_camera(T, px, K);
    const Eigen::Vector3d C = T.camera_center();
    // A point on the ray, in front of the camera.
    const Eigen::Vector3d X = C + rng.uniform(0.5, 5.0) * ray.direction;
    CHECK(ray_point_distance(ray, X) < 1e-12);

    // Scaling moves the point off the anchored line unless the center's
    // component orthogonal to the direction vanishes.
    const Eigen::Vector3d c_perp = C - C.dot(ray.direction) * ray.direction;
    if (c_perp.norm() < 1e-3) {
      continue;
    }
    for (double s : {0.5, 2.0}) {
      const double d = ray_point_distance(ray, (s * X).eval());
      CHECK(d > 1e-6);
      // Exact displacement: |s - 1| * ||c_perp||.
      CHECK(d == doctest::Approx(std::abs(s - 1.0) * c_perp.norm()).epsilon(1e-9));
    }
    ++tested;
  }
  CHECK(tested == 100);
}
