// Copyright 2026 The sim2real-lanes Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "s2r/simulanes/camera.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include "s2r/errors.hpp"
#include "s2r/lane/labels.hpp"

namespace s2r::simulanes {

PinholeIntrinsics PinholeIntrinsics::from_fov(int width, int height,
                                              double horizontal_fov_deg) {
  PinholeIntrinsics k;
  k.width = width;
  k.height = height;
  k.fx = width / (2.0 * std::tan(horizontal_fov_deg * std::numbers::pi / 360.0));
  k.fy = k.fx;
  k.cx = width / 2.0;
  k.cy = height / 2.0;
  k.validate();
  return k;
}

void PinholeIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0) || width <= 0 || height <= 0) {
    throw ConfigError("camera intrinsics must have positive focal lengths and size");
  }
}

Eigen::Matrix3d CameraPose::world_to_camera() const {
  const Point3 heading(std::cos(yaw), std::sin(yaw), 0.0);
  const Point3 left(-std::sin(yaw), std::cos(yaw), 0.0);
  const Point3 up(0.0, 0.0, 1.0);
  const Point3 forward = std::cos(pitch) * heading - std::sin(pitch) * up;
  const Point3 cam_up = std::sin(pitch) * heading + std::cos(pitch) * up;
  const Point3 right0 = -left;
  const Point3 down0 = -cam_up;
  const Point3 right = std::cos(roll) * right0 + std::sin(roll) * down0;
  const Point3 down = -std::sin(roll) * right0 + std::cos(roll) * down0;
  Eigen::Matrix3d r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return r;
}

Point3 Camera::to_camera(const Point3& world) const {
  return pose.world_to_camera() * (world - pose.position);
}

std::optional<Eigen::Vector2d> Camera::project(const Point3& world, double near) const {
  const Point3 c = to_camera(world);
  if (c.z() < near) return std::nullopt;
  return Eigen::Vector2d(intrinsics.fx * c.x() / c.z() + intrinsics.cx,
                         intrinsics.fy * c.y() / c.z() + intrinsics.cy);
}

void to_json(nlohmann::json& j, const PinholeIntrinsics& k) {
  j = {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy},
       {"width", k.width}, {"height", k.height}};
}

void from_json(const nlohmann::json& j, PinholeIntrinsics& k) {
  j.at("fx").get_to(k.fx);
  j.at("fy").get_to(k.fy);
  j.at("cx").get_to(k.cx);
  j.at("cy").get_to(k.cy);
  j.at("width").get_to(k.width);
  j.at("height").get_to(k.height);
}

void to_json(nlohmann::json& j, const CameraPose& p) {
  j = {{"position", {p.position.x(), p.position.y(), p.position.z()}},
       {"yaw", p.yaw}, {"pitch", p.pitch}, {"roll", p.roll}};
}

void from_json(const nlohmann::json& j, CameraPose& p) {
  const auto& pos = j.at("position");
  p.position = Point3(pos.at(0).get<double>(), pos.at(1).get<double>(),
                      pos.at(2).get<double>());
  j.at("yaw").get_to(p.yaw);
  j.at("pitch").get_to(p.pitch);
  p.roll = j.value("roll", 0.0);
}

namespace {

struct SplineDeleter {
  void operator()(gsl_spline* s) const { gsl_spline_free(s); }
};
struct AccelDeleter {
  void operator()(gsl_interp_accel* a) const { gsl_interp_accel_free(a); }
};

}  // namespace

FittedLane project_and_fit(std::span<const Point3> boundary, const Camera& camera,
                           std::span<const int> anchor_rows, double near) {
  FittedLane out;
  out.xs.assign(anchor_rows.size(), lane::kAbsent);
  for (const auto& p : boundary) {
    if (auto uv = camera.project(p, near)) out.projected.push_back(*uv);
  }
  std::sort(out.projected.begin(), out.projected.end(),
            [](const auto& a, const auto& b) { return a.y() < b.y(); });
  out.projected.erase(std::unique(out.projected.begin(), out.projected.end(),
                                  [](const auto& a, const auto& b) {
                                    return std::abs(a.y() - b.y()) < 1e-9;
                                  }),
                      out.projected.end());
  const std::size_t n = out.projected.size();
  if (n < 2) return out;

  std::vector<double> rows(n), cols(n);
  for (std::size_t k = 0; k < n; ++k) {
    rows[k] = out.projected[k].y();
    cols[k] = out.projected[k].x();
  }

  std::unique_ptr<gsl_spline, SplineDeleter> spline;
  std::unique_ptr<gsl_interp_accel, AccelDeleter> accel(gsl_interp_accel_alloc());
  if (n >= 4) {
    spline.reset(gsl_spline_alloc(gsl_interp_cspline, n));
  } else {
    spline.reset(gsl_spline_alloc(gsl_interp_linear, n));
  }
  gsl_set_error_handler_off();
  if (gsl_spline_init(spline.get(), rows.data(), cols.data(), n) != GSL_SUCCESS) {
    throw GeometryError("spline fit failed");
  }

  const double width = camera.intrinsics.width;
  for (std::size_t j = 0; j < anchor_rows.size(); ++j) {
    const double r = anchor_rows[j];
    if (r < rows.front() || r > rows.back()) continue;
    const double x = gsl_spline_eval(spline.get(), r, accel.get());
    if (x >= 0.0 && x < width) out.xs[j] = x;
  }
  return out;
}

bool label_is_continuous(std::span<const double> xs, double max_dx) {
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (xs[k] < 0.0 || xs[k - 1] < 0.0) continue;
    if (std::abs(xs[k] - xs[k - 1]) > max_dx) return false;
  }
  return true;
}

}  // namespace s2r::simulanes
