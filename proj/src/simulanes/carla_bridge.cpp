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

#include "s2r/simulanes/carla_bridge.hpp"

#include <cstdlib>

#include <httplib.h>
#include <opencv2/imgcodecs.hpp>

#include "s2r/errors.hpp"

namespace s2r::simulanes {

namespace {

Point3 point_from_json(const nlohmann::json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

std::string describe(httplib::Error err) { return httplib::to_string(err); }

}  // namespace

CarlaEndpoint CarlaEndpoint::from_env() {
  CarlaEndpoint ep;
  if (const char* host = std::getenv("SIMLANES_CARLA_HOST")) ep.host = host;
  if (const char* port = std::getenv("SIMLANES_CARLA_PORT")) {
    try {
      ep.port = std::stoi(port);
    } catch (const std::exception&) {
      throw ConfigError(std::string("SIMLANES_CARLA_PORT is not a number: ") + port);
    }
  }
  return ep;
}

CarlaBridgeBackend::CarlaBridgeBackend(CarlaEndpoint endpoint, lane::LaneClassMapping classes)
    : endpoint_(std::move(endpoint)),
      classes_(std::move(classes)),
      client_(std::make_unique<httplib::Client>(endpoint_.host, endpoint_.port)) {
  const auto secs = static_cast<time_t>(endpoint_.timeout_s);
  client_->set_connection_timeout(std::min<time_t>(secs, 5), 0);
  client_->set_read_timeout(secs, 0);
  client_->set_write_timeout(secs, 0);
}

CarlaBridgeBackend::~CarlaBridgeBackend() = default;

nlohmann::json CarlaBridgeBackend::get(const std::string& path) {
  auto res = client_->Get(path);
  if (!res) {
    throw BackendError("CARLA bridge at " + endpoint_.host + ":" +
                       std::to_string(endpoint_.port) + " unreachable (" +
                       describe(res.error()) + ")");
  }
  if (res->status != 200) throw BackendError("bridge " + path + ": " + res->body);
  return nlohmann::json::parse(res->body);
}

nlohmann::json CarlaBridgeBackend::post(const std::string& path, const nlohmann::json& body) {
  auto res = client_->Post(path, body.dump(), "application/json");
  if (!res) {
    throw BackendError("CARLA bridge at " + endpoint_.host + ":" +
                       std::to_string(endpoint_.port) + " unreachable (" +
                       describe(res.error()) + ")");
  }
  if (res->status == 404) throw ConfigError("bridge " + path + ": " + res->body);
  if (res->status != 200) throw BackendError("bridge " + path + ": " + res->body);
  return res->body.empty() ? nlohmann::json::object() : nlohmann::json::parse(res->body);
}

int CarlaBridgeBackend::marking_id(const std::string& name) const {
  try {
    return classes_.id_of(name);
  } catch (const Error&) {
    return classes_.id_of("other");
  }
}

std::vector<std::string> CarlaBridgeBackend::available_maps() {
  return get("/maps").at("maps").get<std::vector<std::string>>();
}

void CarlaBridgeBackend::load_map(const std::string& map, std::uint64_t seed) {
  post("/load_map", {{"map", map}, {"seed", seed}});
}

void CarlaBridgeBackend::respawn(std::uint64_t seed) { post("/respawn", {{"seed", seed}}); }

EgoState CarlaBridgeBackend::tick(double dt) {
  const auto j = post("/tick", {{"dt", dt}});
  return {j.at("time_s").get<double>(), point_from_json(j.at("position")),
          j.at("yaw").get<double>()};
}

void CarlaBridgeBackend::apply_weather(const WeatherState& weather) {
  post("/weather", weather);
}

LaneNeighbourhood CarlaBridgeBackend::lanes_near_ego(double behind_m, double ahead_m,
                                                     double spacing_m) {
  const auto j =
      post("/lanes", {{"behind", behind_m}, {"ahead", ahead_m}, {"spacing", spacing_m}});
  LaneNeighbourhood hood;
  hood.ego_index = j.at("ego_index").get<int>();
  for (const auto& l : j.at("lanes")) {
    LaneWaypoints lw;
    for (const auto& p : l.at("centers")) lw.centers.push_back(point_from_json(p));
    if (l.contains("headings")) lw.headings = l.at("headings").get<std::vector<double>>();
    lw.width = l.at("width").get<double>();
    lw.left_marking = marking_id(l.at("left_marking").get<std::string>());
    lw.right_marking = marking_id(l.at("right_marking").get<std::string>());
    hood.lanes.push_back(std::move(lw));
  }
  return hood;
}

Camera CarlaBridgeBackend::camera() {
  const auto j = get("/camera");
  Camera cam;
  cam.intrinsics = j.at("intrinsics").get<PinholeIntrinsics>();
  cam.pose = j.at("pose").get<CameraPose>();
  return cam;
}

cv::Mat CarlaBridgeBackend::capture() {
  auto res = client_->Get("/capture");
  if (!res) throw BackendError("CARLA bridge unreachable (" + describe(res.error()) + ")");
  if (res->status != 200) throw BackendError("bridge /capture: " + res->body);
  std::vector<uchar> bytes(res->body.begin(), res->body.end());
  cv::Mat img = cv::imdecode(bytes, cv::IMREAD_COLOR);
  if (img.empty()) throw BackendError("bridge /capture returned an undecodable image");
  return img;
}

nlohmann::json CarlaBridgeBackend::frame_metadata() { return get("/metadata"); }

}  // namespace s2r::simulanes
