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

#pragma once

#include <memory>
#include <string>

#include "s2r/lane/classes.hpp"
#include "s2r/simulanes/backend.hpp"

namespace httplib {
class Client;
}

namespace s2r::simulanes {

struct CarlaEndpoint {
  std::string host = "localhost";
  int port = 2010;  // bridge port, not the CARLA RPC port
  double timeout_s = 30.0;

  // SIMLANES_CARLA_HOST / SIMLANES_CARLA_PORT override the defaults.
  static CarlaEndpoint from_env();
};

// Talks JSON over HTTP to tools/carla_bridge.py, which owns the actual CARLA
// client. Coordinates arrive already converted to the right-handed ENU frame.
// Marking names coming back from the bridge are looked up in `classes`.
class CarlaBridgeBackend final : public SimulatorBackend {
 public:
  CarlaBridgeBackend(CarlaEndpoint endpoint, lane::LaneClassMapping classes);
  ~CarlaBridgeBackend() override;

  std::string name() const override { return "carla"; }
  std::vector<std::string> available_maps() override;
  void load_map(const std::string& map, std::uint64_t seed) override;
  void respawn(std::uint64_t seed) override;
  EgoState tick(double dt) override;
  void apply_weather(const WeatherState& weather) override;
  LaneNeighbourhood lanes_near_ego(double behind_m, double ahead_m,
                                   double spacing_m) override;
  Camera camera() override;
  cv::Mat capture() override;
  nlohmann::json frame_metadata() override;

 private:
  nlohmann::json get(const std::string& path);
  nlohmann::json post(const std::string& path, const nlohmann::json& body);
  int marking_id(const std::string& name) const;

  CarlaEndpoint endpoint_;
  lane::LaneClassMapping classes_;
  std::unique_ptr<httplib::Client> client_;
};

}  // namespace s2r::simulanes
