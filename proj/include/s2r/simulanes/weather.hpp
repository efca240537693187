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

#include <random>

#include <json.hpp>

namespace s2r::simulanes {

enum class StormPhase { kIdle, kRising, kHolding, kFalling };

struct WeatherParams {
  // Sun altitude follows amplitude * sin(2 pi t / period + phase), degrees.
  double sun_amplitude_deg = 70.0;
  double sun_period_s = 600.0;
  double sun_phase_rad = 0.0;

  bool storms_enabled = true;
  double storm_rate_per_s = 1.0 / 120.0;  // Poisson rate of storm onsets
  double storm_ramp_s = 20.0;             // idle -> full intensity (and back)
  double storm_hold_s = 30.0;
  double base_cloudiness = 10.0;
  double deposit_time_constant_s = 15.0;  // puddles lag precipitation

  void validate() const;
};

struct WeatherState {
  double time_s = 0.0;
  double sun_altitude_deg = 0.0;
  double storm_intensity = 0.0;  // [0, 1]
  double cloudiness = 0.0;       // [0, 100]
  double precipitation = 0.0;    // [0, 100]
  double precipitation_deposits = 0.0;  // [0, 100]
  StormPhase phase = StormPhase::kIdle;
  double phase_elapsed_s = 0.0;

  static WeatherState initial(const WeatherParams& params);
};

// Advances time by dt. The sun moves deterministically; storms start at
// random (rate storm_rate_per_s), ramp up, hold, then ramp down, and every
// level stays within its bounds. With storms disabled only the sun changes.
WeatherState weather_step(const WeatherState& state, const WeatherParams& params,
                          double dt, std::mt19937_64& rng);

void to_json(nlohmann::json& j, const WeatherState& w);

}  // namespace s2r::simulanes
