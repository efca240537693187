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

#include "s2r/simulanes/weather.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "s2r/errors.hpp"

namespace s2r::simulanes {

void WeatherParams::validate() const {
  if (sun_amplitude_deg < 0.0 || sun_amplitude_deg > 90.0) {
    throw ConfigError("sun amplitude must be within [0, 90] degrees");
  }
  if (!(sun_period_s > 0.0)) throw ConfigError("sun period must be positive");
  if (storm_rate_per_s < 0.0 || !(storm_ramp_s > 0.0) || storm_hold_s < 0.0 ||
      !(deposit_time_constant_s > 0.0)) {
    throw ConfigError("storm parameters out of range");
  }
  if (base_cloudiness < 0.0 || base_cloudiness > 100.0) {
    throw ConfigError("base cloudiness must be within [0, 100]");
  }
}

namespace {

double sun_altitude(const WeatherParams& p, double t) {
  return p.sun_amplitude_deg *
         std::sin(2.0 * std::numbers::pi * t / p.sun_period_s + p.sun_phase_rad);
}

}  // namespace

WeatherState WeatherState::initial(const WeatherParams& params) {
  params.validate();
  WeatherState s;
  s.sun_altitude_deg = sun_altitude(params, 0.0);
  s.cloudiness = params.base_cloudiness;
  return s;
}

WeatherState weather_step(const WeatherState& state, const WeatherParams& params,
                          double dt, std::mt19937_64& rng) {
  if (!(dt > 0.0)) throw ConfigError("weather step needs dt > 0");
  WeatherState s = state;
  s.time_s += dt;
  s.sun_altitude_deg = sun_altitude(params, s.time_s);
  if (!params.storms_enabled) return s;

  s.phase_elapsed_s += dt;
  const double ramp_rate = 1.0 / params.storm_ramp_s;
  switch (s.phase) {
    case StormPhase::kIdle: {
      const double p_start = 1.0 - std::exp(-params.storm_rate_per_s * dt);
      if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p_start) {
        s.phase = StormPhase::kRising;
        s.phase_elapsed_s = 0.0;
      }
      break;
    }
    case StormPhase::kRising:
      s.storm_intensity = std::min(1.0, s.storm_intensity + ramp_rate * dt);
      if (s.storm_intensity >= 1.0) {
        s.phase = StormPhase::kHolding;
        s.phase_elapsed_s = 0.0;
      }
      break;
    case StormPhase::kHolding:
      if (s.phase_elapsed_s >= params.storm_hold_s) {
        s.phase = StormPhase::kFalling;
        s.phase_elapsed_s = 0.0;
      }
      break;
    case StormPhase::kFalling:
      s.storm_intensity = std::max(0.0, s.storm_intensity - ramp_rate * dt);
      if (s.storm_intensity <= 0.0) {
        s.phase = StormPhase::kIdle;
        s.phase_elapsed_s = 0.0;
      }
      break;
  }

  const double i = s.storm_intensity;
  s.cloudiness = std::clamp(params.base_cloudiness + (100.0 - params.base_cloudiness) * i,
                            0.0, 100.0);
  s.precipitation = 100.0 * std::clamp((i - 0.3) / 0.7, 0.0, 1.0);
  const double blend = 1.0 - std::exp(-dt / params.deposit_time_constant_s);
  s.precipitation_deposits = std::clamp(
      s.precipitation_deposits + (s.precipitation - s.precipitation_deposits) * blend,
      0.0, 100.0);
  return s;
}

void to_json(nlohmann::json& j, const WeatherState& w) {
  j = {{"time_s", w.time_s},
       {"sun_altitude_deg", w.sun_altitude_deg},
       {"storm_intensity", w.storm_intensity},
       {"cloudiness", w.cloudiness},
       {"precipitation", w.precipitation},
       {"precipitation_deposits", w.precipitation_deposits}};
}

}  // namespace s2r::simulanes
