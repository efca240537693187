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

#include "s2r/lane/classes.hpp"

#include <fstream>
#include <sstream>

#include "s2r/errors.hpp"

namespace s2r::lane {

std::string_view to_string(SuperClass c) {
  return c == SuperClass::kDashed ? "dashed" : "continuous";
}

SuperClass super_class_from_string(std::string_view name) {
  if (name == "dashed") return SuperClass::kDashed;
  if (name == "continuous") return SuperClass::kContinuous;
  throw ConfigError("unknown lane super-class '" + std::string(name) + "'");
}

LaneClassMapping::LaneClassMapping(std::vector<RawLaneClass> universe)
    : universe_(std::move(universe)) {
  if (universe_.empty()) throw ConfigError("lane class universe is empty");
  for (std::size_t k = 0; k < universe_.size(); ++k) {
    if (!index_.emplace(universe_[k].id, k).second) {
      throw ConfigError("duplicate raw lane class id " +
                        std::to_string(universe_[k].id));
    }
  }
}

LaneClassMapping LaneClassMapping::simulanes_default() {
  using enum SuperClass;
  return LaneClassMapping({
      {0, "broken_white", kDashed},
      {1, "broken_yellow", kDashed},
      {2, "solid_white", kContinuous},
      {3, "solid_yellow", kContinuous},
      {4, "solid_solid_white", kContinuous},
      {5, "solid_solid_yellow", kContinuous},
      {6, "solid_broken_white", kContinuous},
      {7, "solid_broken_yellow", kContinuous},
      {8, "broken_solid_white", kContinuous},
      {9, "broken_solid_yellow", kContinuous},
      {10, "broken_broken_white", kDashed},
      {11, "broken_broken_yellow", kDashed},
      {12, "botts_dots", kDashed},
      {13, "curb", kContinuous},
      {14, "other", kContinuous},
  });
}

LaneClassMapping LaneClassMapping::tusimple_default() {
  using enum SuperClass;
  return LaneClassMapping({
      {1, "single_white_continuous", kContinuous},
      {2, "single_white_dashed", kDashed},
      {3, "single_yellow_continuous", kContinuous},
      {4, "single_yellow_dashed", kDashed},
      {5, "double_white_continuous", kContinuous},
      {6, "double_yellow_continuous", kContinuous},
      {7, "double_yellow_dashed", kDashed},
  });
}

LaneClassMapping LaneClassMapping::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open class mapping " + path.string());
  std::vector<RawLaneClass> universe;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    RawLaneClass cls;
    std::string super;
    if (!(fields >> cls.id >> cls.name >> super)) {
      throw ParseError("malformed class mapping entry in " + path.string(),
                       line_no);
    }
    cls.super = super_class_from_string(super);
    universe.push_back(std::move(cls));
  }
  return LaneClassMapping(std::move(universe));
}

void LaneClassMapping::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write class mapping " + path.string());
  out << "# id name super_class\n";
  for (const auto& c : universe_) {
    out << c.id << ' ' << c.name << ' ' << to_string(c.super) << '\n';
  }
}

SuperClass LaneClassMapping::map(int raw_id) const {
  return at(raw_id).super;
}

const RawLaneClass& LaneClassMapping::at(int raw_id) const {
  auto it = index_.find(raw_id);
  if (it == index_.end()) {
    throw MappingError("raw lane class id " + std::to_string(raw_id) +
                           " is not in the mapping universe",
                       raw_id);
  }
  return universe_[it->second];
}

int LaneClassMapping::id_of(std::string_view name) const {
  for (const auto& c : universe_) {
    if (c.name == name) return c.id;
  }
  throw MappingError("lane class name '" + std::string(name) + "' not found",
                     -1);
}

int LaneClassMapping::canonical_raw(SuperClass c) const {
  for (const auto& [id, k] : index_) {
    if (universe_[k].super == c) return id;
  }
  throw MappingError("no raw class maps to " + std::string(to_string(c)), -1);
}

}  // namespace s2r::lane
