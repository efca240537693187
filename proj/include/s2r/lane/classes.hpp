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

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace s2r::lane {

// Two-class taxonomy used for training and evaluation.
enum class SuperClass : int { kDashed = 0, kContinuous = 1 };

inline constexpr int kNumSuperClasses = 2;

std::string_view to_string(SuperClass c);
SuperClass super_class_from_string(std::string_view name);

struct RawLaneClass {
  int id = 0;
  std::string name;
  SuperClass super = SuperClass::kContinuous;
};

// Total table from raw dataset class ids to super-classes. The default
// tables are also shipped as editable text files under data/classes/.
class LaneClassMapping {
 public:
  explicit LaneClassMapping(std::vector<RawLaneClass> universe);

  // 15 simulator marking classes (type x colour); any combination that
  // contains a solid line counts as continuous.
  static LaneClassMapping simulanes_default();
  // Real-world marking classes of the TuSimple class annotations.
  static LaneClassMapping tusimple_default();

  // Text format, one class per line: `<id> <name> <dashed|continuous>`.
  // Blank lines and lines starting with '#' are ignored.
  static LaneClassMapping from_file(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  SuperClass map(int raw_id) const;
  bool contains(int raw_id) const { return index_.count(raw_id) != 0; }
  int id_of(std::string_view name) const;
  const RawLaneClass& at(int raw_id) const;
  // Smallest raw id mapping to `c`; used to lift super-classes back into
  // the raw universe.
  int canonical_raw(SuperClass c) const;

  const std::vector<RawLaneClass>& universe() const noexcept { return universe_; }

 private:
  std::vector<RawLaneClass> universe_;
  std::map<int, std::size_t> index_;
};

inline SuperClass map_lane_class(int raw_id, const LaneClassMapping& mapping) {
  return mapping.map(raw_id);
}

}  // namespace s2r::lane
