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
#include <optional>
#include <string>
#include <vector>

#include "s2r/lane/labels.hpp"

namespace s2r::lane {

// One line of a TuSimple-style label file:
//   {"lanes": [[x...], ...], "h_samples": [y...], "raw_file": "...",
//    "classes": [id...]}
// "classes" is an optional extension. A record without "lanes" is an
// unlabelled frame.
struct LabelRecord {
  std::string raw_file;
  std::optional<LanePointLabel> label;
};

// Throws ParseError carrying `line_no` on malformed input.
LabelRecord parse_label_record(const std::string& line, std::size_t line_no);
std::string format_label_record(const LabelRecord& record);

std::vector<LabelRecord> read_label_file(const std::filesystem::path& path);
void write_label_file(const std::filesystem::path& path,
                      const std::vector<LabelRecord>& records);

}  // namespace s2r::lane
