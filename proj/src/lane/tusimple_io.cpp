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

#include "s2r/lane/tusimple_io.hpp"

#include <fstream>

#include <json.hpp>

#include "s2r/errors.hpp"

namespace s2r::lane {

using nlohmann::json;

LabelRecord parse_label_record(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw ParseError("label record is not an object", line_no);

  LabelRecord rec;
  try {
    rec.raw_file = j.at("raw_file").get<std::string>();
    if (!j.contains("lanes")) return rec;

    LanePointLabel label;
    label.h_samples = j.at("h_samples").get<std::vector<int>>();
    const auto& lanes = j.at("lanes");
    if (!lanes.is_array()) throw ParseError("'lanes' must be a list", line_no);
    for (const auto& xs : lanes) {
      Lane lane;
      lane.xs = xs.get<std::vector<double>>();
      if (lane.xs.size() != label.h_samples.size()) {
        throw ParseError("lane has " + std::to_string(lane.xs.size()) +
                             " x values but there are " +
                             std::to_string(label.h_samples.size()) + " h_samples",
                         line_no);
      }
      label.lanes.push_back(std::move(lane));
    }
    if (j.contains("classes")) {
      auto classes = j.at("classes").get<std::vector<int>>();
      if (classes.size() != label.lanes.size()) {
        throw ParseError("'classes' length differs from 'lanes'", line_no);
      }
      for (std::size_t k = 0; k < classes.size(); ++k) {
        label.lanes[k].raw_class = classes[k];
      }
    }
    rec.label = std::move(label);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad label record: ") + e.what(), line_no);
  }
  return rec;
}

std::string format_label_record(const LabelRecord& record) {
  json j;
  if (record.label) {
    const auto& label = *record.label;
    json lanes = json::array();
    std::vector<int> classes;
    bool has_classes = false;
    for (const auto& lane : label.lanes) {
      lanes.push_back(lane.xs);
      classes.push_back(lane.raw_class);
      has_classes = has_classes || lane.raw_class != kUnlabelledClass;
    }
    j["lanes"] = std::move(lanes);
    j["h_samples"] = label.h_samples;
    if (has_classes) j["classes"] = classes;
  }
  j["raw_file"] = record.raw_file;
  return j.dump();
}

std::vector<LabelRecord> read_label_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open label file " + path.string());
  std::vector<LabelRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_label_record(line, line_no));
  }
  return records;
}

void write_label_file(const std::filesystem::path& path,
                      const std::vector<LabelRecord>& records) {
  std::ofstream out(path);
  if (!out) throw LoadError("cannot write label file " + path.string());
  for (const auto& r : records) out << format_label_record(r) << '\n';
}

}  // namespace s2r::lane
