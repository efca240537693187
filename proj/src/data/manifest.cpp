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

#include "s2r/data/manifest.hpp"

#include <fstream>

#include <json.hpp>

#include "s2r/errors.hpp"

namespace s2r::data {

using nlohmann::json;

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "train";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw ConfigError("unknown split '" + name + "'");
}

namespace {

json read_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw LoadError("cannot open manifest " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 1);
  }
}

}  // namespace

DatasetManifest load_manifest(const std::filesystem::path& manifest_file,
                              Split split) {
  const json j = read_json(manifest_file);
  DatasetManifest m;
  m.split = split;
  m.root = manifest_file.parent_path();
  try {
    if (j.contains("root")) {
      std::filesystem::path root = j.at("root").get<std::string>();
      m.root = root.is_absolute() ? root : manifest_file.parent_path() / root;
    }
    const std::string layout = j.value("layout", "flat");
    if (layout == "flat") {
      m.slot_layout = SlotLayout::kAsIs;
    } else if (layout == "tusimple") {
      m.slot_layout = SlotLayout::kEgoRelative;
    } else {
      throw ConfigError("unknown manifest layout '" + layout + "'");
    }
    m.class_mapping = j.value("class_mapping", "simulanes");
    const auto& splits = j.at("splits");
    const std::string name = to_string(split);
    if (!splits.contains(name)) {
      throw ConfigError("manifest " + manifest_file.string() + " has no '" +
                        name + "' split");
    }
    const auto& s = splits.at(name);
    const auto& labels = s.at("labels");
    if (labels.is_string()) {
      m.label_files.emplace_back(labels.get<std::string>());
    } else {
      for (const auto& f : labels) m.label_files.emplace_back(f.get<std::string>());
    }
    m.frame_count = s.value("count", std::size_t{0});
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad manifest: ") + e.what());
  }
  return m;
}

std::vector<Split> manifest_splits(const std::filesystem::path& manifest_file) {
  const json j = read_json(manifest_file);
  std::vector<Split> out;
  if (!j.contains("splits")) return out;
  for (const auto& [name, _] : j.at("splits").items()) {
    out.push_back(split_from_string(name));
  }
  return out;
}

void write_manifest(const std::filesystem::path& manifest_file,
                    const DatasetManifest& manifest) {
  json j = json::object();
  if (std::filesystem::exists(manifest_file)) j = read_json(manifest_file);
  j["layout"] = manifest.slot_layout == SlotLayout::kAsIs ? "flat" : "tusimple";
  j["class_mapping"] = manifest.class_mapping;
  json files = json::array();
  for (const auto& f : manifest.label_files) files.push_back(f.generic_string());
  j["splits"][to_string(manifest.split)] = {
      {"labels", files.size() == 1 ? files[0] : files},
      {"count", manifest.frame_count}};
  std::ofstream out(manifest_file);
  if (!out) throw LoadError("cannot write manifest " + manifest_file.string());
  out << j.dump(2) << '\n';
}

}  // namespace s2r::data
