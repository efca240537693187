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

#include "s2r/data/dataset.hpp"

#include <opencv2/imgcodecs.hpp>

#include "s2r/errors.hpp"
#include "s2r/lane/tusimple_io.hpp"

namespace s2r::data {

std::string to_string(Domain domain) {
  return domain == Domain::kSim ? "sim" : "real";
}

FrameSample FrameSample::without_label() const {
  FrameSample copy = *this;
  copy.label.reset();
  return copy;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.domain = domain;
  out.mapping = mapping;
  out.samples.reserve(indices.size());
  for (std::size_t k : indices) out.samples.push_back(samples.at(k));
  return out;
}

std::shared_ptr<const lane::LaneClassMapping> resolve_class_mapping(
    const std::string& name, const std::filesystem::path& root) {
  if (name == "simulanes") {
    return std::make_shared<lane::LaneClassMapping>(
        lane::LaneClassMapping::simulanes_default());
  }
  if (name == "tusimple") {
    return std::make_shared<lane::LaneClassMapping>(
        lane::LaneClassMapping::tusimple_default());
  }
  std::filesystem::path file = name;
  if (file.is_relative()) file = root / file;
  return std::make_shared<lane::LaneClassMapping>(
      lane::LaneClassMapping::from_file(file));
}

Dataset load_dataset(const DatasetManifest& manifest, Domain domain,
                     const LoadOptions& options) {
  Dataset ds;
  ds.domain = domain;
  ds.mapping = resolve_class_mapping(manifest.class_mapping, manifest.root);

  for (const auto& rel : manifest.label_files) {
    const auto label_file = manifest.root / rel;
    const auto records = lane::read_label_file(label_file);
    for (std::size_t k = 0; k < records.size(); ++k) {
      const auto& rec = records[k];
      const auto image_path = manifest.root / rec.raw_file;
      if (!std::filesystem::exists(image_path)) {
        throw LoadError("record " + std::to_string(k + 1) + " of " +
                        label_file.string() + ": image '" + rec.raw_file +
                        "' not found");
      }
      FrameSample s;
      s.image = cv::imread(image_path.string(), cv::IMREAD_COLOR);
      if (s.image.empty()) {
        throw LoadError("record " + std::to_string(k + 1) + " of " +
                        label_file.string() + ": cannot decode '" +
                        rec.raw_file + "'");
      }
      s.domain = domain;
      s.source = rec.raw_file;
      if (rec.label && !options.strip_labels) {
        auto label = *rec.label;
        try {
          label.validate(s.image.cols);
        } catch (const ValidationError& e) {
          throw ParseError(label_file.string() + ": " + e.what(), k + 1);
        }
        if (manifest.slot_layout == SlotLayout::kEgoRelative) {
          label = lane::assign_lane_slots(label, 4, s.image.cols);
        }
        s.label = std::move(label);
      } else if (options.require_labels && !rec.label) {
        throw LoadError("record " + std::to_string(k + 1) + " of " +
                        label_file.string() + " has no labels");
      }
      ds.samples.push_back(std::move(s));
    }
  }
  if (manifest.frame_count != 0 && manifest.frame_count != ds.samples.size()) {
    throw LoadError("manifest declares " + std::to_string(manifest.frame_count) +
                    " frames but the label files hold " +
                    std::to_string(ds.samples.size()));
  }
  return ds;
}

}  // namespace s2r::data
