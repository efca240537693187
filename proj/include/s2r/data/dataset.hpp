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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "s2r/data/manifest.hpp"
#include "s2r/lane/classes.hpp"
#include "s2r/lane/labels.hpp"

namespace s2r::data {

enum class Domain { kSim, kReal };

std::string to_string(Domain domain);

// One image (8-bit, 3 channels, native resolution) with optional labels.
struct FrameSample {
  cv::Mat image;
  std::optional<lane::LanePointLabel> label;
  Domain domain = Domain::kSim;
  std::string source;

  FrameSample without_label() const;
};

struct Dataset {
  Domain domain = Domain::kSim;
  std::vector<FrameSample> samples;
  std::shared_ptr<const lane::LaneClassMapping> mapping;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  // Copy holding only `indices`, in that order.
  Dataset subset(const std::vector<std::size_t>& indices) const;
};

struct LoadOptions {
  // Sim datasets must be labelled; records without labels are rejected.
  bool require_labels = false;
  // Drop labels that are present (real training splits are used unlabelled).
  bool strip_labels = false;
};

// Reads every label file of the manifest in order and loads the images.
// A missing image raises LoadError naming the record; a malformed record
// raises ParseError with its line number.
Dataset load_dataset(const DatasetManifest& manifest, Domain domain,
                     const LoadOptions& options = {});

std::shared_ptr<const lane::LaneClassMapping> resolve_class_mapping(
    const std::string& name, const std::filesystem::path& root);

}  // namespace s2r::data
