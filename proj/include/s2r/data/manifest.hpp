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
#include <string>
#include <vector>

namespace s2r::data {

enum class Split { kTrain, kVal, kTest };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

// How raw lanes in the label file relate to lane slots.
enum class SlotLayout {
  kAsIs,         // lane k of every record is slot k (generated datasets)
  kEgoRelative,  // reorder around the image centre (TuSimple native labels)
};

// One split of a dataset on disk. `label_files` are relative to `root` and
// read in order; image paths inside records are relative to `root` too.
struct DatasetManifest {
  std::filesystem::path root;
  Split split = Split::kTrain;
  std::size_t frame_count = 0;  // 0 = not declared
  std::vector<std::filesystem::path> label_files;
  SlotLayout slot_layout = SlotLayout::kAsIs;
  // "simulanes", "tusimple", or a path (relative to root) of a mapping file.
  std::string class_mapping = "simulanes";
};

// Manifest file (JSON):
//   {"layout": "flat" | "tusimple",
//    "class_mapping": "simulanes",
//    "splits": {"train": {"labels": "labels.txt", "count": 100}, ...}}
// "labels" may also be a list of files. `root` defaults to the manifest's
// directory.
DatasetManifest load_manifest(const std::filesystem::path& manifest_file,
                              Split split);
std::vector<Split> manifest_splits(const std::filesystem::path& manifest_file);

// Writes (or merges into) a manifest file in the format above.
void write_manifest(const std::filesystem::path& manifest_file,
                    const DatasetManifest& manifest);

}  // namespace s2r::data
