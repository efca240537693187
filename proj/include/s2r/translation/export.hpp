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

#include "s2r/data/dataset.hpp"
#include "s2r/data/manifest.hpp"
#include "s2r/lane/row_anchor.hpp"
#include "s2r/translation/model.hpp"

namespace s2r::translation {

struct ExportOptions {
  std::filesystem::path output_dir;
  data::Split split = data::Split::kTrain;
  lane::ImageSize model_size{64, 160};  // translation resolution
  std::uint64_t style_seed = 0;         // MUNIT: style of frame i uses seed + i
  int batch_size = 8;
};

// Translates every frame of `ds` into `target`, writes the images back at
// their original size with the labels passed through, and adds the split to
// `output_dir/manifest.json`. Returns the manifest path.
std::filesystem::path export_translated(Translator& model, const data::Dataset& ds,
                                        Domain target, const ExportOptions& options);

}  // namespace s2r::translation
