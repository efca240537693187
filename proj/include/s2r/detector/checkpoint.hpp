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

#include <json.hpp>
#include <torch/torch.h>

namespace s2r::detector {

// Container layout (docs/checkpoint_format.md): 8-byte magic "S2RCKPT1",
// little-endian u32 header length, UTF-8 JSON header, then raw tensor
// blobs in header order.
struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::map<std::string, torch::Tensor> tensors;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Parameters and buffers under `prefix` + their dotted module names.
void collect_state(const torch::nn::Module& module, const std::string& prefix,
                   std::map<std::string, torch::Tensor>& out);
// Copies tensors back; every parameter/buffer must be present with the same
// shape (LoadError otherwise).
void restore_state(torch::nn::Module& module, const std::string& prefix,
                   const std::map<std::string, torch::Tensor>& state);

}  // namespace s2r::detector
