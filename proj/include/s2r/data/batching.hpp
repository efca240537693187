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

#include <cstdint>
#include <vector>

#include "s2r/data/dataset.hpp"

namespace s2r::data {

// Sample indices for one training step: a labelled sim batch and an
// unlabelled real batch of the same size.
struct UnpairedStep {
  std::vector<std::size_t> sim;
  std::vector<std::size_t> real;
};

// Unpaired two-domain index stream. An epoch is one pass over a fresh
// permutation of the sim set (the last batch may be short). Real indices
// come from an independent stream of reshuffled permutations that keeps
// cycling across epochs. epoch(e) is a pure function of (seed, e).
class UnpairedBatchStream {
 public:
  UnpairedBatchStream(std::size_t sim_size, std::size_t real_size,
                      std::size_t batch_size, std::uint64_t seed);

  std::size_t steps_per_epoch() const noexcept { return steps_; }
  std::vector<UnpairedStep> epoch(std::size_t epoch_index) const;

 private:
  std::size_t sim_size_;
  std::size_t real_size_;
  std::size_t batch_size_;
  std::uint64_t seed_;
  std::size_t steps_;
};

// Materialized step: sim samples keep labels, real samples are stripped.
struct UnpairedBatch {
  std::vector<FrameSample> sim;
  std::vector<FrameSample> real;
};

UnpairedBatch gather(const UnpairedStep& step, const Dataset& sim,
                     const Dataset& real);

// Uniform draw of `subset_size` distinct indices out of `full_size`,
// reproducible from (seed, epoch_index).
std::vector<std::size_t> resample_subset(std::size_t full_size,
                                         std::size_t subset_size,
                                         std::size_t epoch_index,
                                         std::uint64_t seed);

// Deterministic permutation of [0, n) for the given stream id.
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t counter);

}  // namespace s2r::data
