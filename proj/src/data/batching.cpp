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

#include "s2r/data/batching.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "s2r/errors.hpp"

namespace s2r::data {

namespace {
constexpr std::uint64_t kSimStream = 0x51;
constexpr std::uint64_t kRealStream = 0x7e;
constexpr std::uint64_t kSubsetStream = 0x5b;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t counter) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(counter),
                    static_cast<std::uint32_t>(counter >> 32)};
  return std::mt19937_64(seq);
}
}  // namespace

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed,
                                            std::uint64_t stream,
                                            std::uint64_t counter) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  auto rng = make_rng(seed, stream, counter);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

UnpairedBatchStream::UnpairedBatchStream(std::size_t sim_size,
                                         std::size_t real_size,
                                         std::size_t batch_size,
                                         std::uint64_t seed)
    : sim_size_(sim_size), real_size_(real_size), batch_size_(batch_size), seed_(seed) {
  if (sim_size_ == 0 || real_size_ == 0) {
    throw ConfigError("unpaired batching needs two nonempty datasets");
  }
  if (batch_size_ == 0) throw ConfigError("batch size must be positive");
  if (batch_size_ > sim_size_ || batch_size_ > real_size_) {
    throw ConfigError("batch size " + std::to_string(batch_size_) +
                      " exceeds a dataset size (sim " + std::to_string(sim_size_) +
                      ", real " + std::to_string(real_size_) + ")");
  }
  steps_ = (sim_size_ + batch_size_ - 1) / batch_size_;
}

std::vector<UnpairedStep> UnpairedBatchStream::epoch(std::size_t epoch_index) const {
  const auto sim_perm = seeded_permutation(sim_size_, seed_, kSimStream, epoch_index);
  std::vector<UnpairedStep> steps(steps_);
  std::size_t draw = epoch_index * sim_size_;
  std::size_t cycle = static_cast<std::size_t>(-1);
  std::vector<std::size_t> real_perm;
  for (std::size_t s = 0; s < steps_; ++s) {
    const std::size_t begin = s * batch_size_;
    const std::size_t end = std::min(begin + batch_size_, sim_size_);
    for (std::size_t k = begin; k < end; ++k) {
      steps[s].sim.push_back(sim_perm[k]);
      if (draw / real_size_ != cycle) {
        cycle = draw / real_size_;
        real_perm = seeded_permutation(real_size_, seed_, kRealStream, cycle);
      }
      steps[s].real.push_back(real_perm[draw % real_size_]);
      ++draw;
    }
  }
  return steps;
}

UnpairedBatch gather(const UnpairedStep& step, const Dataset& sim,
                     const Dataset& real) {
  UnpairedBatch batch;
  batch.sim.reserve(step.sim.size());
  batch.real.reserve(step.real.size());
  for (std::size_t k : step.sim) batch.sim.push_back(sim.samples.at(k));
  for (std::size_t k : step.real) batch.real.push_back(real.samples.at(k).without_label());
  return batch;
}

std::vector<std::size_t> resample_subset(std::size_t full_size,
                                         std::size_t subset_size,
                                         std::size_t epoch_index,
                                         std::uint64_t seed) {
  if (subset_size > full_size) {
    throw ConfigError("subset of " + std::to_string(subset_size) +
                      " requested from " + std::to_string(full_size) + " samples");
  }
  auto perm = seeded_permutation(full_size, seed, kSubsetStream, epoch_index);
  perm.resize(subset_size);
  return perm;
}

}  // namespace s2r::data
