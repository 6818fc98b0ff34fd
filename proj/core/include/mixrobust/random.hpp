/*
 * Copyright 2026 The mixrobust Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace mixrobust {

using Rng = std::mt19937_64;

// Tags mixed into derived seeds so that each consumer of randomness within
// one run instance gets an independent stream.
enum class SeedPurpose : std::uint64_t {
  kRunInstance = 0x52554e,     // "RUN"
  kReverseChoice = 0x524556,   // "REV"
  kTrainingDraw = 0x54524e,    // "TRN"
  kTestDraw = 0x545354,        // "TST"
  kClassifier = 0x434c46,      // "CLF"
  kSyntheticPool = 0x504f4f,   // "POO"
};

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Counter-based derivation: folds every counter into the master seed in order.
std::uint64_t derive_seed(std::uint64_t master,
                          std::initializer_list<std::uint64_t> counters) noexcept;

inline std::uint64_t derive_seed(std::uint64_t master, SeedPurpose purpose) noexcept {
  return derive_seed(master, {static_cast<std::uint64_t>(purpose)});
}

inline Rng make_rng(std::uint64_t seed) { return Rng(seed); }

}  // namespace mixrobust
