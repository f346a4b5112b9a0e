// Copyright 2026 The BarbiE Authors
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

#ifndef BARBIE_COMMON_RANDOM_H_
#define BARBIE_COMMON_RANDOM_H_

#include <cstdint>
#include <mutex>
#include <span>

#include "barbie/common/bytes.h"

namespace barbie {

// Source of key material, ivs, nonces and identifiers. Implementations are
// safe to share between threads.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void Fill(std::span<uint8_t> out) = 0;

  Bytes Generate(size_t n) {
    Bytes out(n);
    Fill(out);
    return out;
  }

  template <size_t N>
  ByteArray<N> Array() {
    ByteArray<N> out;
    Fill(out);
    return out;
  }
};

// Operating-system CSPRNG.
class SystemRandom final : public RandomSource {
 public:
  void Fill(std::span<uint8_t> out) override;
};

// Deterministic stream SHA-256(seed || counter), for reproducible transcripts
// and seeded test runs. Never use for production keys.
class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(uint64_t seed);
  void Fill(std::span<uint8_t> out) override;

 private:
  std::mutex mu_;
  uint64_t seed_;
  uint64_t counter_ = 0;
};

// Process-wide SystemRandom instance.
RandomSource& DefaultRandom();

}  // namespace barbie

#endif  // BARBIE_COMMON_RANDOM_H_
