// Copyright 2026 The dotref Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DOTREF_RANDOM_H_
#define DOTREF_RANDOM_H_

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dotref {

// Seedable random source whose output is identical on every platform.
//
// The engine is std::mt19937_64 (bit-exact by the standard). The std::
// distributions are implementation-defined, so all conversions from raw
// 64-bit words are done here:
//   Uniform01()  = ((w >> 11) + 0.5) * 2^-53, strictly inside (0, 1)
//   Below(n)     = w % n, rejecting the biased tail of the 64-bit range
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t Next() { return engine_(); }

  double Uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t w;
    do {
      w = engine_();
    } while (w >= limit);
    return w % n;
  }

  template <typename T>
  void Shuffle(std::vector<T>& values) {
    // Fisher-Yates, back to front.
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[Below(i)]);
    }
  }

  // Derives an independent stream, e.g. one per seed or per worker.
  Rng Fork() { return Rng(engine_()); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace dotref

#endif  // DOTREF_RANDOM_H_
