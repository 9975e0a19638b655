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

#ifndef DOTREF_SERVER_CLOCK_H_
#define DOTREF_SERVER_CLOCK_H_

#include <chrono>

#include "dotref/engine.h"

namespace dotref::server {

// Server time source in milliseconds. Implementations must be monotonic and
// thread-safe.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual Millis Now() const = 0;
};

// Wall-clock milliseconds at construction, advanced by a steady clock so
// time never runs backwards. `scale` > 1 runs game time faster than real
// time (for tests and simulations).
class SteadyClock : public Clock {
 public:
  explicit SteadyClock(double scale = 1.0)
      : scale_(scale),
        base_(std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::system_clock::now().time_since_epoch())
                  .count()),
        start_(std::chrono::steady_clock::now()) {}

  Millis Now() const override {
    const auto elapsed = std::chrono::duration<double, std::milli>(
        std::chrono::steady_clock::now() - start_);
    return base_ + static_cast<Millis>(elapsed.count() * scale_);
  }

  double scale() const { return scale_; }

 private:
  double scale_;
  Millis base_;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace dotref::server

#endif  // DOTREF_SERVER_CLOCK_H_
