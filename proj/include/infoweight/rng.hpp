//
// Copyright 2026 The infoweight Authors
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
//

// Counter-based random stream.

#ifndef INFOWEIGHT_RNG_HPP_
#define INFOWEIGHT_RNG_HPP_

#include <cstdint>
#include <limits>
#include <random>

#include "infoweight/linalg.hpp"

namespace infoweight {

// Output k of the stream is a keyed hash of (seed, k), so a stream is fully
// described by (seed, counter). Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  unsigned __int128 counter() const { return counter_; }

  // Independent child stream for task `index`.
  RngStream split(std::uint64_t index) const;

  double uniform();  // [0, 1)
  double normal();
  double laplace(double scale);
  std::uint64_t below(std::uint64_t n);
  Vector normal_vector(int d);
  Vector unit_sphere(int d);

 private:
  std::uint64_t seed_;
  unsigned __int128 counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace infoweight

#endif  // INFOWEIGHT_RNG_HPP_
