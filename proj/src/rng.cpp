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

#include "infoweight/rng.hpp"

#include <cmath>

namespace infoweight {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RngStream::result_type RngStream::operator()() {
  auto lo = static_cast<std::uint64_t>(counter_);
  auto hi = static_cast<std::uint64_t>(counter_ >> 64);
  ++counter_;
  return mix64(mix64(seed_ ^ mix64(hi)) + lo * 0xd1342543de82ef95ULL);
}

RngStream RngStream::split(std::uint64_t index) const {
  return RngStream(mix64(mix64(seed_) ^ mix64(index + 0x632be59bd9b4e019ULL)));
}

double RngStream::uniform() {
  return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double RngStream::normal() {
  // Polar Box-Muller without caching, so every draw depends only on the
  // counter position.
  for (;;) {
    double u = 2.0 * uniform() - 1.0;
    double v = 2.0 * uniform() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double RngStream::laplace(double scale) {
  double u = uniform() - 0.5;
  double a = std::abs(u);
  if (a >= 0.5) a = 0.5 - 0x1.0p-54;
  return -scale * std::copysign(std::log1p(-2.0 * a), u);
}

std::uint64_t RngStream::below(std::uint64_t n) {
  std::uniform_int_distribution<std::uint64_t> dist(0, n - 1);
  return dist(*this);
}

Vector RngStream::normal_vector(int d) {
  Vector z(d);
  int i = 0;
  while (i < d) {
    double u = 2.0 * uniform() - 1.0;
    double v = 2.0 * uniform() - 1.0;
    double s = u * u + v * v;
    if (s <= 0.0 || s >= 1.0) continue;
    double f = std::sqrt(-2.0 * std::log(s) / s);
    z(i++) = u * f;
    if (i < d) z(i++) = v * f;
  }
  return z;
}

Vector RngStream::unit_sphere(int d) {
  for (;;) {
    Vector z = normal_vector(d);
    double n = z.norm();
    if (n > 0) return z / n;
  }
}

}  // namespace infoweight
