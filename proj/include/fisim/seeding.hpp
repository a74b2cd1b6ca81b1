/*
 * Copyright 2026 The fisim Authors.
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

#ifndef FISIM_SEEDING_HPP
#define FISIM_SEEDING_HPP

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace fisim {

// Deterministic, platform-stable seed derivation. All randomness in the
// library flows through explicit seeds; sub-seeds are derived by hashing so
// that independent work items (runs, trees, columns) get decorrelated
// streams regardless of execution order.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hashString(std::string_view s) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t doubleBits(double v) {
  return std::bit_cast<std::uint64_t>(v);
}

constexpr std::uint64_t deriveSeed(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t p : parts) h = splitmix64(h ^ p);
  return h;
}

constexpr std::uint64_t deriveSeed(std::uint64_t base, std::uint64_t part) {
  return deriveSeed(base, {part});
}

}  // namespace fisim

#endif  // FISIM_SEEDING_HPP
