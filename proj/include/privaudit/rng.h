/*
 * Copyright 2026 The Privaudit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef PRIVAUDIT_RNG_H_
#define PRIVAUDIT_RNG_H_

#include <cstdint>
#include <random>

namespace privaudit {

// SplitMix64 finalizer. Used only to derive independent stream seeds.
constexpr uint64_t SplitMix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of stream `stream` under master seed `seed`. Streams are independent
// of evaluation order, which is what makes parallel rounds reproducible.
constexpr uint64_t DeriveSeed(uint64_t seed, uint64_t stream) {
  return SplitMix64(SplitMix64(seed) ^
                    SplitMix64(stream + 0x632be59bd9b4e019ULL));
}

// Every generator in the project is an mt19937_64 seeded through DeriveSeed.
inline std::mt19937_64 MakeRng(uint64_t seed, uint64_t stream) {
  return std::mt19937_64(DeriveSeed(seed, stream));
}

}  // namespace privaudit

#endif  // PRIVAUDIT_RNG_H_
