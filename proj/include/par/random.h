// Copyright 2026 The Privacy at Risk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Seeded random streams and the seed-derivation contract shared by every
// stochastic routine in the toolkit.
//
// Parallel work is always split into fixed-size chunks. Chunk `i` draws from
// `Rng(DeriveSeed(master_seed, i))`, so results depend only on the master
// seed and the chunk layout, never on how many threads execute the chunks.

#ifndef PAR_RANDOM_H_
#define PAR_RANDOM_H_

#include <cstdint>
#include <functional>
#include <random>

namespace par {

// Mixes a master seed and a stream index into an independent 64-bit seed
// (SplitMix64 finalizer applied twice).
std::uint64_t DeriveSeed(std::uint64_t master_seed, std::uint64_t stream_index);

// A reproducible pseudo-random stream. Uniform draws are built from the top
// 53 bits of a 64-bit Mersenne Twister output, which makes the stream
// bit-identical across standard libraries (std::uniform_real_distribution is
// not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1).
  double Uniform();

  // Uniform integer in [0, bound). `bound` must be positive.
  std::uint64_t UniformIndex(std::uint64_t bound);

  // Standard normal via Box-Muller on two Uniform() draws.
  double Normal();

  // Exponential with unit scale, by inversion.
  double Exponential();

 private:
  std::mt19937_64 engine_;
};

// Runs `fn(chunk_index)` for chunk_index in [0, num_chunks) on up to
// `workers` threads. Chunks are independent; callers merge per-chunk results
// in index order to keep output independent of `workers`.
void RunChunked(std::uint64_t num_chunks, int workers,
                const std::function<void(std::uint64_t)>& fn);

}  // namespace par

#endif  // PAR_RANDOM_H_
