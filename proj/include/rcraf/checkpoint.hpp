// Copyright 2026 The rcraf Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RCRAF_CHECKPOINT_HPP_
#define RCRAF_CHECKPOINT_HPP_

// Binary network checkpoints, all integers and reals little-endian:
//
//   "RCAF"           4 bytes magic
//   version          u8 (currently 1)
//   width count      u32, then that many u32 widths d_0 ... d_L
//   activation kind  u8 (0 rcraf, 1 relu, 2 gelu, 3 swish)
//   alpha, gamma     f64, f64
//   per layer        f64 weights (d_out x d_in, row-major), f64 bias (d_out)
//
// The initialisation seed is not stored; decoded networks carry seed 0.

#include <cstdint>
#include <filesystem>
#include <string>

#include "rcraf/net.hpp"

namespace rcraf {

inline constexpr std::uint8_t kCheckpointVersion = 1;

std::string encode_checkpoint(const DenseNetwork& net);
// Throws std::runtime_error on bad magic, unknown version, or truncation.
DenseNetwork decode_checkpoint(const std::string& bytes);

void save_checkpoint(const DenseNetwork& net, const std::filesystem::path& path);
DenseNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace rcraf

#endif  // RCRAF_CHECKPOINT_HPP_
