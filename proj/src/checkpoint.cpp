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

#include "rcraf/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rcraf/report.hpp"

namespace rcraf {
namespace {

constexpr char kMagic[4] = {'R', 'C', 'A', 'F'};

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
    // Byte-swap via the unsigned representation.
    using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
    U u;
    std::memcpy(&u, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<char>(u >> (8 * i)));
  } else {
    char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.append(buf, sizeof(T));
  }
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    if (pos_ + sizeof(T) > bytes_.size()) throw std::runtime_error("checkpoint: truncated file");
    T value;
    if constexpr (std::endian::native == std::endian::big && sizeof(T) > 1) {
      using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
      U u = 0;
      for (std::size_t i = 0; i < sizeof(T); ++i) {
        u |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
      }
      std::memcpy(&value, &u, sizeof(T));
    } else {
      std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    }
    pos_ += sizeof(T);
    return value;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  const std::string& bytes_;
  std::size_t pos_ = 0;
};

std::uint8_t kind_code(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::kRcrAf:
      return 0;
    case ActivationKind::kRelu:
      return 1;
    case ActivationKind::kGelu:
      return 2;
    case ActivationKind::kSwish:
      return 3;
  }
  return 255;
}

ActivationKind kind_from_code(std::uint8_t code) {
  switch (code) {
    case 0:
      return ActivationKind::kRcrAf;
    case 1:
      return ActivationKind::kRelu;
    case 2:
      return ActivationKind::kGelu;
    case 3:
      return ActivationKind::kSwish;
    default:
      throw std::runtime_error("checkpoint: unknown activation code " + std::to_string(code));
  }
}

}  // namespace

std::string encode_checkpoint(const DenseNetwork& net) {
  std::string out(kMagic, sizeof(kMagic));
  put<std::uint8_t>(out, kCheckpointVersion);
  const auto& spec = net.spec();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(spec.widths.size()));
  for (std::size_t w : spec.widths) put<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  put<std::uint8_t>(out, kind_code(spec.activation.kind));
  put<double>(out, spec.activation.alpha);
  put<double>(out, spec.activation.gamma);
  for (const auto& layer : net.layers()) {
    for (double v : layer.weights.values()) put<double>(out, v);
    for (double v : layer.bias) put<double>(out, v);
  }
  return out;
}

DenseNetwork decode_checkpoint(const std::string& bytes) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw std::runtime_error("checkpoint: bad magic");
  }
  Reader in(bytes);
  for (int i = 0; i < 4; ++i) in.get<char>();
  const auto version = in.get<std::uint8_t>();
  if (version != kCheckpointVersion) {
    throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
  }
  NetworkSpec spec;
  const auto count = in.get<std::uint32_t>();
  if (count < 2 || count > (1u << 16)) throw std::runtime_error("checkpoint: bad width count");
  for (std::uint32_t i = 0; i < count; ++i) spec.widths.push_back(in.get<std::uint32_t>());
  spec.activation.kind = kind_from_code(in.get<std::uint8_t>());
  spec.activation.alpha = in.get<double>();
  spec.activation.gamma = in.get<double>();

  DenseNetwork net(spec);
  for (auto& layer : net.layers()) {
    for (double& v : layer.weights.values()) v = in.get<double>();
    for (double& v : layer.bias) v = in.get<double>();
  }
  if (!in.done()) throw std::runtime_error("checkpoint: trailing bytes");
  return net;
}

void save_checkpoint(const DenseNetwork& net, const std::filesystem::path& path) {
  write_text_file(path, encode_checkpoint(net));
}

DenseNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_checkpoint(buf.str());
}

}  // namespace rcraf
