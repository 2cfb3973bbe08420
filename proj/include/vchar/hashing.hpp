// Copyright 2026 The vchar Authors.
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

#pragma once

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>

#include "vchar/error.hpp"
#include "vchar/scenario.hpp"

namespace vchar {

/// Incremental SHA-256, hex-encoded on finish().
class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error("sha256: digest initialisation failed");
    }
  }

  Sha256& update(const void* data, std::size_t n) {
    EVP_DigestUpdate(ctx_.get(), data, n);
    return *this;
  }
  Sha256& update(std::string_view s) { return update(s.data(), s.size()); }

  template <typename T>
    requires std::is_arithmetic_v<T>
  Sha256& update_value(T v) {
    static_assert(std::endian::native == std::endian::little, "digests assume little-endian hosts");
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &v, sizeof(T));
    return update(bytes, sizeof(T));
  }

  std::string finish() {
    unsigned char out[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), out, &len);
    static constexpr char digits[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      hex.push_back(digits[out[i] >> 4]);
      hex.push_back(digits[out[i] & 0xf]);
    }
    return hex;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

inline std::string sha256_hex(std::string_view data) { return Sha256().update(data).finish(); }

inline std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path.string() + "'");
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.finish();
}

/// Content hash over the binary representation of every trace field.
inline std::string trace_digest(const SimulationTrace& trace) {
  Sha256 h;
  h.update_value(static_cast<std::uint64_t>(trace.samples.size()));
  for (const auto& s : trace.samples) {
    h.update_value(s.t).update_value(s.ego_position).update_value(s.ego_speed);
    h.update_value(s.ego_accel).update_value(s.obstacle_distance).update_value(s.relative_speed);
    h.update_value(static_cast<std::uint8_t>(s.brake_command));
    h.update_value(static_cast<std::uint8_t>(s.throttle_command));
  }
  h.update_value(static_cast<std::uint8_t>(trace.collided));
  h.update_value(trace.collision_speed).update_value(trace.min_distance);
  h.update_value(static_cast<std::uint8_t>(trace.completed));
  return h.finish();
}

}  // namespace vchar
