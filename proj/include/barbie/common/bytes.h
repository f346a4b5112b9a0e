// Copyright 2026 The BarbiE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BARBIE_COMMON_BYTES_H_
#define BARBIE_COMMON_BYTES_H_

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "barbie/common/status.h"

namespace barbie {

using Bytes = std::vector<uint8_t>;
using ByteSpan = std::span<const uint8_t>;

template <size_t N>
using ByteArray = std::array<uint8_t, N>;

using Digest = ByteArray<32>;

inline ByteSpan AsBytes(std::string_view s) {
  return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

inline Bytes ToBytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

inline std::string ToString(ByteSpan b) {
  return std::string(b.begin(), b.end());
}

// Concatenates any number of byte ranges.
template <typename... Ranges>
Bytes Concat(const Ranges&... parts) {
  Bytes out;
  out.reserve((std::size(parts) + ... + 0));
  (out.insert(out.end(), std::begin(parts), std::end(parts)), ...);
  return out;
}

inline void AppendU16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

inline void AppendU32(Bytes& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<uint8_t>(v >> shift));
  }
}

// Appends a 4-byte big-endian length followed by the bytes.
inline void AppendLengthPrefixed(Bytes& out, ByteSpan data) {
  AppendU32(out, static_cast<uint32_t>(data.size()));
  out.insert(out.end(), data.begin(), data.end());
}

template <size_t N>
StatusOr<ByteArray<N>> ToArray(ByteSpan data) {
  if (data.size() != N) {
    return MakeError(ErrorCode::kInvalidArgument,
                     "expected " + std::to_string(N) + " bytes, got " +
                         std::to_string(data.size()));
  }
  ByteArray<N> out;
  std::copy(data.begin(), data.end(), out.begin());
  return out;
}

std::string HexEncode(ByteSpan data);
StatusOr<Bytes> HexDecode(std::string_view hex);

std::string Base64Encode(ByteSpan data);
StatusOr<Bytes> Base64Decode(std::string_view text);

// Constant-time equality; false when sizes differ.
bool SecureEquals(ByteSpan a, ByteSpan b);

// True when `needle` occurs as a contiguous run inside `haystack`.
bool ContainsSubsequence(ByteSpan haystack, ByteSpan needle);

}  // namespace barbie

#endif  // BARBIE_COMMON_BYTES_H_
