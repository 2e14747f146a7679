#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aigc {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline ByteView as_bytes(std::string_view s) noexcept {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

inline Bytes to_bytes(std::string_view s) {
  auto v = as_bytes(s);
  return {v.begin(), v.end()};
}

inline std::string to_string(ByteView b) {
  return {reinterpret_cast<const char*>(b.data()), b.size()};
}

/// Lowercase hex.
std::string to_hex(ByteView bytes);

/// Strict decode: even length, lowercase [0-9a-f] only. Anything else is
/// nullopt, so a persisted value has exactly one textual form.
std::optional<Bytes> from_hex(std::string_view hex);

void append(Bytes& out, ByteView more);
void put_be32(Bytes& out, std::uint32_t v);
void put_be64(Bytes& out, std::uint64_t v);

/// be32 length prefix followed by the bytes.
void put_lp(Bytes& out, ByteView v);

std::uint32_t read_be32(const std::uint8_t* p) noexcept;
std::uint64_t read_be64(const std::uint8_t* p) noexcept;

}  // namespace aigc
