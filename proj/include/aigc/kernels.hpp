#pragma once

// Batch kernels for the IBF chosen-cell computation.
//
// For every twin index p the chosen cell is
//     parity( low64(HMAC-SHA256(key, be64(p))) XOR gamma )
// where parity(y) is the low bit of SHA-256(be64(y)). Each step is a single
// SHA-256 compression over a fixed-shape block, so a run of consecutive p is
// computed lane-parallel. The scalar kernel is the reference; the AVX2
// kernel processes eight indices per pass and must agree bit for bit.

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "aigc/bytes.hpp"

namespace aigc::kernels {

using Sha256State = std::array<std::uint32_t, 8>;

inline constexpr Sha256State kSha256Iv = {
    0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
    0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u};

struct HmacMidstates {
  Sha256State inner;  // after compressing key ^ ipad
  Sha256State outer;  // after compressing key ^ opad
};

void sha256_compress(Sha256State& state, const std::uint8_t* block) noexcept;

/// Midstates for an HMAC key of at most 64 bytes.
HmacMidstates hmac_midstates(ByteView key);

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_available(Isa isa) noexcept;

/// Widest available kernel, unless AIGC_KERNEL=scalar is set.
Isa active_isa() noexcept;

/// out[i] = chosen cell of twin (first + i).
void chosen_cells_scalar(const HmacMidstates& key, std::uint64_t gamma,
                         std::uint64_t first, std::span<std::uint8_t> out) noexcept;
void chosen_cells_avx2(const HmacMidstates& key, std::uint64_t gamma,
                       std::uint64_t first, std::span<std::uint8_t> out) noexcept;

/// Dispatches to `isa`; an unavailable ISA falls back to scalar.
void chosen_cells(Isa isa, const HmacMidstates& key, std::uint64_t gamma,
                  std::uint64_t first, std::span<std::uint8_t> out) noexcept;

inline void chosen_cells(const HmacMidstates& key, std::uint64_t gamma,
                         std::uint64_t first, std::span<std::uint8_t> out) noexcept {
  chosen_cells(active_isa(), key, gamma, first, out);
}

}  // namespace aigc::kernels
