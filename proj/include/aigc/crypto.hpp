#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aigc/bytes.hpp"
#include "aigc/kernels.hpp"

namespace aigc::crypto {

// Fixed-length byte string with value semantics; the tag keeps digests,
// keys and signatures from being mixed up.
template <std::size_t N, typename Tag>
struct FixedBytes {
  static constexpr std::size_t kSize = N;
  std::array<std::uint8_t, N> bytes{};

  ByteView view() const noexcept { return {bytes.data(), bytes.size()}; }
  std::string hex() const { return to_hex(view()); }

  static std::optional<FixedBytes> from_view(ByteView v) {
    if (v.size() != N) return std::nullopt;
    FixedBytes out;
    std::copy(v.begin(), v.end(), out.bytes.begin());
    return out;
  }
  static std::optional<FixedBytes> from_hex(std::string_view h) {
    auto raw = aigc::from_hex(h);
    if (!raw) return std::nullopt;
    return from_view(*raw);
  }

  auto operator<=>(const FixedBytes&) const = default;
};

struct DigestTag {};
struct PublicKeyTag {};
struct SecretKeyTag {};
struct SignatureTag {};

using Digest = FixedBytes<32, DigestTag>;
using PublicKey = FixedBytes<32, PublicKeyTag>;
// Ed25519 expanded secret key: 32-byte seed followed by the public key.
using SecretKey = FixedBytes<64, SecretKeyTag>;
using Signature = FixedBytes<64, SignatureTag>;

struct KeyPair {
  PublicKey public_key;
  SecretKey secret_key;
};

/// With a seed (>= 16 bytes) the pair is a pure function of it; without
/// one, system randomness is used. Throws InvalidSeed.
KeyPair keygen(std::optional<ByteView> seed = std::nullopt);

/// Throws InvalidKey when the secret key's embedded public half does not
/// match its seed.
Signature sign(const SecretKey& sk, ByteView msg);

bool verify(const PublicKey& pk, ByteView msg, const Signature& sig) noexcept;
/// Raw-bytes form: wrong lengths simply fail.
bool verify(ByteView pk, ByteView msg, ByteView sig) noexcept;

/// SHA-256.
Digest digest(ByteView msg);

/// HMAC-SHA256.
std::array<std::uint8_t, 32> mac(ByteView key, ByteView msg);

/// Low bit of digest(be64(x)), reading the digest as a big-endian integer.
int parity_hash(std::uint64_t x);

/// Fills `out` from the OS CSPRNG.
void random_bytes(std::span<std::uint8_t> out);

// The keyed family h_1..h_{k+1}. Copies share the immutable key schedule.
class HashFamily {
 public:
  /// key_i = mac(master_seed, "ibf-key" || be32(i)), i in [1, k+1].
  /// Throws InvalidParams unless k >= 1 and m >= 2.
  static HashFamily derive(ByteView master_seed, std::uint32_t k, std::uint32_t m);

  std::uint32_t k() const noexcept;
  std::uint32_t range() const noexcept;

  /// h_i(x) for i in [1, k]: mac(key_i, x) as big-endian integer mod m.
  std::uint32_t index(std::uint32_t i, ByteView x) const;

  /// h_{k+1}(x): low 64 bits of mac(key_{k+1}, x).
  std::uint64_t tag(ByteView x) const;

  /// h_{k+1} applied to be64(p).
  std::uint64_t tag_of_index(std::uint64_t p) const;

  /// SHA-256 midstates of key_{k+1} ^ ipad / ^ opad, for the batch kernels.
  const kernels::HmacMidstates& tag_midstates() const noexcept;

 private:
  struct Impl;
  explicit HashFamily(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  std::shared_ptr<const Impl> impl_;
};

inline HashFamily derive_hash_family(ByteView master_seed, std::uint32_t k, std::uint32_t m) {
  return HashFamily::derive(master_seed, k, m);
}

}  // namespace aigc::crypto
