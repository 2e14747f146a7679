#pragma once

#include <cstdint>
#include <string_view>

#include "aigc/bytes.hpp"
#include "aigc/crypto.hpp"

namespace aigc::ibf {

inline constexpr std::uint32_t kDefaultTwins = 10000;
inline constexpr std::uint32_t kDefaultHashes = 7;

struct Params {
  std::uint32_t m = kDefaultTwins;
  std::uint32_t k = kDefaultHashes;
};

/// be64(len(args)) || args || be64(create_time). Length-prefixed, hence
/// injective over (args, create_time).
Bytes encode_member(std::string_view args, std::int64_t create_time);

struct CheckResult {
  bool member = false;
  std::uint32_t probes = 0;  // twins examined, never more than k
};

// Indistinguishable Bloom filter: m twins of two cells. Which cell of twin p
// carries membership is parity_hash(h_{k+1}(be64(p)) ^ gamma); the other
// cell holds noise from setup and is zeroed whenever the twin is written.
class Filter {
 public:
  /// m >= 8, 1 <= k <= 16, rng_seed >= 16 bytes; throws InvalidParams.
  /// Chosen cells start at 0, unchosen cells get seeded random bits.
  static Filter setup(std::uint32_t m, std::uint32_t k, ByteView rng_seed);
  static Filter setup(const Params& params, ByteView rng_seed) {
    return setup(params.m, params.k, rng_seed);
  }

  void insert(ByteView v);
  bool check(ByteView v) const { return probe(v).member; }
  /// Same as check, also reporting how many twins were read (early exit on
  /// the first zero).
  CheckResult probe(ByteView v) const;

  std::uint32_t m() const noexcept { return m_; }
  std::uint32_t k() const noexcept { return k_; }
  std::uint64_t gamma() const noexcept { return gamma_; }
  const Bytes& family_seed() const noexcept { return family_seed_; }
  const crypto::HashFamily& family() const noexcept { return family_; }

  /// Index of the chosen cell of twin p.
  int chosen_index(std::uint32_t p) const;
  int cell(std::uint32_t p, int c) const noexcept;

  /// Twin indices h_1(v)..h_k(v), in order.
  std::vector<std::uint32_t> positions(ByteView v) const;

  /// "IBF1" || be32(m) || be32(k) || be64(gamma) || be32(len(seed)) || seed
  /// || 2m cell bits, MSB-first, zero-padded.
  Bytes serialize() const;
  /// Throws CorruptFilter.
  static Filter deserialize(ByteView bytes);

  /// The packed cell bits alone.
  const Bytes& cell_bits() const noexcept { return cells_; }

  friend bool operator==(const Filter& a, const Filter& b) {
    return a.m_ == b.m_ && a.k_ == b.k_ && a.gamma_ == b.gamma_ &&
           a.family_seed_ == b.family_seed_ && a.cells_ == b.cells_;
  }

 private:
  Filter(std::uint32_t m, std::uint32_t k, std::uint64_t gamma, Bytes family_seed);

  void set_cell(std::uint32_t p, int c, int bit) noexcept;

  std::uint32_t m_;
  std::uint32_t k_;
  std::uint64_t gamma_;
  Bytes family_seed_;
  crypto::HashFamily family_;
  Bytes cells_;
};

}  // namespace aigc::ibf
