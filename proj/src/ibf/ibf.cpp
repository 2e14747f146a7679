#include "aigc/ibf.hpp"

#include <cstring>

#include "aigc/error.hpp"

namespace aigc::ibf {

namespace {

constexpr std::uint8_t kMagic[4] = {'I', 'B', 'F', '1'};
constexpr std::size_t kHeaderSize = 4 + 4 + 4 + 8 + 4;
constexpr std::size_t kMinSeed = 16;
constexpr std::size_t kMaxSeed = 1024;

Bytes labelled(std::string_view label) { return to_bytes(label); }

void check_params(std::uint32_t m, std::uint32_t k) {
  if (m < 8) throw Error(ErrorCode::InvalidParams, "m must be >= 8");
  if (k < 1 || k > 16) throw Error(ErrorCode::InvalidParams, "k must be in [1, 16]");
}

std::size_t packed_size(std::uint32_t m) { return (2 * static_cast<std::size_t>(m) + 7) / 8; }

}  // namespace

Bytes encode_member(std::string_view args, std::int64_t create_time) {
  Bytes out;
  out.reserve(16 + args.size());
  put_be64(out, args.size());
  append(out, as_bytes(args));
  put_be64(out, static_cast<std::uint64_t>(create_time));
  return out;
}

Filter::Filter(std::uint32_t m, std::uint32_t k, std::uint64_t gamma, Bytes family_seed)
    : m_(m),
      k_(k),
      gamma_(gamma),
      family_seed_(std::move(family_seed)),
      family_(crypto::HashFamily::derive(family_seed_, k, m)),
      cells_(packed_size(m), 0) {}

Filter Filter::setup(std::uint32_t m, std::uint32_t k, ByteView rng_seed) {
  check_params(m, k);
  if (rng_seed.size() < kMinSeed)
    throw Error(ErrorCode::InvalidParams, "rng seed must be at least 16 bytes");

  auto family = crypto::mac(rng_seed, labelled("ibf-family"));
  auto gamma_bytes = crypto::mac(rng_seed, labelled("ibf-gamma"));
  Filter f(m, k, read_be64(gamma_bytes.data()), Bytes(family.begin(), family.end()));

  std::vector<std::uint8_t> chosen(m);
  kernels::chosen_cells(f.family_.tag_midstates(), f.gamma_, 0, chosen);

  std::array<std::uint8_t, 32> noise{};
  for (std::uint32_t p = 0; p < m; ++p) {
    if (p % 256 == 0) {
      Bytes label = labelled("ibf-cells");
      put_be64(label, p / 256);
      noise = crypto::mac(rng_seed, label);
    }
    const std::uint32_t bit = p % 256;
    const int random_bit = (noise[bit / 8] >> (7 - bit % 8)) & 1;
    f.set_cell(p, 1 - chosen[p], random_bit);
  }
  return f;
}

int Filter::chosen_index(std::uint32_t p) const {
  return crypto::parity_hash(family_.tag_of_index(p) ^ gamma_);
}

int Filter::cell(std::uint32_t p, int c) const noexcept {
  const std::size_t bit = 2 * static_cast<std::size_t>(p) + c;
  return (cells_[bit / 8] >> (7 - bit % 8)) & 1;
}

void Filter::set_cell(std::uint32_t p, int c, int value) noexcept {
  const std::size_t bit = 2 * static_cast<std::size_t>(p) + c;
  const auto mask = static_cast<std::uint8_t>(1u << (7 - bit % 8));
  if (value)
    cells_[bit / 8] |= mask;
  else
    cells_[bit / 8] &= static_cast<std::uint8_t>(~mask);
}

std::vector<std::uint32_t> Filter::positions(ByteView v) const {
  std::vector<std::uint32_t> out(k_);
  for (std::uint32_t i = 1; i <= k_; ++i) out[i - 1] = family_.index(i, v);
  return out;
}

void Filter::insert(ByteView v) {
  for (std::uint32_t i = 1; i <= k_; ++i) {
    const std::uint32_t p = family_.index(i, v);
    const int chosen = chosen_index(p);
    set_cell(p, chosen, 1);
    set_cell(p, 1 - chosen, 0);
  }
}

CheckResult Filter::probe(ByteView v) const {
  CheckResult r;
  for (std::uint32_t i = 1; i <= k_; ++i) {
    const std::uint32_t p = family_.index(i, v);
    ++r.probes;
    if (cell(p, chosen_index(p)) == 0) return r;
  }
  r.member = true;
  return r;
}

Bytes Filter::serialize() const {
  Bytes out(kMagic, kMagic + 4);
  out.reserve(kHeaderSize + family_seed_.size() + cells_.size());
  put_be32(out, m_);
  put_be32(out, k_);
  put_be64(out, gamma_);
  put_lp(out, family_seed_);
  append(out, cells_);
  return out;
}

Filter Filter::deserialize(ByteView bytes) {
  auto corrupt = [](const char* why) { return Error(ErrorCode::CorruptFilter, why); };
  if (bytes.size() < kHeaderSize) throw corrupt("truncated header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw corrupt("bad magic");

  const std::uint32_t m = read_be32(bytes.data() + 4);
  const std::uint32_t k = read_be32(bytes.data() + 8);
  const std::uint64_t gamma = read_be64(bytes.data() + 12);
  const std::uint32_t seed_len = read_be32(bytes.data() + 20);
  if (m < 8 || k < 1 || k > 16) throw corrupt("parameters out of range");
  if (seed_len < kMinSeed || seed_len > kMaxSeed) throw corrupt("bad seed length");

  const std::size_t expected = kHeaderSize + seed_len + packed_size(m);
  if (bytes.size() != expected) throw corrupt("length mismatch");

  const std::uint8_t* seed = bytes.data() + kHeaderSize;
  Filter f(m, k, gamma, Bytes(seed, seed + seed_len));
  std::memcpy(f.cells_.data(), seed + seed_len, f.cells_.size());

  const std::size_t used_bits = 2 * static_cast<std::size_t>(m);
  if (used_bits % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xffu >> (used_bits % 8));
    if (f.cells_.back() & pad_mask) throw corrupt("nonzero padding");
  }
  return f;
}

}  // namespace aigc::ibf
