#include <cstring>

#include "aigc/kernels.hpp"
#include "sha256_constants.hpp"

namespace aigc::kernels {

namespace {

constexpr std::uint32_t rotr(std::uint32_t x, int n) noexcept {
  return (x >> n) | (x << (32 - n));
}

void compress_words(Sha256State& state, const std::uint32_t* block_words) noexcept {
  std::uint32_t w[64];
  for (int t = 0; t < 16; ++t) w[t] = block_words[t];
  for (int t = 16; t < 64; ++t) {
    std::uint32_t s0 = rotr(w[t - 15], 7) ^ rotr(w[t - 15], 18) ^ (w[t - 15] >> 3);
    std::uint32_t s1 = rotr(w[t - 2], 17) ^ rotr(w[t - 2], 19) ^ (w[t - 2] >> 10);
    w[t] = w[t - 16] + s0 + w[t - 7] + s1;
  }

  std::uint32_t a = state[0], b = state[1], c = state[2], d = state[3];
  std::uint32_t e = state[4], f = state[5], g = state[6], h = state[7];
  for (int t = 0; t < 64; ++t) {
    std::uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
    std::uint32_t ch = (e & f) ^ (~e & g);
    std::uint32_t t1 = h + s1 + ch + detail::kRound[t] + w[t];
    std::uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
    std::uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
    std::uint32_t t2 = s0 + maj;
    h = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  state[0] += a; state[1] += b; state[2] += c; state[3] += d;
  state[4] += e; state[5] += f; state[6] += g; state[7] += h;
}

// Chosen cell for one twin index, following the three fixed-shape blocks.
std::uint8_t chosen_cell(const HmacMidstates& key, std::uint64_t gamma,
                         std::uint64_t p) noexcept {
  std::uint32_t block[16] = {};

  // inner: ipad block already absorbed; message be64(p), total 72 bytes
  Sha256State inner = key.inner;
  block[0] = static_cast<std::uint32_t>(p >> 32);
  block[1] = static_cast<std::uint32_t>(p);
  block[2] = 0x80000000u;
  block[15] = (64 + 8) * 8;
  compress_words(inner, block);

  // outer: opad block absorbed; message is the inner digest, total 96 bytes
  Sha256State outer = key.outer;
  for (int i = 0; i < 8; ++i) block[i] = inner[i];
  block[8] = 0x80000000u;
  for (int i = 9; i < 15; ++i) block[i] = 0;
  block[15] = (64 + 32) * 8;
  compress_words(outer, block);

  // low 64 bits of the MAC are its last two words
  std::uint64_t y = ((std::uint64_t{outer[6]} << 32) | outer[7]) ^ gamma;

  Sha256State parity = kSha256Iv;
  std::memset(block, 0, sizeof(block));
  block[0] = static_cast<std::uint32_t>(y >> 32);
  block[1] = static_cast<std::uint32_t>(y);
  block[2] = 0x80000000u;
  block[15] = 8 * 8;
  compress_words(parity, block);
  return static_cast<std::uint8_t>(parity[7] & 1u);
}

}  // namespace

void sha256_compress(Sha256State& state, const std::uint8_t* block) noexcept {
  std::uint32_t words[16];
  for (int t = 0; t < 16; ++t) words[t] = read_be32(block + 4 * t);
  compress_words(state, words);
}

HmacMidstates hmac_midstates(ByteView key) {
  std::uint8_t ipad[64];
  std::uint8_t opad[64];
  std::memset(ipad, 0x36, sizeof(ipad));
  std::memset(opad, 0x5c, sizeof(opad));
  for (std::size_t i = 0; i < key.size() && i < 64; ++i) {
    ipad[i] ^= key[i];
    opad[i] ^= key[i];
  }
  HmacMidstates out{kSha256Iv, kSha256Iv};
  sha256_compress(out.inner, ipad);
  sha256_compress(out.outer, opad);
  return out;
}

void chosen_cells_scalar(const HmacMidstates& key, std::uint64_t gamma,
                         std::uint64_t first, std::span<std::uint8_t> out) noexcept {
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = chosen_cell(key, gamma, first + i);
}

}  // namespace aigc::kernels
