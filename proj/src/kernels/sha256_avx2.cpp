// Eight SHA-256 compressions in parallel, one per 32-bit lane of a ymm
// register. Only the fixed-shape blocks of the chosen-cell computation are
// needed, so message words are built directly in registers.

#include <immintrin.h>

#include "aigc/kernels.hpp"
#include "sha256_constants.hpp"

namespace aigc::kernels {

namespace {

using V = __m256i;

inline V splat(std::uint32_t x) { return _mm256_set1_epi32(static_cast<int>(x)); }

template <int N>
inline V rotr(V x) {
  return _mm256_or_si256(_mm256_srli_epi32(x, N), _mm256_slli_epi32(x, 32 - N));
}

inline V add(V a, V b) { return _mm256_add_epi32(a, b); }
inline V xor3(V a, V b, V c) { return _mm256_xor_si256(_mm256_xor_si256(a, b), c); }

struct State8 {
  V h[8];
};

State8 broadcast(const Sha256State& s) {
  State8 out;
  for (int i = 0; i < 8; ++i) out.h[i] = splat(s[i]);
  return out;
}

void compress8(State8& st, const V* block) {
  V w[64];
  for (int t = 0; t < 16; ++t) w[t] = block[t];
  for (int t = 16; t < 64; ++t) {
    V s0 = xor3(rotr<7>(w[t - 15]), rotr<18>(w[t - 15]), _mm256_srli_epi32(w[t - 15], 3));
    V s1 = xor3(rotr<17>(w[t - 2]), rotr<19>(w[t - 2]), _mm256_srli_epi32(w[t - 2], 10));
    w[t] = add(add(w[t - 16], s0), add(w[t - 7], s1));
  }

  V a = st.h[0], b = st.h[1], c = st.h[2], d = st.h[3];
  V e = st.h[4], f = st.h[5], g = st.h[6], h = st.h[7];
  for (int t = 0; t < 64; ++t) {
    V s1 = xor3(rotr<6>(e), rotr<11>(e), rotr<25>(e));
    V ch = _mm256_xor_si256(_mm256_and_si256(e, f), _mm256_andnot_si256(e, g));
    V t1 = add(add(add(h, s1), add(ch, splat(detail::kRound[t]))), w[t]);
    V s0 = xor3(rotr<2>(a), rotr<13>(a), rotr<22>(a));
    V maj = xor3(_mm256_and_si256(a, b), _mm256_and_si256(a, c), _mm256_and_si256(b, c));
    V t2 = add(s0, maj);
    h = g;
    g = f;
    f = e;
    e = add(d, t1);
    d = c;
    c = b;
    b = a;
    a = add(t1, t2);
  }
  st.h[0] = add(st.h[0], a); st.h[1] = add(st.h[1], b);
  st.h[2] = add(st.h[2], c); st.h[3] = add(st.h[3], d);
  st.h[4] = add(st.h[4], e); st.h[5] = add(st.h[5], f);
  st.h[6] = add(st.h[6], g); st.h[7] = add(st.h[7], h);
}

}  // namespace

void chosen_cells_avx2(const HmacMidstates& key, std::uint64_t gamma,
                       std::uint64_t first, std::span<std::uint8_t> out) noexcept {
  const V zero = _mm256_setzero_si256();
  const V pad = splat(0x80000000u);
  const V lane = _mm256_setr_epi32(0, 1, 2, 3, 4, 5, 6, 7);
  const V gamma_hi = splat(static_cast<std::uint32_t>(gamma >> 32));
  const V gamma_lo = splat(static_cast<std::uint32_t>(gamma));

  std::size_t i = 0;
  for (; i + 8 <= out.size(); i += 8) {
    const std::uint64_t base = first + i;
    // lanes share the high word only when the eight indices do not straddle
    // a 2^32 boundary; otherwise leave them to the scalar path
    if ((base >> 32) != ((base + 7) >> 32)) {
      chosen_cells_scalar(key, gamma, base, out.subspan(i, 8));
      continue;
    }
    V block[16];

    // inner HMAC block: be64(p), 72 bytes total
    block[0] = splat(static_cast<std::uint32_t>(base >> 32));
    block[1] = add(splat(static_cast<std::uint32_t>(base)), lane);
    block[2] = pad;
    for (int t = 3; t < 15; ++t) block[t] = zero;
    block[15] = splat((64 + 8) * 8);
    State8 inner = broadcast(key.inner);
    compress8(inner, block);

    // outer HMAC block: inner digest, 96 bytes total
    for (int t = 0; t < 8; ++t) block[t] = inner.h[t];
    block[8] = pad;
    for (int t = 9; t < 15; ++t) block[t] = zero;
    block[15] = splat((64 + 32) * 8);
    State8 outer = broadcast(key.outer);
    compress8(outer, block);

    // parity hash of be64(tag ^ gamma)
    block[0] = _mm256_xor_si256(outer.h[6], gamma_hi);
    block[1] = _mm256_xor_si256(outer.h[7], gamma_lo);
    block[2] = pad;
    for (int t = 3; t < 15; ++t) block[t] = zero;
    block[15] = splat(8 * 8);
    State8 parity = broadcast(kSha256Iv);
    compress8(parity, block);

    alignas(32) std::uint32_t last[8];
    _mm256_store_si256(reinterpret_cast<V*>(last), parity.h[7]);
    for (int l = 0; l < 8; ++l) out[i + l] = static_cast<std::uint8_t>(last[l] & 1u);
  }
  if (i < out.size()) chosen_cells_scalar(key, gamma, first + i, out.subspan(i));
}

}  // namespace aigc::kernels
