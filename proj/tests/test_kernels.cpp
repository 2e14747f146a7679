#include <doctest.h>

#include <random>

#include "aigc/crypto.hpp"
#include "aigc/kernels.hpp"
#include "oracle.hpp"

using namespace aigc;
using namespace aigc::kernels;

namespace {

struct Key {
  oracle::Bytes raw;
  HmacMidstates mid;
};

Key random_key(std::mt19937_64& rng) {
  Key k;
  k.raw.resize(32);
  for (auto& b : k.raw) b = static_cast<std::uint8_t>(rng());
  k.mid = hmac_midstates(ByteView(k.raw));
  return k;
}

int reference_cell(const Key& key, std::uint64_t gamma, std::uint64_t p) {
  const auto h = oracle::hmac(key.raw, oracle::be(p, 8));
  return oracle::parity(oracle::load_be64(h.data() + 24) ^ gamma);
}

}  // namespace

TEST_CASE("compress of one padded block matches sha256") {
  std::uint8_t block[64] = {'a', 'b', 'c', 0x80};
  block[63] = 24;
  Sha256State s = kSha256Iv;
  sha256_compress(s, block);
  Bytes out;
  for (auto w : s) put_be32(out, w);
  CHECK(to_hex(out) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("scalar kernel agrees with per-twin reference") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const Key key = random_key(rng);
    const std::uint64_t gamma = rng();
    const std::uint64_t first = trial == 0 ? 0 : rng() >> 20;
    std::vector<std::uint8_t> out(300);
    chosen_cells_scalar(key.mid, gamma, first, out);
    for (std::size_t i = 0; i < out.size(); ++i)
      REQUIRE(out[i] == reference_cell(key, gamma, first + i));
  }
}

TEST_CASE("kernels agree with the hash family path") {
  const Bytes seed(32, 0x42);
  const auto family = crypto::HashFamily::derive(seed, 7, 10000);
  const std::uint64_t gamma = 0x0123456789abcdefULL;
  std::vector<std::uint8_t> out(1000);
  chosen_cells(family.tag_midstates(), gamma, 0, out);
  for (std::uint64_t p = 0; p < out.size(); ++p)
    CHECK(out[p] == crypto::parity_hash(family.tag_of_index(p) ^ gamma));
}

TEST_CASE("avx2 kernel equals scalar kernel") {
  if (!isa_available(Isa::Avx2)) {
    MESSAGE("avx2 not available, dispatch falls back to scalar");
  }
  std::mt19937_64 rng(5);
  const std::uint64_t starts[] = {0, 1, 7, 8, 4294967290ULL, 4294967295ULL, 0xfffffffffffffff0ULL};
  for (std::size_t len : {0, 1, 7, 8, 9, 15, 16, 17, 63, 64, 65, 1000}) {
    for (std::uint64_t first : starts) {
      const Key key = random_key(rng);
      const std::uint64_t gamma = rng();
      std::vector<std::uint8_t> a(len), b(len), c(len);
      chosen_cells_scalar(key.mid, gamma, first, a);
      chosen_cells_avx2(key.mid, gamma, first, b);
      chosen_cells(Isa::Avx2, key.mid, gamma, first, c);
      REQUIRE(a == b);
      REQUIRE(a == c);
    }
  }
}

TEST_CASE("avx2 kernel equals scalar on random ranges") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Key key = random_key(rng);
    const std::uint64_t gamma = rng();
    const std::uint64_t first = rng();
    const std::size_t len = rng() % 200;
    std::vector<std::uint8_t> a(len), b(len);
    chosen_cells_scalar(key.mid, gamma, first, a);
    chosen_cells_avx2(key.mid, gamma, first, b);
    REQUIRE(a == b);
  }
}

TEST_CASE("dispatch names and availability") {
  CHECK(isa_name(Isa::Scalar) == "scalar");
  CHECK(isa_name(Isa::Avx2) == "avx2");
  CHECK(isa_available(Isa::Scalar));
  CHECK(isa_available(active_isa()));
}
