#include <doctest.h>
#include <openssl/evp.h>

#include <random>

#include "aigc/crypto.hpp"
#include "aigc/error.hpp"
#include "oracle.hpp"

using namespace aigc;
using namespace aigc::crypto;

namespace {

Bytes unhex(std::string_view h) { return *from_hex(h); }

// OpenSSL Ed25519 public key from a 32-byte seed.
Bytes openssl_pk(const Bytes& seed) {
  EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr, seed.data(), 32);
  Bytes pk(32);
  std::size_t len = 32;
  EVP_PKEY_get_raw_public_key(key, pk.data(), &len);
  EVP_PKEY_free(key);
  return pk;
}

bool openssl_verify(const Bytes& pk, const Bytes& msg, const Bytes& sig) {
  EVP_PKEY* key = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr, pk.data(), pk.size());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key);
  const int ok = EVP_DigestVerify(ctx, sig.data(), sig.size(), msg.data(), msg.size());
  EVP_MD_CTX_free(ctx);
  EVP_PKEY_free(key);
  return ok == 1;
}

}  // namespace

TEST_CASE("hex codec is strict") {
  CHECK(to_hex(Bytes{0x00, 0xab, 0xff}) == "00abff");
  CHECK(from_hex("00abff") == Bytes{0x00, 0xab, 0xff});
  CHECK(from_hex("") == Bytes{});
  CHECK_FALSE(from_hex("abc"));
  CHECK_FALSE(from_hex("AB"));
  CHECK_FALSE(from_hex("0g"));
  CHECK_FALSE(Digest::from_hex("00"));
}

TEST_CASE("sha256 known answers") {
  CHECK(digest(as_bytes("abc")).hex() ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(digest(as_bytes("")).hex() ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("hmac-sha256 known answers") {
  const Bytes key1(20, 0x0b);
  CHECK(to_hex(mac(key1, as_bytes("Hi There"))) ==
        "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  CHECK(to_hex(mac(as_bytes("Jefe"), as_bytes("what do ya want for nothing?"))) ==
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("ed25519 known answers") {
  struct Vector {
    const char *seed, *pk, *msg, *sig;
  } vectors[] = {
      {"9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60",
       "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a", "",
       "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e3970"
       "1cf9b46bd25bf5f0595bbe24655141438e7a100b"},
      {"4ccd089b28ff96da9db6c346ec114e0f5b8a319f35aba624da8cf6ed4fb8a6fb",
       "3d4017c3e843895a92b70aa74d1b7ebc9c982ccf2ec4968cc0cd55f12af4660c", "72",
       "92a009a9f0d4cab8720e820b5f642540a2b27b5416503f8fb3762223ebdb69da085ac1e43e15996e458f3613"
       "d0f11d8c387b2eaeb4302aeeb00d291612bb0c00"},
  };
  for (const auto& v : vectors) {
    const auto sk = SecretKey::from_hex(std::string(v.seed) + v.pk);
    REQUIRE(sk);
    const Signature sig = sign(*sk, unhex(v.msg));
    CHECK(sig.hex() == v.sig);
    CHECK(verify(*PublicKey::from_hex(v.pk), unhex(v.msg), sig));
  }
}

TEST_CASE("keygen from seed matches an independent ed25519") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    Bytes seed(16 + trial);
    for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    const auto kp = keygen(ByteView(seed));
    CHECK(to_hex(kp.public_key.view()) == to_hex(openssl_pk(oracle::sha256(seed))));
    CHECK(keygen(ByteView(seed)).secret_key == kp.secret_key);

    const Bytes msg = oracle::str("message " + std::to_string(trial));
    const auto sig = sign(kp.secret_key, msg);
    CHECK(openssl_verify(Bytes(kp.public_key.bytes.begin(), kp.public_key.bytes.end()), msg,
                         Bytes(sig.bytes.begin(), sig.bytes.end())));
  }
}

TEST_CASE("keygen rejects short seeds") {
  const Bytes seed(15, 1);
  CHECK_THROWS_AS(keygen(ByteView(seed)), Error);
  try {
    keygen(ByteView(seed));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidSeed);
  }
}

TEST_CASE("random keygen gives distinct keys") {
  CHECK(keygen().public_key != keygen().public_key);
}

TEST_CASE("sign refuses a secret key with the wrong public half") {
  auto a = keygen(), b = keygen();
  SecretKey mixed = a.secret_key;
  std::copy(b.public_key.bytes.begin(), b.public_key.bytes.end(), mixed.bytes.begin() + 32);
  try {
    sign(mixed, as_bytes("x"));
    FAIL("expected InvalidKey");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidKey);
    CHECK(std::string(e.what()).rfind("InvalidKey", 0) == 0);
  }
}

TEST_CASE("verify rejects any single-bit change") {
  const Bytes seed(32, 9);
  const auto kp = keygen(ByteView(seed));
  const Bytes msg = oracle::str("bind me");
  const auto sig = sign(kp.secret_key, msg);
  CHECK(verify(kp.public_key, msg, sig));
  for (std::size_t bit = 0; bit < 64 * 8; bit += 7) {
    auto bad = sig;
    bad.bytes[bit / 8] ^= static_cast<std::uint8_t>(1 << (bit % 8));
    CHECK_FALSE(verify(kp.public_key, msg, bad));
  }
  for (std::size_t bit = 0; bit < msg.size() * 8; ++bit) {
    auto bad = msg;
    bad[bit / 8] ^= static_cast<std::uint8_t>(1 << (bit % 8));
    CHECK_FALSE(verify(kp.public_key, bad, sig));
  }
  CHECK_FALSE(verify(keygen().public_key, msg, sig));
  CHECK_FALSE(verify(kp.public_key.view(), msg, ByteView(sig.bytes.data(), 63)));
}

TEST_CASE("parity hash is the low bit of sha256(be64(x))") {
  std::mt19937_64 rng(3);
  int ones = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::uint64_t x = rng();
    const int p = parity_hash(x);
    CHECK(p == oracle::parity(x));
    ones += p;
  }
  CHECK(ones > 850);
  CHECK(ones < 1150);
}

TEST_CASE("hash family matches the reference model") {
  std::mt19937_64 rng(11);
  for (std::uint32_t m : {2u, 7u, 64u, 10000u, 4294967291u}) {
    Bytes seed(32);
    for (auto& b : seed) b = static_cast<std::uint8_t>(rng());
    const auto family = HashFamily::derive(seed, 5, m);
    const oracle::Family ref(seed, 5, m);
    CHECK(family.k() == 5);
    CHECK(family.range() == m);
    for (int t = 0; t < 50; ++t) {
      Bytes x(rng() % 40);
      for (auto& b : x) b = static_cast<std::uint8_t>(rng());
      for (std::uint32_t i = 1; i <= 5; ++i) {
        const auto h = family.index(i, x);
        CHECK(h < m);
        CHECK(h == ref.index(i, x));
      }
      CHECK(family.tag(x) == ref.tag(x));
      const std::uint64_t p = rng();
      CHECK(family.tag_of_index(p) == ref.tag(oracle::be(p, 8)));
    }
  }
}

TEST_CASE("hash family parameters are validated") {
  const Bytes seed(32, 1);
  CHECK_THROWS_AS(HashFamily::derive(seed, 0, 100), Error);
  CHECK_THROWS_AS(HashFamily::derive(seed, 3, 1), Error);
  const auto a = derive_hash_family(seed, 3, 100);
  const auto b = derive_hash_family(seed, 3, 100);
  CHECK(a.index(1, seed) == b.index(1, seed));
}

TEST_CASE("hash family indices are roughly uniform") {
  const Bytes seed(32, 5);
  const std::uint32_t m = 16;
  const auto family = HashFamily::derive(seed, 1, m);
  std::vector<int> counts(m);
  const int n = 16000;
  for (int i = 0; i < n; ++i) counts[family.index(1, oracle::be(i, 8))]++;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - n / double(m)) * (c - n / double(m)) / (n / double(m));
  // 15 degrees of freedom, upper 0.1% point is 37.7
  CHECK(chi2 < 37.7);
}
