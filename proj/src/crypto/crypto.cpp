#include <sodium.h>

#include <cstdlib>

#include "aigc/crypto.hpp"
#include "aigc/error.hpp"
#include "sodium_init.hpp"

namespace aigc::crypto {

void ensure_sodium() {
  static const bool ready = [] {
    if (sodium_init() < 0) std::abort();
    return true;
  }();
  (void)ready;
}

KeyPair keygen(std::optional<ByteView> seed) {
  ensure_sodium();
  KeyPair kp;
  if (seed) {
    if (seed->size() < 16)
      throw Error(ErrorCode::InvalidSeed, "seed must be at least 16 bytes");
    Digest expanded = digest(*seed);
    crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.secret_key.bytes.data(),
                             expanded.bytes.data());
  } else {
    crypto_sign_keypair(kp.public_key.bytes.data(), kp.secret_key.bytes.data());
  }
  return kp;
}

Signature sign(const SecretKey& sk, ByteView msg) {
  ensure_sodium();
  PublicKey pk;
  SecretKey rebuilt;
  crypto_sign_seed_keypair(pk.bytes.data(), rebuilt.bytes.data(), sk.bytes.data());
  if (rebuilt != sk) throw Error(ErrorCode::InvalidKey, "secret key halves disagree");

  Signature sig;
  crypto_sign_detached(sig.bytes.data(), nullptr, msg.data(), msg.size(), sk.bytes.data());
  return sig;
}

bool verify(const PublicKey& pk, ByteView msg, const Signature& sig) noexcept {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.bytes.data(), msg.data(), msg.size(),
                                     pk.bytes.data()) == 0;
}

bool verify(ByteView pk, ByteView msg, ByteView sig) noexcept {
  auto key = PublicKey::from_view(pk);
  auto s = Signature::from_view(sig);
  if (!key || !s) return false;
  return verify(*key, msg, *s);
}

Digest digest(ByteView msg) {
  ensure_sodium();
  Digest d;
  crypto_hash_sha256(d.bytes.data(), msg.data(), msg.size());
  return d;
}

std::array<std::uint8_t, 32> mac(ByteView key, ByteView msg) {
  ensure_sodium();
  std::array<std::uint8_t, 32> out{};
  crypto_auth_hmacsha256_state st;
  crypto_auth_hmacsha256_init(&st, key.data(), key.size());
  crypto_auth_hmacsha256_update(&st, msg.data(), msg.size());
  crypto_auth_hmacsha256_final(&st, out.data());
  return out;
}

int parity_hash(std::uint64_t x) {
  Bytes be;
  be.reserve(8);
  put_be64(be, x);
  return digest(be).bytes[31] & 1;
}

void random_bytes(std::span<std::uint8_t> out) {
  ensure_sodium();
  randombytes_buf(out.data(), out.size());
}

}  // namespace aigc::crypto
