#include <sodium.h>

#include "aigc/crypto.hpp"
#include "aigc/error.hpp"
#include "sodium_init.hpp"

namespace aigc::crypto {

struct HashFamily::Impl {
  std::uint32_t k = 0;
  std::uint32_t m = 0;
  // keyed states for h_1..h_{k+1}, already past the key block
  std::vector<crypto_auth_hmacsha256_state> states;
  kernels::HmacMidstates tag_midstates{};

  std::array<std::uint8_t, 32> run(std::uint32_t i, ByteView x) const {
    crypto_auth_hmacsha256_state st = states[i - 1];
    std::array<std::uint8_t, 32> out{};
    crypto_auth_hmacsha256_update(&st, x.data(), x.size());
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
  }
};

HashFamily HashFamily::derive(ByteView master_seed, std::uint32_t k, std::uint32_t m) {
  if (k < 1 || m < 2) throw Error(ErrorCode::InvalidParams, "hash family needs k >= 1, m >= 2");
  ensure_sodium();

  auto impl = std::make_shared<Impl>();
  impl->k = k;
  impl->m = m;
  impl->states.resize(k + 1);
  for (std::uint32_t i = 1; i <= k + 1; ++i) {
    Bytes label = to_bytes("ibf-key");
    put_be32(label, i);
    auto key = mac(master_seed, label);
    crypto_auth_hmacsha256_init(&impl->states[i - 1], key.data(), key.size());
    if (i == k + 1) impl->tag_midstates = kernels::hmac_midstates({key.data(), key.size()});
  }
  return HashFamily(std::move(impl));
}

std::uint32_t HashFamily::k() const noexcept { return impl_->k; }
std::uint32_t HashFamily::range() const noexcept { return impl_->m; }

std::uint32_t HashFamily::index(std::uint32_t i, ByteView x) const {
  auto out = impl_->run(i, x);
  std::uint64_t r = 0;
  for (std::uint8_t b : out) r = ((r << 8) | b) % impl_->m;
  return static_cast<std::uint32_t>(r);
}

std::uint64_t HashFamily::tag(ByteView x) const {
  auto out = impl_->run(impl_->k + 1, x);
  return read_be64(out.data() + 24);
}

std::uint64_t HashFamily::tag_of_index(std::uint64_t p) const {
  std::uint8_t be[8];
  for (int i = 0; i < 8; ++i) be[i] = static_cast<std::uint8_t>(p >> (56 - 8 * i));
  return tag({be, 8});
}

const kernels::HmacMidstates& HashFamily::tag_midstates() const noexcept {
  return impl_->tag_midstates;
}

}  // namespace aigc::crypto
