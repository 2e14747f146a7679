#include "aigc/lifecycle.hpp"

namespace aigc::lifecycle {

using ledger::ProductRecord;
using ledger::Transaction;
using ledger::TxType;
using ledger::Write;
namespace field = ledger::field;

Bytes GenerationMetadata::signed_bytes() const {
  Bytes out;
  out.reserve(24);
  put_be64(out, steps);
  put_be64(out, seed);
  put_be64(out, static_cast<std::uint64_t>(created_date));
  return out;
}

Bytes mock_generator(std::string_view args, std::uint64_t seed, std::size_t length) {
  Bytes prefix = to_bytes("mock-aigc");
  put_lp(prefix, as_bytes(args));
  put_be64(prefix, seed);

  Bytes out;
  out.reserve(length + 32);
  for (std::uint64_t counter = 0; out.size() < length; ++counter) {
    Bytes block = prefix;
    put_be64(block, counter);
    append(out, crypto::digest(block).view());
  }
  out.resize(length);
  return out;
}

namespace {

Write write(std::string_view name, Bytes value) { return Write{std::string(name), std::move(value)}; }
Write write(std::string_view name, ByteView value) { return write(name, Bytes(value.begin(), value.end())); }

Bytes encode_acl(const std::vector<PublicKey>& keys) {
  Bytes out;
  for (const auto& k : keys) append(out, k.view());
  return out;
}

Bytes status_value(ledger::Status s) { return to_bytes(ledger::status_name(s)); }

Bytes next_filter(const ProductRecord& current, const std::string& args, std::int64_t create_time) {
  auto filter = ibf::Filter::deserialize(current.bf);
  filter.insert(ibf::encode_member(args, create_time));
  return filter.serialize();
}

}  // namespace

namespace txbuild {

Transaction req(const crypto::KeyPair& producer, const PublicKey& provider,
                const std::string& product_id, const std::string& args,
                const std::string& model_id, std::int64_t create_time, std::uint64_t nonce,
                ByteView filter_seed, const ibf::Params& params) {
  const Digest description_hash = crypto::digest(as_bytes(args));
  const Signature producer_sign = crypto::sign(producer.secret_key, description_hash.view());
  const Signature owner_sign = crypto::sign(producer.secret_key, description_hash.view());

  auto filter = ibf::Filter::setup(params, filter_seed);
  filter.insert(ibf::encode_member(args, create_time));

  std::vector<PublicKey> acl{producer.public_key};
  if (provider != producer.public_key) acl.push_back(provider);

  std::vector<Write> writes;
  writes.push_back(write(field::kModelId, to_bytes(model_id)));
  writes.push_back(write(field::kDescriptionHash, description_hash.view()));
  writes.push_back(write(field::kProducerSign, producer_sign.view()));
  writes.push_back(write(field::kOwnerSign, owner_sign.view()));
  writes.push_back(write(field::kBf, filter.serialize()));
  writes.push_back(write(field::kStatus, status_value(ledger::Status::Prepared)));
  writes.push_back(write(field::kAcl, encode_acl(acl)));
  return Transaction::make(TxType::Req, product_id, args, create_time, nonce, producer,
                           std::move(writes));
}

Transaction gen(const crypto::KeyPair& provider, const ProductRecord& current,
                const Signature& model_sign, std::int64_t create_time, std::uint64_t nonce) {
  const std::string args = "gen:" + current.product_id;
  std::vector<Write> writes;
  writes.push_back(write(field::kModelSign, model_sign.view()));
  writes.push_back(write(field::kStatus, status_value(ledger::Status::Generating)));
  writes.push_back(write(field::kBf, next_filter(current, args, create_time)));
  return Transaction::make(TxType::Gen, current.product_id, args, create_time, nonce, provider,
                           std::move(writes));
}

Transaction upload(const crypto::KeyPair& producer, const ProductRecord& current,
                   const Digest& product_hash, std::int64_t create_time, std::uint64_t nonce) {
  const std::string args = "upload:" + product_hash.hex();
  std::vector<Write> writes;
  writes.push_back(write(field::kProductHash, product_hash.view()));
  writes.push_back(write(field::kStatus, status_value(ledger::Status::Generated)));
  writes.push_back(write(field::kBf, next_filter(current, args, create_time)));
  return Transaction::make(TxType::Upload, current.product_id, args, create_time, nonce,
                           producer, std::move(writes));
}

Transaction exchange(const crypto::KeyPair& consumer, const ProductRecord& current,
                     std::int64_t create_time, std::uint64_t nonce) {
  const std::string args = "exchange:" + consumer.public_key.hex();
  const Signature owner_sign =
      crypto::sign(consumer.secret_key, current.description_hash.view());
  auto acl = current.acl;
  if (!current.acl_allows(consumer.public_key)) acl.push_back(consumer.public_key);

  std::vector<Write> writes;
  writes.push_back(write(field::kOwnerSign, owner_sign.view()));
  writes.push_back(write(field::kStatus, status_value(ledger::Status::Traded)));
  writes.push_back(write(field::kBf, next_filter(current, args, create_time)));
  writes.push_back(write(field::kAcl, encode_acl(acl)));
  return Transaction::make(TxType::Exchange, current.product_id, args, create_time, nonce,
                           consumer, std::move(writes));
}

}  // namespace txbuild

}  // namespace aigc::lifecycle
