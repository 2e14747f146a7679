// The product contract: which write-sets each transaction type may carry and
// how they move a ProductRecord forward.

#include <algorithm>
#include <array>

#include "aigc/error.hpp"
#include "aigc/ibf.hpp"
#include "aigc/ledger.hpp"

namespace aigc::ledger {

namespace {

[[noreturn]] void reject(const std::string& why) { throw Error(ErrorCode::InvalidTransition, why); }

std::vector<std::string_view> required_fields(TxType type) {
  switch (type) {
    case TxType::Req:
      return {field::kAcl, field::kBf, field::kDescriptionHash, field::kModelId,
              field::kOwnerSign, field::kProducerSign, field::kStatus};
    case TxType::Gen:
      return {field::kBf, field::kModelSign, field::kStatus};
    case TxType::Upload:
      return {field::kBf, field::kProductHash, field::kStatus};
    case TxType::Exchange:
      return {field::kAcl, field::kBf, field::kOwnerSign, field::kStatus};
  }
  return {};
}

Status target_status(TxType type) {
  switch (type) {
    case TxType::Req: return Status::Prepared;
    case TxType::Gen: return Status::Generating;
    case TxType::Upload: return Status::Generated;
    case TxType::Exchange: return Status::Traded;
  }
  return Status::Prepared;
}

bool allowed_from(TxType type, Status current) {
  switch (type) {
    case TxType::Req: return false;
    case TxType::Gen: return current == Status::Prepared;
    case TxType::Upload: return current == Status::Generating;
    case TxType::Exchange: return current == Status::Generated || current == Status::Traded;
  }
  return false;
}

template <typename T>
T fixed(const Write& w) {
  auto v = T::from_view(w.value);
  if (!v) reject("field " + w.field + " has wrong length");
  return *v;
}

std::vector<PublicKey> decode_acl(const Write& w) {
  if (w.value.size() % PublicKey::kSize != 0) reject("acl length");
  std::vector<PublicKey> keys;
  for (std::size_t off = 0; off < w.value.size(); off += PublicKey::kSize)
    keys.push_back(*PublicKey::from_view(ByteView(w.value).subspan(off, PublicKey::kSize)));
  return keys;
}

ibf::Filter decode_filter(ByteView bytes) {
  try {
    return ibf::Filter::deserialize(bytes);
  } catch (const Error&) {
    reject("bf does not deserialize");
  }
}

}  // namespace

ProductRecord apply_transaction(const ProductRecord* current, const Transaction& tx) {
  if (tx.type == TxType::Req && current != nullptr)
    throw Error(ErrorCode::ProductExists, tx.product_id);
  if (tx.type != TxType::Req && current == nullptr)
    throw Error(ErrorCode::UnknownProduct, tx.product_id);

  const auto required = required_fields(tx.type);
  if (tx.writes.size() != required.size()) reject("unexpected write-set size");
  for (std::size_t i = 0; i < required.size(); ++i)
    if (tx.writes[i].field != required[i])
      reject("write-set for " + std::string(tx_type_name(tx.type)) + " must be exactly its fields");

  auto status = parse_status(to_string(tx.find_write(field::kStatus)->value));
  if (!status || *status != target_status(tx.type)) reject("status value");
  if (current != nullptr) {
    if (!allowed_from(tx.type, current->status))
      reject(std::string(status_name(current->status)) + " -> " + std::string(status_name(*status)));
    if (tx.create_time <= current->updated_at) reject("create_time must advance per product");
  }

  const Bytes member = ibf::encode_member(tx.args, tx.create_time);
  const Write& bf_write = *tx.find_write(field::kBf);

  ProductRecord next = current != nullptr ? *current : ProductRecord{};
  next.status = *status;
  next.updated_at = tx.create_time;

  switch (tx.type) {
    case TxType::Req: {
      next.product_id = tx.product_id;
      next.model_id = to_string(tx.find_write(field::kModelId)->value);
      next.description_hash = fixed<Digest>(*tx.find_write(field::kDescriptionHash));
      next.producer_sign = fixed<Signature>(*tx.find_write(field::kProducerSign));
      next.owner_sign = fixed<Signature>(*tx.find_write(field::kOwnerSign));
      const auto& dh = next.description_hash.view();
      if (!crypto::verify(tx.creator, dh, next.producer_sign)) reject("producer_sign");
      if (!crypto::verify(tx.creator, dh, next.owner_sign)) reject("owner_sign");
      next.acl = decode_acl(*tx.find_write(field::kAcl));
      if (!next.acl_allows(tx.creator)) reject("acl must include the creator");
      if (!decode_filter(bf_write.value).check(member)) reject("bf must contain the request");
      break;
    }
    case TxType::Gen:
      next.model_sign = fixed<Signature>(*tx.find_write(field::kModelSign));
      break;
    case TxType::Upload:
      next.product_hash = fixed<Digest>(*tx.find_write(field::kProductHash));
      break;
    case TxType::Exchange: {
      next.owner_sign = fixed<Signature>(*tx.find_write(field::kOwnerSign));
      if (!crypto::verify(tx.creator, next.description_hash.view(), next.owner_sign))
        reject("owner_sign must be the buyer's signature over description_hash");
      auto expected_acl = current->acl;
      if (!current->acl_allows(tx.creator)) expected_acl.push_back(tx.creator);
      next.acl = decode_acl(*tx.find_write(field::kAcl));
      if (next.acl != expected_acl) reject("acl update");
      break;
    }
  }

  if (tx.type != TxType::Req) {
    ibf::Filter expected = decode_filter(current->bf);
    expected.insert(member);
    if (expected.serialize() != bf_write.value) reject("bf must be the previous filter plus this transaction");
  }
  next.bf = bf_write.value;
  return next;
}

WorldState replay(const std::vector<Block>& blocks) {
  WorldState state;
  for (const auto& block : blocks) {
    for (const auto& tx : block.transactions) {
      auto it = state.find(tx.product_id);
      ProductRecord next = apply_transaction(it == state.end() ? nullptr : &it->second, tx);
      state.insert_or_assign(tx.product_id, std::move(next));
    }
  }
  return state;
}

}  // namespace aigc::ledger
