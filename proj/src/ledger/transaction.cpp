#include <algorithm>

#include "aigc/ledger.hpp"

namespace aigc::ledger {

std::string_view tx_type_name(TxType t) noexcept {
  switch (t) {
    case TxType::Req: return "Req";
    case TxType::Gen: return "Gen";
    case TxType::Upload: return "Upload";
    case TxType::Exchange: return "Exchange";
  }
  return "?";
}

std::optional<TxType> parse_tx_type(std::string_view s) noexcept {
  for (auto t : {TxType::Req, TxType::Gen, TxType::Upload, TxType::Exchange})
    if (tx_type_name(t) == s) return t;
  return std::nullopt;
}

std::string_view status_name(Status s) noexcept {
  switch (s) {
    case Status::Prepared: return "Prepared";
    case Status::Generating: return "Generating";
    case Status::Generated: return "Generated";
    case Status::Traded: return "Traded";
  }
  return "?";
}

std::optional<Status> parse_status(std::string_view s) noexcept {
  for (auto st : {Status::Prepared, Status::Generating, Status::Generated, Status::Traded})
    if (status_name(st) == s) return st;
  return std::nullopt;
}

Bytes Transaction::body() const {
  Bytes out;
  out.reserve(64 + product_id.size() + args.size() + bytes_written() + 8 * writes.size());
  out.push_back(static_cast<std::uint8_t>(type));
  put_lp(out, as_bytes(product_id));
  put_lp(out, as_bytes(args));
  put_be64(out, static_cast<std::uint64_t>(create_time));
  put_be64(out, nonce);
  append(out, creator.view());
  put_be32(out, static_cast<std::uint32_t>(writes.size()));
  for (const auto& w : writes) {
    put_lp(out, as_bytes(w.field));
    put_lp(out, w.value);
  }
  return out;
}

Transaction Transaction::make(TxType type, std::string product_id, std::string args,
                              std::int64_t create_time, std::uint64_t nonce,
                              const crypto::KeyPair& creator, std::vector<Write> writes) {
  Transaction tx;
  tx.type = type;
  tx.product_id = std::move(product_id);
  tx.args = std::move(args);
  tx.create_time = create_time;
  tx.nonce = nonce;
  tx.creator = creator.public_key;
  tx.writes = std::move(writes);
  std::sort(tx.writes.begin(), tx.writes.end(),
            [](const Write& a, const Write& b) { return a.field < b.field; });
  const Bytes body = tx.body();
  tx.creator_sig = crypto::sign(creator.secret_key, body);
  tx.txid = crypto::digest(body);
  return tx;
}

bool Transaction::well_formed() const {
  const Bytes b = body();
  return crypto::digest(b) == txid && crypto::verify(creator, b, creator_sig);
}

const Write* Transaction::find_write(std::string_view name) const noexcept {
  for (const auto& w : writes)
    if (w.field == name) return &w;
  return nullptr;
}

std::size_t Transaction::bytes_written() const noexcept {
  std::size_t n = 0;
  for (const auto& w : writes) n += w.field.size() + w.value.size();
  return n;
}

Digest Block::header_hash() const {
  Bytes h;
  h.reserve(8 + 32 + 32 + 8);
  put_be64(h, number);
  append(h, prev_hash.view());
  append(h, data_hash.view());
  put_be64(h, static_cast<std::uint64_t>(timestamp));
  return crypto::digest(h);
}

Digest Block::compute_data_hash(const std::vector<Transaction>& txs) {
  Bytes all;
  all.reserve(32 * txs.size());
  for (const auto& tx : txs) append(all, tx.txid.view());
  return crypto::digest(all);
}

bool ProductRecord::acl_allows(const PublicKey& reader) const {
  return std::find(acl.begin(), acl.end(), reader) != acl.end();
}

}  // namespace aigc::ledger
