#include <fstream>
#include <sstream>

#include <json.hpp>

#include "aigc/error.hpp"
#include "aigc/ledger.hpp"

namespace aigc::ledger {

using ojson = nlohmann::ordered_json;

namespace {

[[noreturn]] void corrupt(const std::string& why) { throw Error(ErrorCode::CorruptLedger, why); }

template <typename T>
T fixed_from(const ojson& j) {
  if (!j.is_string()) corrupt("expected hex string");
  auto v = T::from_hex(j.get<std::string>());
  if (!v) corrupt("bad hex field");
  return *v;
}

std::uint64_t unsigned_from(const ojson& j) {
  if (!j.is_number_unsigned()) corrupt("expected unsigned integer");
  return j.get<std::uint64_t>();
}

std::int64_t signed_from(const ojson& j) {
  if (!j.is_number_integer()) corrupt("expected integer");
  return j.get<std::int64_t>();
}

std::string string_from(const ojson& j) {
  if (!j.is_string()) corrupt("expected string");
  return j.get<std::string>();
}

ojson encode_tx(const Transaction& tx) {
  ojson writes = ojson::array();
  for (const auto& w : tx.writes) {
    ojson jw;
    jw["field"] = w.field;
    jw["value"] = to_hex(w.value);
    writes.push_back(std::move(jw));
  }
  ojson j;
  j["txid"] = tx.txid.hex();
  j["tx_type"] = tx_type_name(tx.type);
  j["product_id"] = tx.product_id;
  j["args"] = tx.args;
  j["create_time"] = tx.create_time;
  j["nonce"] = tx.nonce;
  j["creator"] = tx.creator.hex();
  j["creator_sig"] = tx.creator_sig.hex();
  j["writes"] = std::move(writes);
  return j;
}

Transaction decode_tx(const ojson& j) {
  if (!j.is_object()) corrupt("transaction is not an object");
  Transaction tx;
  tx.txid = fixed_from<Digest>(j.at("txid"));
  auto type = parse_tx_type(string_from(j.at("tx_type")));
  if (!type) corrupt("unknown tx_type");
  tx.type = *type;
  tx.product_id = string_from(j.at("product_id"));
  tx.args = string_from(j.at("args"));
  tx.create_time = signed_from(j.at("create_time"));
  tx.nonce = unsigned_from(j.at("nonce"));
  tx.creator = fixed_from<PublicKey>(j.at("creator"));
  tx.creator_sig = fixed_from<Signature>(j.at("creator_sig"));
  const ojson& writes = j.at("writes");
  if (!writes.is_array()) corrupt("writes is not an array");
  for (const auto& jw : writes) {
    if (!jw.is_object()) corrupt("write is not an object");
    auto value = from_hex(string_from(jw.at("value")));
    if (!value) corrupt("bad write value");
    tx.writes.push_back(Write{string_from(jw.at("field")), std::move(*value)});
  }
  return tx;
}

}  // namespace

std::string encode_block_line(const Block& block) {
  ojson txs = ojson::array();
  for (const auto& tx : block.transactions) txs.push_back(encode_tx(tx));
  ojson j;
  j["number"] = block.number;
  j["prev_hash"] = block.prev_hash.hex();
  j["data_hash"] = block.data_hash.hex();
  j["timestamp"] = block.timestamp;
  j["transactions"] = std::move(txs);
  return j.dump();
}

Block decode_block_line(std::string_view line) {
  Block block;
  try {
    const ojson j = ojson::parse(line);
    if (!j.is_object()) corrupt("block is not an object");
    block.number = unsigned_from(j.at("number"));
    block.prev_hash = fixed_from<Digest>(j.at("prev_hash"));
    block.data_hash = fixed_from<Digest>(j.at("data_hash"));
    block.timestamp = signed_from(j.at("timestamp"));
    const ojson& txs = j.at("transactions");
    if (!txs.is_array()) corrupt("transactions is not an array");
    for (const auto& jt : txs) block.transactions.push_back(decode_tx(jt));
  } catch (const nlohmann::json::exception& e) {
    corrupt(e.what());
  }
  // one textual form per block: anything the encoder would not have
  // produced is rejected
  if (encode_block_line(block) != line) corrupt("non-canonical block encoding");
  return block;
}

std::string encode_transaction_json(const Transaction& tx) { return encode_tx(tx).dump(); }

void Ledger::save(const std::filesystem::path& path) const {
  std::string text;
  {
    std::shared_lock lock(mutex_);
    for (const auto& b : blocks_) {
      text += encode_block_line(b);
      text += '\n';
    }
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw Error(ErrorCode::IoError, "short write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, ec.message());
}

Ledger Ledger::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();

  std::vector<Block> blocks;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    if (end == std::string::npos) corrupt("truncated final line");
    blocks.push_back(decode_block_line(std::string_view(text).substr(start, end - start)));
    start = end + 1;
  }
  if (!validate(blocks)) corrupt("chain does not verify");

  Ledger ledger;
  ledger.state_ = replay(blocks);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    for (std::size_t i = 0; i < blocks[b].transactions.size(); ++i) {
      const auto& tx = blocks[b].transactions[i];
      ledger.index_[tx.txid] = Location{b, i};
      ledger.nonces_.emplace(tx.creator, tx.nonce);
    }
  }
  ledger.blocks_ = std::move(blocks);
  return ledger;
}

}  // namespace aigc::ledger
