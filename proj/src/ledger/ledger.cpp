#include <algorithm>
#include <mutex>

#include "aigc/error.hpp"
#include "aigc/ledger.hpp"

namespace aigc::ledger {

Ledger::Ledger(Ledger&& other) noexcept {
  std::unique_lock lock(other.mutex_);
  blocks_ = std::move(other.blocks_);
  index_ = std::move(other.index_);
  state_ = std::move(other.state_);
  nonces_ = std::move(other.nonces_);
  pending_ = std::move(other.pending_);
  projected_ = std::move(other.projected_);
}

Ledger& Ledger::operator=(Ledger&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  blocks_ = std::move(other.blocks_);
  index_ = std::move(other.index_);
  state_ = std::move(other.state_);
  nonces_ = std::move(other.nonces_);
  pending_ = std::move(other.pending_);
  projected_ = std::move(other.projected_);
  return *this;
}

const ProductRecord* Ledger::latest_record(const std::string& product_id) const {
  if (auto it = projected_.find(product_id); it != projected_.end()) return &it->second;
  if (auto it = state_.find(product_id); it != state_.end()) return &it->second;
  return nullptr;
}

Receipt Ledger::propose(Transaction tx) {
  if (!tx.well_formed()) throw Error(ErrorCode::BadSignature, tx.txid.hex());

  std::unique_lock lock(mutex_);
  if (nonces_.count({tx.creator, tx.nonce}) != 0)
    throw Error(ErrorCode::DuplicateNonce, std::to_string(tx.nonce));

  ProductRecord after = apply_transaction(latest_record(tx.product_id), tx);

  nonces_.emplace(tx.creator, tx.nonce);
  projected_.insert_or_assign(tx.product_id, after);
  Receipt receipt{tx.txid};
  pending_.push_back(Pending{std::move(tx), std::move(after)});
  return receipt;
}

std::optional<Block> Ledger::commit_block() {
  std::unique_lock lock(mutex_);
  if (pending_.empty()) return std::nullopt;

  // create_time advances per product, so this order preserves each key's
  // propose order and the projected records are exactly what commit yields
  std::stable_sort(pending_.begin(), pending_.end(), [](const Pending& a, const Pending& b) {
    if (a.tx.create_time != b.tx.create_time) return a.tx.create_time < b.tx.create_time;
    return a.tx.txid < b.tx.txid;
  });

  Block block;
  block.number = blocks_.size();
  block.prev_hash = blocks_.empty() ? Digest{} : blocks_.back().header_hash();
  block.transactions.reserve(pending_.size());
  for (auto& p : pending_) {
    block.timestamp = std::max(block.timestamp, p.tx.create_time);
    index_[p.tx.txid] = Location{blocks_.size(), block.transactions.size()};
    state_.insert_or_assign(p.tx.product_id, std::move(p.after));
    block.transactions.push_back(std::move(p.tx));
  }
  block.data_hash = Block::compute_data_hash(block.transactions);
  pending_.clear();
  projected_.clear();
  blocks_.push_back(block);
  return block;
}

std::optional<Transaction> Ledger::find_transaction(const Digest& txid) const {
  std::shared_lock lock(mutex_);
  auto it = index_.find(txid);
  if (it == index_.end()) return std::nullopt;
  return blocks_[it->second.block].transactions[it->second.index];
}

Transaction Ledger::get_transaction(const Digest& txid) const {
  auto tx = find_transaction(txid);
  if (!tx) throw Error(ErrorCode::NotFound, txid.hex());
  return *std::move(tx);
}

ProductRecord Ledger::get_state(const std::string& product_id) const {
  std::shared_lock lock(mutex_);
  auto it = state_.find(product_id);
  if (it == state_.end()) throw Error(ErrorCode::NotFound, product_id);
  return it->second;
}

ProductRecord Ledger::read_state(const std::string& product_id, const PublicKey& reader) const {
  ProductRecord r = get_state(product_id);
  if (!r.acl_allows(reader)) r.bf.clear();
  return r;
}

std::optional<ProductRecord> Ledger::projected_state(const std::string& product_id) const {
  std::shared_lock lock(mutex_);
  const ProductRecord* r = latest_record(product_id);
  if (r == nullptr) return std::nullopt;
  return *r;
}

bool Ledger::has_product(const std::string& product_id) const {
  std::shared_lock lock(mutex_);
  return state_.count(product_id) != 0;
}

std::vector<Transaction> Ledger::scan_transactions(
    const std::function<bool(const Transaction&)>& predicate) const {
  std::vector<Transaction> out;
  visit_transactions([&](const Transaction& tx) {
    if (predicate(tx)) out.push_back(tx);
    return true;
  });
  return out;
}

std::size_t Ledger::visit_transactions(
    const std::function<bool(const Transaction&)>& visit) const {
  std::shared_lock lock(mutex_);
  std::size_t visited = 0;
  for (const auto& block : blocks_) {
    for (const auto& tx : block.transactions) {
      ++visited;
      if (!visit(tx)) return visited;
    }
  }
  return visited;
}

bool Ledger::verify_chain() const {
  std::shared_lock lock(mutex_);
  return validate(blocks_);
}

std::uint64_t Ledger::height() const {
  std::shared_lock lock(mutex_);
  return blocks_.size();
}

std::size_t Ledger::transaction_count() const {
  std::shared_lock lock(mutex_);
  return index_.size();
}

std::size_t Ledger::pending_count() const {
  std::shared_lock lock(mutex_);
  return pending_.size();
}

std::vector<Block> Ledger::blocks() const {
  std::shared_lock lock(mutex_);
  return blocks_;
}

WorldState Ledger::world_state() const {
  std::shared_lock lock(mutex_);
  return state_;
}

std::int64_t Ledger::latest_time() const {
  std::shared_lock lock(mutex_);
  std::int64_t t = 0;
  for (const auto& b : blocks_) t = std::max(t, b.timestamp);
  for (const auto& p : pending_) t = std::max(t, p.tx.create_time);
  return t;
}

std::size_t Ledger::count_by_creator(const PublicKey& creator) const {
  std::shared_lock lock(mutex_);
  auto lo = nonces_.lower_bound({creator, 0});
  std::size_t n = 0;
  for (auto it = lo; it != nonces_.end() && it->first == creator; ++it) ++n;
  return n;
}

void Ledger::mutate_blocks_for_testing(const std::function<void(std::vector<Block>&)>& fn) {
  std::unique_lock lock(mutex_);
  fn(blocks_);
}

// Full re-validation of a block sequence: header links, data hashes,
// timestamps, every txid and signature, nonce uniqueness, and a contract
// replay.
bool Ledger::validate(const std::vector<Block>& blocks) {
  Digest prev{};
  std::set<std::pair<PublicKey, std::uint64_t>> nonces;
  std::set<Digest> txids;
  for (std::size_t n = 0; n < blocks.size(); ++n) {
    const Block& b = blocks[n];
    if (b.number != n || b.prev_hash != prev || b.transactions.empty()) return false;
    if (b.data_hash != Block::compute_data_hash(b.transactions)) return false;
    std::int64_t latest = 0;
    for (std::size_t i = 0; i < b.transactions.size(); ++i) {
      const Transaction& tx = b.transactions[i];
      if (!tx.well_formed()) return false;
      if (!nonces.emplace(tx.creator, tx.nonce).second) return false;
      if (!txids.insert(tx.txid).second) return false;
      if (i > 0) {
        const Transaction& before = b.transactions[i - 1];
        if (std::pair(before.create_time, before.txid) >= std::pair(tx.create_time, tx.txid))
          return false;
      }
      latest = std::max(latest, tx.create_time);
    }
    if (b.timestamp != latest) return false;
    prev = b.header_hash();
  }
  try {
    replay(blocks);
  } catch (const Error&) {
    return false;
  }
  return true;
}

}  // namespace aigc::ledger
