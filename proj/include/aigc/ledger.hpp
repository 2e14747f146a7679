#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "aigc/bytes.hpp"
#include "aigc/crypto.hpp"

namespace aigc::ledger {

using crypto::Digest;
using crypto::PublicKey;
using crypto::Signature;

enum class TxType : std::uint8_t { Req = 1, Gen = 2, Upload = 3, Exchange = 4 };
enum class Status { Prepared, Generating, Generated, Traded };

std::string_view tx_type_name(TxType t) noexcept;
std::optional<TxType> parse_tx_type(std::string_view s) noexcept;
std::string_view status_name(Status s) noexcept;
std::optional<Status> parse_status(std::string_view s) noexcept;

// World-state field names used in write-sets.
namespace field {
inline constexpr std::string_view kAcl = "acl";
inline constexpr std::string_view kBf = "bf";
inline constexpr std::string_view kDescriptionHash = "description_hash";
inline constexpr std::string_view kModelId = "model_id";
inline constexpr std::string_view kModelSign = "model_sign";
inline constexpr std::string_view kOwnerSign = "owner_sign";
inline constexpr std::string_view kProducerSign = "producer_sign";
inline constexpr std::string_view kProductHash = "product_hash";
inline constexpr std::string_view kStatus = "status";
}  // namespace field

struct Write {
  std::string field;
  Bytes value;
  friend bool operator==(const Write&, const Write&) = default;
};

struct Transaction {
  Digest txid;
  TxType type = TxType::Req;
  std::string product_id;
  std::string args;
  std::int64_t create_time = 0;
  std::uint64_t nonce = 0;
  PublicKey creator;
  Signature creator_sig;
  std::vector<Write> writes;  // sorted by field name

  /// type || lp(product_id) || lp(args) || be64(create_time) || be64(nonce)
  /// || creator || be32(#writes) || (lp(field) || lp(value))*
  Bytes body() const;

  /// Sorts the writes, signs the body and fills txid.
  static Transaction make(TxType type, std::string product_id, std::string args,
                          std::int64_t create_time, std::uint64_t nonce,
                          const crypto::KeyPair& creator, std::vector<Write> writes);

  /// txid matches the body and the signature verifies.
  bool well_formed() const;

  const Write* find_write(std::string_view field) const noexcept;

  /// Sum of field-name and value sizes over the write-set.
  std::size_t bytes_written() const noexcept;

  friend bool operator==(const Transaction&, const Transaction&) = default;
};

struct Block {
  std::uint64_t number = 0;
  Digest prev_hash;
  Digest data_hash;
  std::int64_t timestamp = 0;
  std::vector<Transaction> transactions;

  /// digest(be64(number) || prev_hash || data_hash || be64(timestamp))
  Digest header_hash() const;
  static Digest compute_data_hash(const std::vector<Transaction>& txs);

  friend bool operator==(const Block&, const Block&) = default;
};

struct ProductRecord {
  std::string product_id;
  std::string model_id;
  Digest description_hash;
  std::optional<Digest> product_hash;
  Signature producer_sign;
  std::optional<Signature> model_sign;
  Signature owner_sign;
  Bytes bf;
  Status status = Status::Prepared;
  std::vector<PublicKey> acl;
  std::int64_t updated_at = 0;  // create_time of the last applied tx

  bool acl_allows(const PublicKey& reader) const;

  friend bool operator==(const ProductRecord&, const ProductRecord&) = default;
};

using WorldState = std::map<std::string, ProductRecord>;

/// Validates `tx` against the product's current record (nullptr when the key
/// is absent) and returns the updated record. This is the chain's contract:
/// throws UnknownProduct, ProductExists or InvalidTransition.
ProductRecord apply_transaction(const ProductRecord* current, const Transaction& tx);

/// Rebuilds the world state from genesis, re-running the contract.
WorldState replay(const std::vector<Block>& blocks);

struct Receipt {
  Digest txid;
};

// Single-process consortium ledger: one orderer, explicit block cuts,
// key-value world state. All public members are thread-safe.
class Ledger {
 public:
  Ledger() = default;
  Ledger(Ledger&& other) noexcept;
  Ledger& operator=(Ledger&& other) noexcept;
  Ledger(const Ledger&) = delete;
  Ledger& operator=(const Ledger&) = delete;

  /// Throws BadSignature, DuplicateNonce, UnknownProduct, ProductExists,
  /// InvalidTransition.
  Receipt propose(Transaction tx);

  /// Orders pending transactions by (create_time, txid) into one block.
  /// Returns nullopt when nothing is pending.
  std::optional<Block> commit_block();

  /// Committed transactions only; throws NotFound.
  Transaction get_transaction(const Digest& txid) const;
  std::optional<Transaction> find_transaction(const Digest& txid) const;

  /// Latest committed record, unrestricted. Throws NotFound.
  ProductRecord get_state(const std::string& product_id) const;
  /// Latest committed record with bf redacted unless `reader` is in the acl.
  ProductRecord read_state(const std::string& product_id, const PublicKey& reader) const;
  /// Committed record with pending writes applied.
  std::optional<ProductRecord> projected_state(const std::string& product_id) const;
  bool has_product(const std::string& product_id) const;

  std::vector<Transaction> scan_transactions(
      const std::function<bool(const Transaction&)>& predicate) const;

  /// Visits committed transactions in chain order until `visit` returns
  /// false. Returns the number visited.
  std::size_t visit_transactions(const std::function<bool(const Transaction&)>& visit) const;

  bool verify_chain() const;

  /// JSON lines, one block per line. Throws IoError.
  void save(const std::filesystem::path& path) const;
  /// Re-validates everything; throws IoError or CorruptLedger.
  static Ledger load(const std::filesystem::path& path);

  std::uint64_t height() const;
  std::size_t transaction_count() const;
  std::size_t pending_count() const;
  std::vector<Block> blocks() const;
  WorldState world_state() const;
  /// Largest create_time seen, committed or pending (0 when empty).
  std::int64_t latest_time() const;
  /// Number of transactions (committed + pending) created by `creator`.
  std::size_t count_by_creator(const PublicKey& creator) const;

  /// Direct access to stored blocks, for corruption tests.
  void mutate_blocks_for_testing(const std::function<void(std::vector<Block>&)>& fn);

 private:
  struct Pending {
    Transaction tx;
    ProductRecord after;
  };
  struct Location {
    std::size_t block;
    std::size_t index;
  };

  static bool validate(const std::vector<Block>& blocks);
  const ProductRecord* latest_record(const std::string& product_id) const;

  mutable std::shared_mutex mutex_;
  std::vector<Block> blocks_;
  std::map<Digest, Location> index_;
  WorldState state_;
  std::set<std::pair<PublicKey, std::uint64_t>> nonces_;
  std::vector<Pending> pending_;
  WorldState projected_;
};

// JSON-lines codec, exposed for the CLI and tests.
std::string encode_block_line(const Block& block);
/// Throws CorruptLedger on anything non-canonical.
Block decode_block_line(std::string_view line);
/// One transaction as a single-line JSON object, same key order as the file.
std::string encode_transaction_json(const Transaction& tx);

}  // namespace aigc::ledger
