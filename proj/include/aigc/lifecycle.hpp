#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aigc/bytes.hpp"
#include "aigc/crypto.hpp"
#include "aigc/ibf.hpp"
#include "aigc/ledger.hpp"

namespace aigc::lifecycle {

using crypto::Digest;
using crypto::PublicKey;
using crypto::Signature;

enum class Role { Producer, Provider, Consumer, Auditor };
enum class NodeClass { Light, Full };

std::string_view role_name(Role r) noexcept;           // "producer", ...
std::optional<Role> parse_role(std::string_view s) noexcept;
std::string_view node_class_name(NodeClass c) noexcept;  // "light" / "full"
std::optional<NodeClass> parse_node_class(std::string_view s) noexcept;
/// Producer and Consumer run light nodes; Provider and Auditor full nodes.
NodeClass expected_node_class(Role r) noexcept;

struct Identity {
  std::string id;  // "producer-1", ...
  Role role = Role::Producer;
  NodeClass node_class = NodeClass::Light;
  crypto::KeyPair keypair;
  std::int64_t cert_issued_at = 0;

  const PublicKey& pk() const noexcept { return keypair.public_key; }
};

// Millisecond timestamps, strictly increasing per clock.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now() = 0;
  /// Later readings will be greater than `t`.
  virtual void observe(std::int64_t t) = 0;
};

class SystemClock final : public Clock {
 public:
  std::int64_t now() override;
  void observe(std::int64_t t) override;

 private:
  std::int64_t last_ = 0;
};

// Deterministic clock: start + 1, start + 2, ...
class LogicalClock final : public Clock {
 public:
  explicit LogicalClock(std::int64_t start) : last_(start) {}
  std::int64_t now() override { return ++last_; }
  void observe(std::int64_t t) override { last_ = std::max(last_, t); }

 private:
  std::int64_t last_;
};

// Source of key, nonce and filter seeds. With a master seed every output is
// a pure function of (master, label); without one it is system randomness.
class SeedSource {
 public:
  SeedSource() = default;
  explicit SeedSource(Bytes master) : master_(std::move(master)) {}

  bool deterministic() const noexcept { return master_.has_value(); }
  Bytes derive(std::string_view label, std::size_t n = 32) const;
  std::uint64_t derive_u64(std::string_view label) const;

 private:
  std::optional<Bytes> master_;
};

// In-process stand-in for the certificate authority.
class Registry {
 public:
  /// Throws RoleClassMismatch.
  const Identity& register_identity(Role role, NodeClass node_class, const SeedSource& seeds,
                                    Clock& clock);

  /// Lookup by id or lowercase public-key hex.
  const Identity* find(std::string_view id_or_pk) const;
  /// Throws UnknownIdentity.
  const Identity& require(std::string_view id_or_pk) const;
  bool contains(const PublicKey& pk) const;
  const std::vector<Identity>& identities() const noexcept { return identities_; }

  nlohmann::json to_json() const;
  static Registry from_json(const nlohmann::json& j);

 private:
  std::vector<Identity> identities_;
};

struct GenerationMetadata {
  std::uint64_t steps = 0;
  std::uint64_t seed = 0;
  std::int64_t created_date = 0;
  std::vector<std::string> exec_log;

  /// be64(steps) || be64(seed) || be64(created_date): what Model Sign covers.
  Bytes signed_bytes() const;
  friend bool operator==(const GenerationMetadata&, const GenerationMetadata&) = default;
};

// φ
struct ProducerProof {
  PublicKey producer_pk;
  Digest txid_req;
  Digest txid_upload;
  std::string prompt;
};

// ϕ
struct ProviderProof {
  PublicKey provider_pk;
  Digest txid_gen;
  GenerationMetadata metadata;
};

enum class Verdict { Consistent, Inconsistent };
std::string_view verdict_name(Verdict v) noexcept;

struct AuditChecks {
  bool producer_sign_ok = false;
  bool model_sign_ok = false;
  bool txid_req_ok = false;
  bool txid_upload_ok = false;
  bool txid_gen_ok = false;
  bool prompt_hash_ok = false;
  bool candidate_product_hash_ok = false;

  bool all() const noexcept {
    return producer_sign_ok && model_sign_ok && txid_req_ok && txid_upload_ok && txid_gen_ok &&
           prompt_hash_ok && candidate_product_hash_ok;
  }
};

struct AuditReport {
  std::string product_id;
  AuditChecks checks;
  Verdict verdict = Verdict::Inconsistent;
};

nlohmann::json to_json(const ProducerProof& p);
nlohmann::json to_json(const ProviderProof& p);
nlohmann::json to_json(const GenerationMetadata& m);
nlohmann::json to_json(const AuditReport& r);
/// Throw InvalidParams on missing or malformed fields.
ProducerProof producer_proof_from_json(const nlohmann::json& j);
ProviderProof provider_proof_from_json(const nlohmann::json& j);
GenerationMetadata metadata_from_json(const nlohmann::json& j);

inline constexpr std::size_t kDefaultProductLength = 1024;

/// Stand-in for the generative model: SHA-256 counter-mode expansion of
/// (args, seed) to `length` bytes.
Bytes mock_generator(std::string_view args, std::uint64_t seed,
                     std::size_t length = kDefaultProductLength);

using Generator = std::function<Bytes(std::string_view args, std::uint64_t seed)>;

// Off-chain message hops in the signing choreography. A tap sees each
// payload in transit and may alter it (tests use this to play a tampering
// channel).
enum class Hop {
  ArgsToProvider,
  Sigma1ToProvider,
  Sigma2ToProducer,
  ProductToProducer,
  Sigma3ToProducer,
  Sigma4ToProvider,
};
using ChannelTap = std::function<void(Hop, Bytes&)>;

// Write-set builders. They play the endorsing contract: given the current
// record they compute the next filter and field values, then sign.
namespace txbuild {
ledger::Transaction req(const crypto::KeyPair& producer, const PublicKey& provider,
                        const std::string& product_id, const std::string& args,
                        const std::string& model_id, std::int64_t create_time,
                        std::uint64_t nonce, ByteView filter_seed, const ibf::Params& params);
ledger::Transaction gen(const crypto::KeyPair& provider, const ledger::ProductRecord& current,
                        const Signature& model_sign, std::int64_t create_time,
                        std::uint64_t nonce);
ledger::Transaction upload(const crypto::KeyPair& producer, const ledger::ProductRecord& current,
                           const Digest& product_hash, std::int64_t create_time,
                           std::uint64_t nonce);
ledger::Transaction exchange(const crypto::KeyPair& consumer,
                             const ledger::ProductRecord& current, std::int64_t create_time,
                             std::uint64_t nonce);
}  // namespace txbuild

struct StageCost {
  std::string stage;  // registration, content_generation, ...
  std::string tx_type;  // Req/Gen/Upload/Exchange, or "None"
  std::size_t bytes_written = 0;
};

struct UploadOptions {
  std::uint64_t steps = 50;
  std::optional<std::uint64_t> seed;
};

struct UploadResult {
  Bytes product;
  Digest txid_gen;
  Digest txid_upload;
  GenerationMetadata metadata;
};

// The five procedures. Every procedure that writes proposes its
// transaction(s) and commits them before returning.
class Lifecycle {
 public:
  Lifecycle(ledger::Ledger& ledger, Registry& registry, const SeedSource& seeds, Clock& clock,
            ibf::Params params = {});

  void set_tap(ChannelTap tap) { tap_ = std::move(tap); }

  /// Throws RoleClassMismatch.
  const Identity& register_identity(Role role, NodeClass node_class);

  /// Throws SigmaVerifyFailed ("sigma1"/"sigma2"), ProductExists, WrongRole,
  /// UnknownIdentity.
  Digest content_generation(const Identity& producer, const Identity& provider,
                            const std::string& args, const std::string& product_id,
                            const std::string& model_id);

  /// Throws SigmaVerifyFailed ("sigma3"/"sigma4"), WrongStatus, UnknownProduct.
  UploadResult data_uploading(const Identity& producer, const Identity& provider,
                              const std::string& product_id, const std::string& args,
                              const Generator& generator, const UploadOptions& options = {});

  /// Throws WrongStatus, OwnerSignInvalid, UnknownProduct.
  Digest copyright_trading(const Identity& consumer, const std::string& product_id,
                           const PublicKey& owner_pk);

  /// Throws NotAuditor, UnknownProduct. Reads only.
  AuditReport copyright_management(const Identity& auditor, const std::string& product_id,
                                   const ProducerProof& phi, const ProviderProof& varphi,
                                   std::optional<ByteView> candidate_product = std::nullopt);

  /// Write-set size of every transaction this instance proposed, plus the
  /// zero-cost stages, in call order.
  const std::vector<StageCost>& costs() const noexcept { return costs_; }
  /// Off-chain events such as the (unmodelled) payment.
  const std::vector<std::string>& events() const noexcept { return events_; }

 private:
  void require_role(const Identity& who, Role role) const;
  void send(Hop hop, Bytes& payload) const;
  std::uint64_t next_nonce(const PublicKey& creator, std::int64_t create_time) const;
  std::int64_t next_time(const std::string& product_id);
  Digest submit(ledger::Transaction tx, std::string_view stage);

  ledger::Ledger& ledger_;
  Registry& registry_;
  const SeedSource& seeds_;
  Clock& clock_;
  ibf::Params params_;
  ChannelTap tap_;
  std::vector<StageCost> costs_;
  std::vector<std::string> events_;
};

}  // namespace aigc::lifecycle
