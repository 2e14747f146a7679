#include "aigc/error.hpp"
#include "aigc/lifecycle.hpp"

namespace aigc::lifecycle {

using ledger::Status;

namespace {
Bytes raw(const Signature& s) { return Bytes(s.bytes.begin(), s.bytes.end()); }
}  // namespace

std::string_view verdict_name(Verdict v) noexcept {
  return v == Verdict::Consistent ? "Consistent" : "Inconsistent";
}

Lifecycle::Lifecycle(ledger::Ledger& ledger, Registry& registry, const SeedSource& seeds,
                     Clock& clock, ibf::Params params)
    : ledger_(ledger), registry_(registry), seeds_(seeds), clock_(clock), params_(params) {}

const Identity& Lifecycle::register_identity(Role role, NodeClass node_class) {
  const Identity& id = registry_.register_identity(role, node_class, seeds_, clock_);
  costs_.push_back({"registration", "None", 0});
  return id;
}

void Lifecycle::require_role(const Identity& who, Role role) const {
  if (!registry_.contains(who.pk())) throw Error(ErrorCode::UnknownIdentity, who.id);
  if (who.role != role)
    throw Error(ErrorCode::WrongRole, who.id + " is not a " + std::string(role_name(role)));
}

void Lifecycle::send(Hop hop, Bytes& payload) const {
  if (tap_) tap_(hop, payload);
}

std::uint64_t Lifecycle::next_nonce(const PublicKey& creator, std::int64_t create_time) const {
  return seeds_.derive_u64("nonce/" + creator.hex() + "/" + std::to_string(create_time));
}

std::int64_t Lifecycle::next_time(const std::string& product_id) {
  clock_.observe(ledger_.latest_time());
  if (auto rec = ledger_.projected_state(product_id)) clock_.observe(rec->updated_at);
  return clock_.now();
}

Digest Lifecycle::submit(ledger::Transaction tx, std::string_view stage) {
  const std::size_t bytes = tx.bytes_written();
  const auto type = tx.type;
  const Digest txid = ledger_.propose(std::move(tx)).txid;
  ledger_.commit_block();
  costs_.push_back({std::string(stage), std::string(ledger::tx_type_name(type)), bytes});
  return txid;
}

Digest Lifecycle::content_generation(const Identity& producer, const Identity& provider,
                                     const std::string& args, const std::string& product_id,
                                     const std::string& model_id) {
  require_role(producer, Role::Producer);
  require_role(provider, Role::Provider);
  if (ledger_.projected_state(product_id)) throw Error(ErrorCode::ProductExists, product_id);

  // Producer -> Provider: Args with σ1
  Bytes args_in_transit = to_bytes(args);
  Bytes sigma1 = raw(crypto::sign(producer.keypair.secret_key, as_bytes(args)));
  send(Hop::ArgsToProvider, args_in_transit);
  send(Hop::Sigma1ToProvider, sigma1);
  if (!crypto::verify(producer.pk().view(), args_in_transit, sigma1))
    throw Error(ErrorCode::SigmaVerifyFailed, "sigma1");

  // Provider -> Producer: σ2 over the Args it accepted
  Bytes sigma2 = raw(crypto::sign(provider.keypair.secret_key, args_in_transit));
  send(Hop::Sigma2ToProducer, sigma2);
  if (!crypto::verify(provider.pk().view(), as_bytes(args), sigma2))
    throw Error(ErrorCode::SigmaVerifyFailed, "sigma2");

  const std::int64_t t = next_time(product_id);
  const Bytes filter_seed = seeds_.derive("ibf/" + product_id);
  auto tx = txbuild::req(producer.keypair, provider.pk(), product_id, args, model_id, t,
                         next_nonce(producer.pk(), t), filter_seed, params_);
  return submit(std::move(tx), "content_generation");
}

UploadResult Lifecycle::data_uploading(const Identity& producer, const Identity& provider,
                                       const std::string& product_id, const std::string& args,
                                       const Generator& generator, const UploadOptions& options) {
  require_role(producer, Role::Producer);
  require_role(provider, Role::Provider);
  auto record = ledger_.projected_state(product_id);
  if (!record) throw Error(ErrorCode::UnknownProduct, product_id);
  if (record->status != Status::Prepared)
    throw Error(ErrorCode::WrongStatus, std::string(ledger::status_name(record->status)));

  UploadResult result;
  result.metadata.steps = options.steps;
  result.metadata.seed = options.seed ? *options.seed : seeds_.derive_u64("gen-seed/" + product_id);
  const Bytes product = generator(args, result.metadata.seed);

  // Provider -> Producer: P with σ3
  Bytes product_in_transit = product;
  Bytes sigma3 = raw(crypto::sign(provider.keypair.secret_key, product));
  send(Hop::ProductToProducer, product_in_transit);
  send(Hop::Sigma3ToProducer, sigma3);
  if (!crypto::verify(provider.pk().view(), product_in_transit, sigma3))
    throw Error(ErrorCode::SigmaVerifyFailed, "sigma3");

  // Producer -> Provider: σ4 over the P it accepted
  Bytes sigma4 = raw(crypto::sign(producer.keypair.secret_key, product_in_transit));
  send(Hop::Sigma4ToProvider, sigma4);
  if (!crypto::verify(producer.pk().view(), product, sigma4))
    throw Error(ErrorCode::SigmaVerifyFailed, "sigma4");

  result.metadata.created_date = clock_.now();
  result.metadata.exec_log = {
      "model_id=" + record->model_id,
      "steps=" + std::to_string(result.metadata.steps),
      "seed=" + std::to_string(result.metadata.seed),
      "product_bytes=" + std::to_string(product.size()),
  };
  const Signature model_sign =
      crypto::sign(provider.keypair.secret_key, result.metadata.signed_bytes());

  std::int64_t t = next_time(product_id);
  result.txid_gen = submit(
      txbuild::gen(provider.keypair, *record, model_sign, t, next_nonce(provider.pk(), t)),
      "data_uploading");

  const Digest product_hash = crypto::digest(product_in_transit);
  record = ledger_.projected_state(product_id);
  t = next_time(product_id);
  result.txid_upload = submit(
      txbuild::upload(producer.keypair, *record, product_hash, t, next_nonce(producer.pk(), t)),
      "data_uploading");

  result.product = product_in_transit;
  return result;
}

Digest Lifecycle::copyright_trading(const Identity& consumer, const std::string& product_id,
                                    const PublicKey& owner_pk) {
  require_role(consumer, Role::Consumer);
  if (!ledger_.has_product(product_id)) throw Error(ErrorCode::UnknownProduct, product_id);

  // what the consumer itself may read: owner_sign and status
  const auto visible = ledger_.read_state(product_id, consumer.pk());
  if (visible.status == Status::Prepared || visible.status == Status::Generating)
    throw Error(ErrorCode::WrongStatus, std::string(ledger::status_name(visible.status)));
  if (!crypto::verify(owner_pk, visible.description_hash.view(), visible.owner_sign))
    throw Error(ErrorCode::OwnerSignInvalid, owner_pk.hex());

  events_.push_back("payment not modelled: " + consumer.pk().hex() + " -> " + owner_pk.hex() +
                    " for " + product_id);

  const std::int64_t t = next_time(product_id);
  auto record = ledger_.projected_state(product_id);
  return submit(txbuild::exchange(consumer.keypair, *record, t, next_nonce(consumer.pk(), t)),
                "copyright_trading");
}

AuditReport Lifecycle::copyright_management(const Identity& auditor,
                                            const std::string& product_id,
                                            const ProducerProof& phi,
                                            const ProviderProof& varphi,
                                            std::optional<ByteView> candidate_product) {
  if (auditor.role != Role::Auditor || !registry_.contains(auditor.pk()))
    throw Error(ErrorCode::NotAuditor, auditor.id);
  if (!ledger_.has_product(product_id)) throw Error(ErrorCode::UnknownProduct, product_id);
  const auto record = ledger_.get_state(product_id);
  const auto filter = ibf::Filter::deserialize(record.bf);

  auto traced = [&](const Digest& txid) {
    auto tx = ledger_.find_transaction(txid);
    if (!tx) return false;
    return filter.check(ibf::encode_member(tx->args, tx->create_time));
  };

  AuditReport report;
  report.product_id = product_id;
  auto& c = report.checks;
  c.producer_sign_ok =
      crypto::verify(phi.producer_pk, record.description_hash.view(), record.producer_sign);
  c.model_sign_ok = record.model_sign.has_value() &&
                    crypto::verify(varphi.provider_pk, varphi.metadata.signed_bytes(),
                                   *record.model_sign);
  c.txid_req_ok = traced(phi.txid_req);
  c.txid_upload_ok = traced(phi.txid_upload);
  c.txid_gen_ok = traced(varphi.txid_gen);
  c.prompt_hash_ok = crypto::digest(as_bytes(phi.prompt)) == record.description_hash;
  c.candidate_product_hash_ok =
      !candidate_product ||
      (record.product_hash && crypto::digest(*candidate_product) == *record.product_hash);
  report.verdict = c.all() ? Verdict::Consistent : Verdict::Inconsistent;

  costs_.push_back({"copyright_management", "None", 0});
  return report;
}

}  // namespace aigc::lifecycle
