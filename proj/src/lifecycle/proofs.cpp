#include "aigc/error.hpp"
#include "aigc/lifecycle.hpp"

namespace aigc::lifecycle {

using nlohmann::json;

namespace {

template <typename T>
T hex_field(const json& j, const char* name) {
  auto v = T::from_hex(j.at(name).get<std::string>());
  if (!v) throw Error(ErrorCode::InvalidParams, std::string("malformed ") + name);
  return *v;
}

template <typename Fn>
auto parsing(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidParams, std::string(what) + ": " + e.what());
  }
}

}  // namespace

json to_json(const GenerationMetadata& m) {
  return {{"steps", m.steps},
          {"seed", m.seed},
          {"created_date", m.created_date},
          {"exec_log", m.exec_log}};
}

json to_json(const ProducerProof& p) {
  return {{"producer_pk", p.producer_pk.hex()},
          {"txid_req", p.txid_req.hex()},
          {"txid_upload", p.txid_upload.hex()},
          {"prompt", p.prompt}};
}

json to_json(const ProviderProof& p) {
  return {{"provider_pk", p.provider_pk.hex()},
          {"txid_gen", p.txid_gen.hex()},
          {"metadata", to_json(p.metadata)}};
}

json to_json(const AuditReport& r) {
  const auto& c = r.checks;
  return {{"product_id", r.product_id},
          {"checks",
           {{"producer_sign_ok", c.producer_sign_ok},
            {"model_sign_ok", c.model_sign_ok},
            {"txid_req_ok", c.txid_req_ok},
            {"txid_upload_ok", c.txid_upload_ok},
            {"txid_gen_ok", c.txid_gen_ok},
            {"prompt_hash_ok", c.prompt_hash_ok},
            {"candidate_product_hash_ok", c.candidate_product_hash_ok}}},
          {"verdict", verdict_name(r.verdict)}};
}

GenerationMetadata metadata_from_json(const json& j) {
  return parsing("metadata", [&] {
    GenerationMetadata m;
    m.steps = j.at("steps").get<std::uint64_t>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.created_date = j.at("created_date").get<std::int64_t>();
    m.exec_log = j.at("exec_log").get<std::vector<std::string>>();
    return m;
  });
}

ProducerProof producer_proof_from_json(const json& j) {
  return parsing("phi", [&] {
    ProducerProof p;
    p.producer_pk = hex_field<PublicKey>(j, "producer_pk");
    p.txid_req = hex_field<Digest>(j, "txid_req");
    p.txid_upload = hex_field<Digest>(j, "txid_upload");
    p.prompt = j.at("prompt").get<std::string>();
    return p;
  });
}

ProviderProof provider_proof_from_json(const json& j) {
  return parsing("varphi", [&] {
    ProviderProof p;
    p.provider_pk = hex_field<PublicKey>(j, "provider_pk");
    p.txid_gen = hex_field<Digest>(j, "txid_gen");
    p.metadata = metadata_from_json(j.at("metadata"));
    return p;
  });
}

}  // namespace aigc::lifecycle
