#include <chrono>

#include "aigc/error.hpp"
#include "aigc/lifecycle.hpp"

namespace aigc::lifecycle {

std::string_view role_name(Role r) noexcept {
  switch (r) {
    case Role::Producer: return "producer";
    case Role::Provider: return "provider";
    case Role::Consumer: return "consumer";
    case Role::Auditor: return "auditor";
  }
  return "?";
}

std::optional<Role> parse_role(std::string_view s) noexcept {
  for (auto r : {Role::Producer, Role::Provider, Role::Consumer, Role::Auditor})
    if (role_name(r) == s) return r;
  return std::nullopt;
}

std::string_view node_class_name(NodeClass c) noexcept {
  return c == NodeClass::Light ? "light" : "full";
}

std::optional<NodeClass> parse_node_class(std::string_view s) noexcept {
  if (s == "light") return NodeClass::Light;
  if (s == "full") return NodeClass::Full;
  return std::nullopt;
}

NodeClass expected_node_class(Role r) noexcept {
  return (r == Role::Producer || r == Role::Consumer) ? NodeClass::Light : NodeClass::Full;
}

std::int64_t SystemClock::now() {
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                      std::chrono::system_clock::now().time_since_epoch())
                      .count();
  last_ = std::max<std::int64_t>(ms, last_ + 1);
  return last_;
}

void SystemClock::observe(std::int64_t t) { last_ = std::max(last_, t); }

Bytes SeedSource::derive(std::string_view label, std::size_t n) const {
  Bytes out;
  out.reserve(n);
  if (!master_) {
    out.resize(n);
    crypto::random_bytes(out);
    return out;
  }
  for (std::uint32_t block = 0; out.size() < n; ++block) {
    Bytes msg = to_bytes(label);
    put_be32(msg, block);
    auto chunk = crypto::mac(*master_, msg);
    out.insert(out.end(), chunk.begin(), chunk.begin() + std::min<std::size_t>(32, n - out.size()));
  }
  return out;
}

std::uint64_t SeedSource::derive_u64(std::string_view label) const {
  return read_be64(derive(label, 8).data());
}

const Identity& Registry::register_identity(Role role, NodeClass node_class,
                                            const SeedSource& seeds, Clock& clock) {
  if (node_class != expected_node_class(role))
    throw Error(ErrorCode::RoleClassMismatch,
                std::string(role_name(role)) + " runs a " +
                    std::string(node_class_name(expected_node_class(role))) + " node");

  std::size_t same_role = 0;
  for (const auto& id : identities_) same_role += id.role == role;

  Identity id;
  id.role = role;
  id.node_class = node_class;
  id.id = std::string(role_name(role)) + "-" + std::to_string(same_role + 1);
  if (seeds.deterministic()) {
    Bytes seed = seeds.derive("identity/" + std::to_string(identities_.size()));
    id.keypair = crypto::keygen(ByteView(seed));
  } else {
    id.keypair = crypto::keygen();
  }
  id.cert_issued_at = clock.now();
  identities_.push_back(std::move(id));
  return identities_.back();
}

const Identity* Registry::find(std::string_view id_or_pk) const {
  for (const auto& id : identities_)
    if (id.id == id_or_pk || id.pk().hex() == id_or_pk) return &id;
  return nullptr;
}

const Identity& Registry::require(std::string_view id_or_pk) const {
  const Identity* id = find(id_or_pk);
  if (id == nullptr) throw Error(ErrorCode::UnknownIdentity, std::string(id_or_pk));
  return *id;
}

bool Registry::contains(const PublicKey& pk) const {
  for (const auto& id : identities_)
    if (id.pk() == pk) return true;
  return false;
}

nlohmann::json Registry::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& id : identities_) {
    arr.push_back({{"id", id.id},
                   {"role", role_name(id.role)},
                   {"node_class", node_class_name(id.node_class)},
                   {"public_key", id.pk().hex()},
                   {"secret_key", id.keypair.secret_key.hex()},
                   {"cert_issued_at", id.cert_issued_at}});
  }
  return arr;
}

Registry Registry::from_json(const nlohmann::json& j) {
  Registry reg;
  try {
    for (const auto& e : j) {
      Identity id;
      id.id = e.at("id").get<std::string>();
      auto role = parse_role(e.at("role").get<std::string>());
      auto cls = parse_node_class(e.at("node_class").get<std::string>());
      auto pk = PublicKey::from_hex(e.at("public_key").get<std::string>());
      auto sk = crypto::SecretKey::from_hex(e.at("secret_key").get<std::string>());
      if (!role || !cls || !pk || !sk) throw Error(ErrorCode::InvalidKey, "keystore entry " + id.id);
      id.role = *role;
      id.node_class = *cls;
      id.keypair = {*pk, *sk};
      id.cert_issued_at = e.at("cert_issued_at").get<std::int64_t>();
      reg.identities_.push_back(std::move(id));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidKey, std::string("keystore: ") + e.what());
  }
  return reg;
}

}  // namespace aigc::lifecycle
