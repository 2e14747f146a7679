#include "aigc/cli.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "aigc/error.hpp"
#include "aigc/tracing.hpp"

namespace aigc::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using ojson = nlohmann::ordered_json;
using namespace lifecycle;

namespace {

constexpr std::int64_t kEpoch = 1700000000000;

struct Options {
  std::string ledger_path = "aigc.ledger";
  std::uint32_t m = ibf::kDefaultTwins;
  std::uint32_t k = ibf::kDefaultHashes;
  std::string rng_seed;
};

fs::path keystore_path(const fs::path& ledger) {
  auto p = ledger;
  p += ".keys.json";
  return p;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& text) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
    out << text;
    if (!out.flush()) throw Error(ErrorCode::IoError, "short write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::IoError, ec.message());
}

json parse_json_file(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidParams, path.string() + ": " + e.what());
  }
}

// Exclusive lock on <ledger>.lock for the duration of a command.
class FileLock {
 public:
  explicit FileLock(const fs::path& ledger) {
    auto p = ledger;
    p += ".lock";
    fd_ = ::open(p.c_str(), O_RDWR | O_CREAT, 0644);
    if (fd_ < 0 || ::flock(fd_, LOCK_EX) != 0)
      throw Error(ErrorCode::IoError, "cannot lock " + p.string());
  }
  ~FileLock() {
    if (fd_ >= 0) ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  int fd_ = -1;
};

// Ledger, keystore sidecar and the derived runtime pieces.
struct Session {
  fs::path ledger_path;
  ledger::Ledger ledger;
  Registry registry;
  json products = json::object();
  ibf::Params params;
  std::optional<Bytes> master;

  std::unique_ptr<SeedSource> seeds;
  std::unique_ptr<Clock> clock;
  std::unique_ptr<Lifecycle> lifecycle;

  static Session open(const Options& opt) {
    Session s;
    s.ledger_path = opt.ledger_path;
    if (!fs::exists(s.ledger_path))
      throw Error(ErrorCode::IoError, "no ledger at " + opt.ledger_path + " (run init)");
    s.ledger = ledger::Ledger::load(s.ledger_path);

    const json ks = parse_json_file(keystore_path(s.ledger_path));
    try {
      s.registry = Registry::from_json(ks.at("identities"));
      s.products = ks.at("products");
      s.params.m = ks.at("ibf").at("m").get<std::uint32_t>();
      s.params.k = ks.at("ibf").at("k").get<std::uint32_t>();
      if (!ks.at("rng_seed").is_null()) {
        auto seed = from_hex(ks.at("rng_seed").get<std::string>());
        if (!seed) throw Error(ErrorCode::InvalidSeed, "keystore rng_seed");
        s.master = *seed;
      }
    } catch (const json::exception& e) {
      throw Error(ErrorCode::IoError, std::string("malformed keystore: ") + e.what());
    }
    s.start();
    return s;
  }

  void start() {
    if (master) {
      seeds = std::make_unique<SeedSource>(*master);
      std::int64_t t = std::max(kEpoch, ledger.latest_time());
      for (const auto& id : registry.identities()) t = std::max(t, id.cert_issued_at);
      clock = std::make_unique<LogicalClock>(t);
    } else {
      seeds = std::make_unique<SeedSource>();
      clock = std::make_unique<SystemClock>();
    }
    lifecycle = std::make_unique<Lifecycle>(ledger, registry, *seeds, *clock, params);
  }

  json keystore() const {
    json ks;
    ks["version"] = 1;
    ks["ibf"] = {{"m", params.m}, {"k", params.k}};
    ks["rng_seed"] = master ? json(to_hex(*master)) : json(nullptr);
    ks["identities"] = registry.to_json();
    ks["products"] = products;
    return ks;
  }

  void save() const {
    ledger.save(ledger_path);
    write_file_atomic(keystore_path(ledger_path), keystore().dump(2) + "\n");
  }

  json& product(const std::string& pid) {
    if (!products.contains(pid)) throw Error(ErrorCode::UnknownProduct, pid);
    return products[pid];
  }
};

std::optional<Bytes> parse_seed(const std::string& hex) {
  if (hex.empty()) return std::nullopt;
  auto seed = from_hex(hex);
  if (!seed || seed->empty()) throw Error(ErrorCode::InvalidSeed, "rng seed must be lowercase hex");
  return seed;
}

Digest parse_digest(const std::string& hex) {
  auto d = Digest::from_hex(hex);
  if (!d) throw Error(ErrorCode::InvalidParams, "malformed txid " + hex);
  return *d;
}

ojson identity_json(const Identity& id) {
  ojson j;
  j["id"] = id.id;
  j["role"] = role_name(id.role);
  j["node_class"] = node_class_name(id.node_class);
  j["pk"] = id.pk().hex();
  return j;
}

ojson record_json(const ledger::ProductRecord& r) {
  auto acl = ojson::array();
  for (const auto& k : r.acl) acl.push_back(k.hex());
  ojson j;
  j["product_id"] = r.product_id;
  j["model_id"] = r.model_id;
  j["description_hash"] = r.description_hash.hex();
  j["product_hash"] = r.product_hash ? ojson(r.product_hash->hex()) : ojson(nullptr);
  j["producer_sign"] = r.producer_sign.hex();
  j["model_sign"] = r.model_sign ? ojson(r.model_sign->hex()) : ojson(nullptr);
  j["owner_sign"] = r.owner_sign.hex();
  j["status"] = ledger::status_name(r.status);
  j["acl"] = std::move(acl);
  j["updated_at"] = r.updated_at;
  j["bf"] = to_hex(r.bf);
  return j;
}

PublicKey resolve_pk(const Registry& registry, const std::string& id_or_hex) {
  if (const Identity* id = registry.find(id_or_hex)) return id->pk();
  auto pk = PublicKey::from_hex(id_or_hex);
  if (!pk) throw Error(ErrorCode::InvalidParams, "malformed public key " + id_or_hex);
  return *pk;
}

ProducerProof producer_proof(Session& s, const std::string& pid) {
  const json& p = s.product(pid);
  if (!p.contains("txid_upload")) throw Error(ErrorCode::WrongStatus, pid + " not uploaded");
  const Identity& producer = s.registry.require(p.at("producer").get<std::string>());
  return {producer.pk(), parse_digest(p.at("txid_req")), parse_digest(p.at("txid_upload")),
          p.at("args").get<std::string>()};
}

ProviderProof provider_proof(Session& s, const std::string& pid) {
  const json& p = s.product(pid);
  if (!p.contains("txid_gen")) throw Error(ErrorCode::WrongStatus, pid + " not uploaded");
  const Identity& provider = s.registry.require(p.at("provider").get<std::string>());
  return {provider.pk(), parse_digest(p.at("txid_gen")), metadata_from_json(p.at("metadata"))};
}

std::vector<double> parse_proportions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::InvalidParams, "bad proportion '" + item + "'");
    }
  }
  return out;
}

fs::path with_suffix(const fs::path& path, const std::string& suffix) {
  auto p = path;
  p.replace_filename(path.stem().string() + suffix + path.extension().string());
  return p;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"AIGC copyright lifecycle on a simulated permissioned ledger"};
  app.require_subcommand(1);
  Options opt;
  app.add_option("--ledger", opt.ledger_path, "ledger file")->capture_default_str();
  app.add_option("--m", opt.m, "filter twins")->capture_default_str()->check(CLI::Range(8u, 1u << 28));
  app.add_option("--k", opt.k, "filter hash count")->capture_default_str()->check(CLI::Range(1u, 16u));
  app.add_option("--rng-seed", opt.rng_seed, "hex seed for deterministic mode");

  std::function<void()> action;

  auto* init = app.add_subcommand("init", "create an empty ledger and keystore");
  init->callback([&] {
    action = [&] {
      const fs::path path = opt.ledger_path;
      FileLock lock(path);
      if (fs::exists(path) || fs::exists(keystore_path(path)))
        throw Error(ErrorCode::LedgerExists, path.string());
      Session s;
      s.ledger_path = path;
      s.params = {opt.m, opt.k};
      s.master = parse_seed(opt.rng_seed);
      s.save();
      out << "initialized " << path.string() << "\n";
    };
  });

  std::string role_text, class_text;
  auto* reg = app.add_subcommand("register", "register an identity");
  reg->add_option("--role", role_text, "producer|provider|consumer|auditor")->required();
  reg->add_option("--node-class", class_text, "light|full (default by role)");
  reg->callback([&] {
    action = [&] {
      const auto role = parse_role(role_text);
      if (!role) throw Error(ErrorCode::InvalidParams, "unknown role " + role_text);
      NodeClass nc = expected_node_class(*role);
      if (!class_text.empty()) {
        auto parsed = parse_node_class(class_text);
        if (!parsed) throw Error(ErrorCode::InvalidParams, "unknown node class " + class_text);
        nc = *parsed;
      }
      FileLock lock(opt.ledger_path);
      auto s = Session::open(opt);
      const Identity id = s.lifecycle->register_identity(*role, nc);
      s.save();
      out << identity_json(id).dump() << "\n";
    };
  });

  std::string producer_id, provider_id, consumer_id, auditor_id, product_id, model_id, prompt;
  auto* gen = app.add_subcommand("generate", "request content generation (Tx_req)");
  gen->add_option("--producer", producer_id)->required();
  gen->add_option("--provider", provider_id)->required();
  gen->add_option("--product-id", product_id)->required();
  gen->add_option("--model-id", model_id)->required();
  gen->add_option("--args", prompt)->required();
  gen->callback([&] {
    action = [&] {
      FileLock lock(opt.ledger_path);
      auto s = Session::open(opt);
      const Identity producer = s.registry.require(producer_id);
      const Identity provider = s.registry.require(provider_id);
      const Digest txid =
          s.lifecycle->content_generation(producer, provider, prompt, product_id, model_id);
      s.products[product_id] = {{"args", prompt},
                                {"producer", producer.id},
                                {"provider", provider.id},
                                {"model_id", model_id},
                                {"txid_req", txid.hex()}};
      s.save();
      out << "txid_req: " << txid.hex() << "\n";
    };
  });

  std::uint64_t steps = 50;
  std::optional<std::uint64_t> gen_seed;
  std::string product_out;
  auto* up = app.add_subcommand("upload", "generate the product and record Tx_gen, Tx_upload");
  up->add_option("--product-id", product_id)->required();
  up->add_option("--steps", steps)->capture_default_str();
  up->add_option("--seed", gen_seed, "generation seed");
  up->add_option("--out", product_out, "write the product bytes here");
  up->callback([&] {
    action = [&] {
      FileLock lock(opt.ledger_path);
      auto s = Session::open(opt);
      json& p = s.product(product_id);
      const Identity producer = s.registry.require(p.at("producer").get<std::string>());
      const Identity provider = s.registry.require(p.at("provider").get<std::string>());
      UploadOptions uo;
      uo.steps = steps;
      uo.seed = gen_seed;
      const auto r = s.lifecycle->data_uploading(
          producer, provider, product_id, p.at("args").get<std::string>(),
          [](std::string_view a, std::uint64_t seed) { return mock_generator(a, seed); }, uo);
      p["txid_gen"] = r.txid_gen.hex();
      p["txid_upload"] = r.txid_upload.hex();
      p["metadata"] = to_json(r.metadata);
      p["product_hash"] = crypto::digest(r.product).hex();
      if (!product_out.empty()) write_file_atomic(product_out, to_string(r.product));
      s.save();
      out << "txid_gen: " << r.txid_gen.hex() << "\n";
      out << "txid_upload: " << r.txid_upload.hex() << "\n";
      out << "product_hash: " << crypto::digest(r.product).hex() << "\n";
    };
  });

  std::string owner_pk;
  auto* trade = app.add_subcommand("trade", "transfer ownership (Tx_exchange)");
  trade->add_option("--consumer", consumer_id)->required();
  trade->add_option("--product-id", product_id)->required();
  trade->add_option("--owner-pk", owner_pk, "hex key or identity id")->required();
  trade->callback([&] {
    action = [&] {
      FileLock lock(opt.ledger_path);
      auto s = Session::open(opt);
      const Identity consumer = s.registry.require(consumer_id);
      const Digest txid =
          s.lifecycle->copyright_trading(consumer, product_id, resolve_pk(s.registry, owner_pk));
      s.save();
      for (const auto& e : s.lifecycle->events()) err << "note: " << e << "\n";
      out << "txid_exchange: " << txid.hex() << "\n";
    };
  });

  std::string phi_path, varphi_path, candidate_path;
  bool as_json = false;
  auto* audit = app.add_subcommand("audit", "check producer and provider proofs");
  audit->add_option("--product-id", product_id)->required();
  audit->add_option("--phi", phi_path)->required();
  audit->add_option("--varphi", varphi_path)->required();
  audit->add_option("--candidate", candidate_path, "product file to compare");
  audit->add_option("--auditor", auditor_id, "default: first registered auditor");
  audit->add_flag("--json", as_json);
  audit->callback([&] {
    action = [&] {
      FileLock lock(opt.ledger_path);
      auto s = Session::open(opt);
      const Identity* auditor = nullptr;
      if (!auditor_id.empty()) {
        auditor = &s.registry.require(auditor_id);
      } else {
        for (const auto& id : s.registry.identities())
          if (id.role == Role::Auditor) {
            auditor = &id;
            break;
          }
        if (!auditor) throw Error(ErrorCode::NotAuditor, "no auditor registered");
      }
      const auto phi = producer_proof_from_json(parse_json_file(phi_path));
      const auto varphi = provider_proof_from_json(parse_json_file(varphi_path));
      std::optional<Bytes> candidate;
      if (!candidate_path.empty()) candidate = to_bytes(read_file(candidate_path));
      const Identity who = *auditor;
      const auto report = s.lifecycle->copyright_management(
          who, product_id, phi, varphi,
          candidate ? std::optional<ByteView>(ByteView(*candidate)) : std::nullopt);
      if (as_json) {
        out << to_json(report).dump() << "\n";
      } else {
        const auto& c = report.checks;
        const std::pair<const char*, bool> rows[] = {
            {"producer_sign", c.producer_sign_ok},   {"model_sign", c.model_sign_ok},
            {"txid_req", c.txid_req_ok},             {"txid_upload", c.txid_upload_ok},
            {"txid_gen", c.txid_gen_ok},             {"prompt_hash", c.prompt_hash_ok},
            {"candidate_product_hash", c.candidate_product_hash_ok},
        };
        for (const auto& [name, ok] : rows) out << name << ": " << (ok ? "ok" : "FAIL") << "\n";
        out << "verdict: " << verdict_name(report.verdict) << "\n";
      }
    };
  });

  std::string phi_out, varphi_out;
  auto* proofs = app.add_subcommand("proofs", "export the proof files for a product");
  proofs->add_option("--product-id", product_id)->required();
  proofs->add_option("--phi-out", phi_out)->required();
  proofs->add_option("--varphi-out", varphi_out)->required();
  proofs->callback([&] {
    action = [&] {
      FileLock lock(opt.ledger_path);
      auto s = Session::open(opt);
      write_file_atomic(phi_out, to_json(producer_proof(s, product_id)).dump(2) + "\n");
      write_file_atomic(varphi_out, to_json(provider_proof(s, product_id)).dump(2) + "\n");
      out << "wrote " << phi_out << " " << varphi_out << "\n";
    };
  });

  std::string txid_hex;
  auto* inspect = app.add_subcommand("inspect", "print a product record or a transaction");
  auto* pid_opt = inspect->add_option("--product-id", product_id);
  auto* txid_opt = inspect->add_option("--txid", txid_hex);
  pid_opt->excludes(txid_opt);
  inspect->require_option(1);
  inspect->callback([&] {
    action = [&] {
      FileLock lock(opt.ledger_path);
      const auto ledger = ledger::Ledger::load(opt.ledger_path);
      if (!txid_hex.empty()) {
        out << ledger::encode_transaction_json(ledger.get_transaction(parse_digest(txid_hex)))
            << "\n";
      } else {
        if (!ledger.has_product(product_id)) throw Error(ErrorCode::UnknownProduct, product_id);
        out << record_json(ledger.get_state(product_id)).dump() << "\n";
      }
    };
  });

  std::size_t total = 1000, trials = 5;
  std::string proportions_text = "0.1,0.3,0.5,0.7,0.9", bench_out = "bench.csv",
              placement_text = "both";
  auto* bench = app.add_subcommand("bench", "query benchmark and cost report");
  bench->add_option("--total", total)->capture_default_str();
  bench->add_option("--proportions", proportions_text)->capture_default_str();
  bench->add_option("--trials", trials)->capture_default_str();
  bench->add_option("--placement", placement_text)
      ->check(CLI::IsMember({"first", "last", "both"}))
      ->capture_default_str();
  bench->add_option("--out", bench_out)->capture_default_str();
  bench->callback([&] {
    action = [&] {
      tracing::BenchConfig cfg;
      cfg.total_tx = total;
      cfg.trials = trials;
      cfg.proportions = parse_proportions(proportions_text);
      cfg.params = {opt.m, opt.k};
      const fs::path base = bench_out;

      std::vector<std::pair<tracing::Placement, fs::path>> runs;
      if (placement_text != "last") runs.emplace_back(tracing::Placement::First, base);
      if (placement_text == "last") runs.emplace_back(tracing::Placement::Last, base);
      if (placement_text == "both")
        runs.emplace_back(tracing::Placement::Last, with_suffix(base, "-last"));

      std::vector<lifecycle::StageCost> costs;
      for (const auto& [placement, path] : runs) {
        cfg.placement = placement;
        auto report = tracing::run_benchmark(cfg);
        tracing::emit_csv(report.results, path);
        costs = report.costs;
        out << "placement " << tracing::placement_name(placement) << " -> " << path.string()
            << "\n"
            << tracing::results_csv(report.results);
      }
      const auto cost_path = with_suffix(base, "-cost");
      tracing::emit_cost_csv(costs, cost_path);
      out << "cost report -> " << cost_path.string() << "\n" << tracing::cost_csv(costs);
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "IoError: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace aigc::cli
