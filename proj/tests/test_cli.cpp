#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "aigc/cli.hpp"
#include "aigc/lifecycle.hpp"

using namespace aigc;
namespace fs = std::filesystem;

namespace {

const std::string kSeed = "000102030405060708090a0b0c0d0e0f";

struct Result {
  int code;
  std::string out, err;
};

struct Sandbox {
  fs::path dir;
  explicit Sandbox(const std::string& name)
      : dir(fs::temp_directory_path() / ("aigc-cli-test-" + name)) {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Sandbox() { fs::remove_all(dir); }

  std::string path(const std::string& f) const { return (dir / f).string(); }
  std::string ledger() const { return path("chain.ledger"); }

  Result run(std::vector<std::string> args, bool seeded = true) const {
    std::vector<std::string> full{"--ledger", ledger()};
    if (seeded) full.insert(full.end(), {"--rng-seed", kSeed});
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = cli::run_cli(full, out, err);
    return {code, out.str(), err.str()};
  }

  // init, four identities, one product through upload
  void setup(bool seeded = true) const {
    REQUIRE(run({"init"}, seeded).code == 0);
    for (const char* role : {"producer", "provider", "consumer", "auditor"})
      REQUIRE(run({"register", "--role", role}, seeded).code == 0);
    REQUIRE(run({"generate", "--producer", "producer-1", "--provider", "provider-1",
                 "--product-id", "art-1", "--model-id", "sd-mock", "--args", "a lighthouse"},
                seeded)
                .code == 0);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("init then register prints the identity") {
  Sandbox sb("register");
  CHECK(sb.run({"init"}).code == 0);
  CHECK(fs::exists(sb.ledger()));
  CHECK(fs::exists(sb.ledger() + ".keys.json"));
  const auto r = sb.run({"register", "--role", "producer"});
  CHECK(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j["role"] == "producer");
  CHECK(j["id"] == "producer-1");
  CHECK(j["pk"].get<std::string>().size() == 64);
  // key order is fixed
  CHECK(r.out.rfind("{\"id\":", 0) == 0);
}

TEST_CASE("domain and usage errors map to exit codes") {
  Sandbox sb("errors");
  CHECK(sb.run({"register", "--role", "producer"}).code == 1);
  CHECK(sb.run({"init"}).code == 0);
  const auto again = sb.run({"init"});
  CHECK(again.code == 1);
  CHECK(again.err.find("LedgerExists") != std::string::npos);
  CHECK(sb.run({"register"}).code == 2);
  CHECK(sb.run({"frobnicate"}).code == 2);
  CHECK(sb.run({}).code == 2);
  CHECK(sb.run({"--help"}).code == 0);
  const auto bad_role = sb.run({"register", "--role", "wizard"});
  CHECK(bad_role.code == 1);
  CHECK(bad_role.err.find("InvalidParams") != std::string::npos);
  const auto mismatch = sb.run({"register", "--role", "provider", "--node-class", "light"});
  CHECK(mismatch.code == 1);
  CHECK(mismatch.err.find("RoleClassMismatch") != std::string::npos);
  const auto who = sb.run({"generate", "--producer", "ghost", "--provider", "ghost",
                           "--product-id", "x", "--model-id", "m", "--args", "a"});
  CHECK(who.code == 1);
  CHECK(who.err.find("UnknownIdentity") != std::string::npos);
  CHECK(sb.run({"inspect"}).code == 2);
  CHECK(sb.run({"inspect", "--product-id", "a", "--txid", "00"}).code == 2);
  CHECK(sb.run({"--k", "99", "inspect", "--product-id", "a"}).code == 2);
}

TEST_CASE("full lifecycle audits consistent") {
  Sandbox sb("lifecycle");
  sb.setup();
  const auto up = sb.run({"upload", "--product-id", "art-1", "--out", sb.path("art.bin")});
  REQUIRE(up.code == 0);
  CHECK(up.out.find("txid_upload: ") != std::string::npos);
  CHECK(sb.run({"trade", "--consumer", "consumer-1", "--product-id", "art-1", "--owner-pk",
                "producer-1"})
            .code == 0);
  REQUIRE(sb.run({"proofs", "--product-id", "art-1", "--phi-out", sb.path("phi.json"),
                  "--varphi-out", sb.path("varphi.json")})
              .code == 0);
  const auto audit = sb.run({"audit", "--product-id", "art-1", "--phi", sb.path("phi.json"),
                             "--varphi", sb.path("varphi.json"), "--candidate",
                             sb.path("art.bin")});
  CHECK(audit.code == 0);
  CHECK(audit.out.find("verdict: Consistent") != std::string::npos);

  const auto as_json = sb.run({"audit", "--product-id", "art-1", "--phi", sb.path("phi.json"),
                               "--varphi", sb.path("varphi.json"), "--json"});
  CHECK(nlohmann::json::parse(as_json.out)["verdict"] == "Consistent");

  const auto record = nlohmann::json::parse(sb.run({"inspect", "--product-id", "art-1"}).out);
  CHECK(record["status"] == "Traded");
  CHECK(record["acl"].size() == 3);

  // a corrupted proof is reported, not rejected
  auto phi = nlohmann::json::parse(slurp(sb.path("phi.json")));
  phi["prompt"] = "a lighthouse at night";
  std::ofstream(sb.path("phi-bad.json")) << phi.dump();
  const auto bad = sb.run({"audit", "--product-id", "art-1", "--phi", sb.path("phi-bad.json"),
                           "--varphi", sb.path("varphi.json")});
  CHECK(bad.code == 0);
  CHECK(bad.out.find("prompt_hash: FAIL") != std::string::npos);
  CHECK(bad.out.find("verdict: Inconsistent") != std::string::npos);

  std::ofstream(sb.path("garbage.json")) << "{";
  CHECK(sb.run({"audit", "--product-id", "art-1", "--phi", sb.path("garbage.json"), "--varphi",
                sb.path("varphi.json")})
            .code == 1);
}

TEST_CASE("trade while generating is refused") {
  Sandbox sb("generating");
  sb.setup();
  // drive the product to Generating directly through the library
  auto ledger = ledger::Ledger::load(sb.ledger());
  const auto keys = nlohmann::json::parse(slurp(sb.ledger() + ".keys.json"));
  const auto registry = lifecycle::Registry::from_json(keys["identities"]);
  const auto& provider = registry.require("provider-1");
  const auto record = ledger.get_state("art-1");
  ledger.propose(lifecycle::txbuild::gen(
      provider.keypair, record, crypto::sign(provider.keypair.secret_key, as_bytes("m")),
      record.updated_at + 1, 424242));
  ledger.commit_block();
  ledger.save(sb.ledger());

  const auto r = sb.run({"trade", "--consumer", "consumer-1", "--product-id", "art-1",
                         "--owner-pk", "producer-1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("WrongStatus") != std::string::npos);
}

TEST_CASE("trade before upload is refused") {
  Sandbox sb("prepared");
  sb.setup();
  const auto r = sb.run({"trade", "--consumer", "consumer-1", "--product-id", "art-1",
                         "--owner-pk", "producer-1"});
  CHECK(r.code == 1);
  CHECK(r.err.rfind("WrongStatus", 0) == 0);
}

TEST_CASE("inspect leaves the ledger untouched") {
  Sandbox sb("inspect");
  sb.setup();
  const auto before = slurp(sb.ledger());
  const auto rec = sb.run({"inspect", "--product-id", "art-1"});
  CHECK(rec.code == 0);
  const auto txid = nlohmann::json::parse(slurp(sb.ledger()).substr(0, before.find('\n')))
                        ["transactions"][0]["txid"]
                            .get<std::string>();
  const auto tx = sb.run({"inspect", "--txid", txid});
  CHECK(tx.code == 0);
  CHECK(nlohmann::json::parse(tx.out)["tx_type"] == "Req");
  CHECK(sb.run({"inspect", "--txid", std::string(64, '0')}).code == 1);
  CHECK(sb.run({"inspect", "--product-id", "nope"}).code == 1);
  CHECK(slurp(sb.ledger()) == before);
}

TEST_CASE("tampered ledger file is refused") {
  Sandbox sb("tamper");
  sb.setup();
  auto text = slurp(sb.ledger());
  const auto pos = text.find("a lighthouse");
  REQUIRE(pos != std::string::npos);
  text[pos] = 'A';
  std::ofstream(sb.ledger(), std::ios::binary | std::ios::trunc) << text;
  const auto r = sb.run({"inspect", "--product-id", "art-1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("CorruptLedger") != std::string::npos);
}

TEST_CASE("seeded runs are byte identical") {
  std::string ledgers[2], keystores[2];
  for (int i = 0; i < 2; ++i) {
    Sandbox sb("determinism-" + std::to_string(i));
    sb.setup();
    REQUIRE(sb.run({"upload", "--product-id", "art-1"}).code == 0);
    REQUIRE(sb.run({"trade", "--consumer", "consumer-1", "--product-id", "art-1", "--owner-pk",
                    "producer-1"})
                .code == 0);
    ledgers[i] = slurp(sb.ledger());
    keystores[i] = slurp(sb.ledger() + ".keys.json");
  }
  CHECK(ledgers[0] == ledgers[1]);
  CHECK(keystores[0] == keystores[1]);
}

TEST_CASE("unseeded runs still work") {
  Sandbox sb("unseeded");
  sb.setup(false);
  CHECK(sb.run({"upload", "--product-id", "art-1"}, false).code == 0);
  CHECK(sb.run({"trade", "--consumer", "consumer-1", "--product-id", "art-1", "--owner-pk",
                "producer-1"},
               false)
            .code == 0);
}

TEST_CASE("bench writes csv files") {
  Sandbox sb("bench");
  const auto r = sb.run({"--m", "1000", "bench", "--total", "100", "--proportions", "0.2,0.6",
                         "--trials", "1", "--out", sb.path("q.csv")});
  REQUIRE(r.code == 0);
  CHECK(slurp(sb.path("q.csv")).rfind("strategy,proportion,trial_median_ns,probes,total_tx\n",
                                      0) == 0);
  CHECK(fs::exists(sb.path("q-last.csv")));
  CHECK(slurp(sb.path("q-cost.csv")).rfind("stage,tx_type,bytes_written\n", 0) == 0);
  CHECK(sb.run({"bench", "--proportions", "0.5,x"}).code == 1);
  CHECK(sb.run({"bench", "--placement", "middle"}).code == 2);
}
