#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "aigc/error.hpp"
#include "aigc/tracing.hpp"

namespace aigc::tracing {

using ledger::Ledger;
using ledger::Status;
using lifecycle::SeedSource;
namespace txbuild = lifecycle::txbuild;

namespace {

constexpr std::size_t kBlockSize = 100;
constexpr std::size_t kDummies = 2;
constexpr std::size_t kConsumers = 3;
constexpr std::int64_t kBaseTime = 1700000000000;

crypto::KeyPair key_for(const SeedSource& seeds, const std::string& label) {
  const Bytes seed = seeds.derive("bench-key/" + label);
  return crypto::keygen(ByteView(seed));
}

// Walks one product through Req, Gen, Upload, then Exchanges.
struct ProductDriver {
  std::string product_id;
  std::size_t step = 0;

  ledger::Transaction next(const Ledger& ledger, const SeedSource& seeds,
                           const crypto::KeyPair& producer, const crypto::KeyPair& provider,
                           const std::vector<crypto::KeyPair>& consumers,
                           const ibf::Params& params, std::int64_t t, std::uint64_t nonce) {
    const std::size_t s = step++;
    if (s == 0) {
      return txbuild::req(producer, provider.public_key, product_id, "prompt for " + product_id,
                          "bench-model", t, nonce, seeds.derive("ibf/" + product_id), params);
    }
    const auto record = ledger.projected_state(product_id);
    if (s == 1) {
      const crypto::Signature model_sign = crypto::sign(provider.secret_key, as_bytes(product_id));
      return txbuild::gen(provider, *record, model_sign, t, nonce);
    }
    if (s == 2) {
      return txbuild::upload(producer, *record, crypto::digest(as_bytes(product_id)), t, nonce);
    }
    return txbuild::exchange(consumers[(s - 3) % consumers.size()], *record, t, nonce);
  }
};

std::int64_t median(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  out << text;
  if (!out.flush()) throw Error(ErrorCode::IoError, "cannot write " + path.string());
}

std::string format_proportion(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

}  // namespace

std::string_view placement_name(Placement p) noexcept {
  return p == Placement::First ? "first" : "last";
}

SyntheticChain build_chain(std::size_t total_tx, std::size_t product_tx, const ibf::Params& params,
                           std::uint64_t seed) {
  if (product_tx == 0 || product_tx > total_tx)
    throw Error(ErrorCode::InvalidParams, "need 1 <= product_tx <= total_tx");
  const std::size_t filler = total_tx - product_tx;
  if (filler > 0 && filler < 3 * kDummies)
    throw Error(ErrorCode::InvalidParams, "filler too small for dummy setup");

  Bytes master;
  put_be64(master, seed);
  const auto root = crypto::digest(master);
  const SeedSource seeds(Bytes(root.bytes.begin(), root.bytes.end()));
  const auto producer = key_for(seeds, "producer");
  const auto provider = key_for(seeds, "provider");
  std::vector<crypto::KeyPair> consumers;
  for (std::size_t i = 0; i < kConsumers; ++i)
    consumers.push_back(key_for(seeds, "consumer-" + std::to_string(i)));

  SyntheticChain chain;
  chain.product_id = "product-target";
  ProductDriver target{chain.product_id};
  std::vector<ProductDriver> dummies;
  for (std::size_t i = 0; i < kDummies; ++i) dummies.push_back({"product-dummy-" + std::to_string(i)});

  // target positions: floor(j * total / product_tx)
  std::vector<bool> is_target(total_tx, false);
  for (std::size_t j = 0; j < product_tx; ++j) is_target[j * total_tx / product_tx] = true;

  std::size_t filler_seen = 0;
  for (std::size_t slot = 0; slot < total_tx; ++slot) {
    const std::int64_t t = kBaseTime + static_cast<std::int64_t>(slot);
    const std::uint64_t nonce = slot + 1;
    ledger::Transaction tx;
    if (is_target[slot]) {
      tx = target.next(chain.ledger, seeds, producer, provider, consumers, params, t, nonce);
    } else {
      // dummy setup first (all of dummy 0, then dummy 1), then round robin
      const std::size_t f = filler_seen++;
      auto& d = f < 3 * kDummies ? dummies[f / 3] : dummies[f % kDummies];
      tx = d.next(chain.ledger, seeds, producer, provider, consumers, params, t, nonce);
    }
    const Digest txid = chain.ledger.propose(std::move(tx)).txid;
    if (is_target[slot]) chain.product_txids.push_back(txid);
    if ((slot + 1) % kBlockSize == 0) chain.ledger.commit_block();
  }
  chain.ledger.commit_block();
  return chain;
}

BenchReport run_benchmark(const BenchConfig& config) {
  if (config.total_tx < 10) throw Error(ErrorCode::InvalidParams, "total_tx must be >= 10");
  if (config.trials == 0) throw Error(ErrorCode::InvalidParams, "trials must be >= 1");
  for (double p : config.proportions)
    if (!(p > 0.0 && p <= 1.0))
      throw Error(ErrorCode::InvalidParams, "proportion outside (0, 1]: " + std::to_string(p));

  using clock = std::chrono::steady_clock;
  BenchReport report;
  for (double p : config.proportions) {
    const auto product_tx = std::clamp<std::size_t>(
        static_cast<std::size_t>(std::llround(p * static_cast<double>(config.total_tx))), 1,
        config.total_tx);
    auto chain = build_chain(config.total_tx, product_tx, config.params);
    const Digest target = config.placement == Placement::First ? chain.product_txids.front()
                                                               : chain.product_txids.back();
    const auto index = FastIndex::build(chain.ledger, chain.product_id);

    auto measure = [&](Strategy s, auto&& query) {
      std::vector<std::int64_t> samples;
      QueryResult r;
      for (std::size_t i = 0; i < config.trials; ++i) {
        const auto start = clock::now();
        r = query();
        samples.push_back(
            std::chrono::duration_cast<std::chrono::nanoseconds>(clock::now() - start).count());
      }
      report.results.push_back({s, p, median(samples), r.probes, config.total_tx, r.found});
    };
    measure(Strategy::Normal, [&] { return normal_query(chain.ledger, chain.product_id, target); });
    measure(Strategy::Fast, [&] { return fast_query(index, chain.ledger, target); });
    measure(Strategy::Ibft, [&] { return ibft_query(chain.ledger, chain.product_id, target); });
  }
  std::stable_sort(report.results.begin(), report.results.end(),
                   [](const BenchResult& a, const BenchResult& b) {
                     return std::pair(a.strategy, a.proportion) < std::pair(b.strategy, b.proportion);
                   });
  report.costs = lifecycle_cost_report(config.params);
  return report;
}

std::vector<lifecycle::StageCost> lifecycle_cost_report(const ibf::Params& params) {
  using namespace lifecycle;
  Ledger ledger;
  Registry registry;
  const SeedSource seeds(to_bytes("lifecycle-cost-report"));
  LogicalClock clock(kBaseTime);
  Lifecycle lc(ledger, registry, seeds, clock, params);

  const Identity producer = lc.register_identity(Role::Producer, NodeClass::Light);
  const Identity provider = lc.register_identity(Role::Provider, NodeClass::Full);
  const Identity consumer = lc.register_identity(Role::Consumer, NodeClass::Light);
  const Identity auditor = lc.register_identity(Role::Auditor, NodeClass::Full);

  const std::string pid = "product-1";
  const std::string args = "a watercolor fox";
  const Digest txid_req = lc.content_generation(producer, provider, args, pid, "model-1");
  const auto up = lc.data_uploading(producer, provider, pid, args,
                                    [](std::string_view a, std::uint64_t s) { return mock_generator(a, s); });
  lc.copyright_trading(consumer, pid, producer.pk());
  lc.copyright_management(auditor, pid, {producer.pk(), txid_req, up.txid_upload, args},
                          {provider.pk(), up.txid_gen, up.metadata}, ByteView(up.product));

  // one registration row for all identities
  std::vector<StageCost> out;
  for (const auto& c : lc.costs()) {
    if (c.stage == "registration" && !out.empty() && out.back().stage == "registration") continue;
    out.push_back(c);
  }
  return out;
}

std::string results_csv(const std::vector<BenchResult>& results) {
  auto sorted = results;
  std::stable_sort(sorted.begin(), sorted.end(), [](const BenchResult& a, const BenchResult& b) {
    return std::pair(a.strategy, a.proportion) < std::pair(b.strategy, b.proportion);
  });
  std::ostringstream out;
  out << "strategy,proportion,trial_median_ns,probes,total_tx\n";
  for (const auto& r : sorted)
    out << strategy_name(r.strategy) << ',' << format_proportion(r.proportion) << ','
        << r.median_ns << ',' << r.probes << ',' << r.total_tx << '\n';
  return out.str();
}

std::string cost_csv(const std::vector<lifecycle::StageCost>& costs) {
  std::ostringstream out;
  out << "stage,tx_type,bytes_written\n";
  for (const auto& c : costs) out << c.stage << ',' << c.tx_type << ',' << c.bytes_written << '\n';
  return out.str();
}

void emit_csv(const std::vector<BenchResult>& results, const std::filesystem::path& path) {
  write_file(path, results_csv(results));
}

void emit_cost_csv(const std::vector<lifecycle::StageCost>& costs,
                   const std::filesystem::path& path) {
  write_file(path, cost_csv(costs));
}

}  // namespace aigc::tracing
