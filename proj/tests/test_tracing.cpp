#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "aigc/error.hpp"
#include "aigc/tracing.hpp"

using namespace aigc;
using namespace aigc::tracing;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::IoError;
}

Digest random_digest(std::mt19937_64& rng) {
  Digest d;
  for (auto& b : d.bytes) b = static_cast<std::uint8_t>(rng());
  return d;
}

std::size_t position_of(const ledger::Ledger& l, const Digest& txid) {
  std::size_t pos = 0, found = 0;
  l.visit_transactions([&](const ledger::Transaction& tx) {
    ++pos;
    if (tx.txid == txid) found = pos;
    return found == 0;
  });
  return found;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("synthetic chain layout") {
  auto chain = build_chain(200, 20, {1000, 7});
  CHECK(chain.ledger.transaction_count() == 200);
  CHECK(chain.ledger.height() == 2);
  REQUIRE(chain.product_txids.size() == 20);
  CHECK(position_of(chain.ledger, chain.product_txids.front()) == 1);
  for (std::size_t j = 0; j < 20; ++j)
    CHECK(position_of(chain.ledger, chain.product_txids[j]) == j * 10 + 1);
  CHECK(chain.ledger.get_state(chain.product_id).status == ledger::Status::Traded);
  CHECK(chain.ledger.verify_chain());
  CHECK(chain.ledger.world_state().size() == 3);

  CHECK(build_chain(5, 5).ledger.transaction_count() == 5);
  CHECK(code_of([] { build_chain(10, 0); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { build_chain(10, 11); }) == ErrorCode::InvalidParams);
  CHECK(code_of([] { build_chain(10, 7); }) == ErrorCode::InvalidParams);
}

TEST_CASE("normal query scans until the match") {
  ledger::Ledger empty;
  std::mt19937_64 rng(1);
  const auto none = normal_query(empty, "p", random_digest(rng));
  CHECK_FALSE(none.found);
  CHECK(none.probes == 0);

  auto chain = build_chain(300, 30, {1000, 7});
  for (const auto& txid : chain.product_txids) {
    const auto r = normal_query(chain.ledger, chain.product_id, txid);
    CHECK(r.found);
    CHECK(r.probes == position_of(chain.ledger, txid));
  }
  const auto absent = normal_query(chain.ledger, chain.product_id, random_digest(rng));
  CHECK_FALSE(absent.found);
  CHECK(absent.probes == 300);
  // right txid, wrong product
  CHECK_FALSE(normal_query(chain.ledger, "product-dummy-0", chain.product_txids[3]).found);
}

TEST_CASE("fast index is the filtered scan") {
  auto chain = build_chain(300, 45, {1000, 7});
  for (const std::string& pid : {chain.product_id, std::string("product-dummy-1"),
                                std::string("missing")}) {
    const auto index = FastIndex::build(chain.ledger, pid);
    std::vector<Digest> expected;
    for (const auto& tx :
         chain.ledger.scan_transactions([&](const auto& tx) { return tx.product_id == pid; }))
      expected.push_back(tx.txid);
    CHECK(index.txids() == expected);
    CHECK(index.generation() == chain.ledger.height());
  }
}

TEST_CASE("fast query probes list positions and detects staleness") {
  auto chain = build_chain(100, 10, {1000, 7});
  const auto index = FastIndex::build(chain.ledger, chain.product_id);
  for (std::size_t i = 0; i < chain.product_txids.size(); ++i) {
    const auto r = fast_query(index, chain.ledger, chain.product_txids[i]);
    CHECK(r.found);
    CHECK(r.probes == i + 1);
  }
  std::mt19937_64 rng(2);
  const auto miss = fast_query(index, chain.ledger, random_digest(rng));
  CHECK_FALSE(miss.found);
  CHECK(miss.probes == 10);

  // grow the ledger: the index must be rebuilt
  auto record = *chain.ledger.projected_state(chain.product_id);
  const auto buyer = crypto::keygen();
  chain.ledger.propose(lifecycle::txbuild::exchange(buyer, record, record.updated_at + 1000, 1));
  chain.ledger.commit_block();
  CHECK(code_of([&] { fast_query(index, chain.ledger, chain.product_txids[0]); }) ==
        ErrorCode::StaleIndex);
  const auto rebuilt = FastIndex::build(chain.ledger, chain.product_id);
  CHECK(rebuilt.txids().size() == 11);
}

TEST_CASE("ibft query is constant in probes") {
  auto chain = build_chain(200, 20);
  for (const auto& txid : chain.product_txids) {
    const auto r = ibft_query(chain.ledger, chain.product_id, txid);
    CHECK(r.found);
    CHECK(r.probes == 7);
  }
  std::mt19937_64 rng(3);
  const auto absent = ibft_query(chain.ledger, chain.product_id, random_digest(rng));
  CHECK_FALSE(absent.found);
  CHECK(absent.probes == 0);
  CHECK(code_of([&] { ibft_query(chain.ledger, "nope", chain.product_txids[0]); }) ==
        ErrorCode::UnknownProduct);
}

TEST_CASE("strategies agree") {
  auto chain = build_chain(400, 100, {10000, 7});
  const auto index = FastIndex::build(chain.ledger, chain.product_id);
  const std::set<Digest> mine(chain.product_txids.begin(), chain.product_txids.end());
  int others = 0, ibft_fp = 0;
  chain.ledger.visit_transactions([&](const ledger::Transaction& tx) {
    const bool member = mine.count(tx.txid) > 0;
    CHECK(normal_query(chain.ledger, chain.product_id, tx.txid).found == member);
    CHECK(fast_query(index, chain.ledger, tx.txid).found == member);
    const bool ib = ibft_query(chain.ledger, chain.product_id, tx.txid).found;
    if (member) {
      CHECK(ib);
    } else {
      ++others;
      ibft_fp += ib;
    }
    return true;
  });
  CHECK(others == 300);
  CHECK(ibft_fp <= 9);
}

TEST_CASE("benchmark shape") {
  BenchConfig cfg;
  cfg.total_tx = 200;
  cfg.trials = 3;
  cfg.params = {1000, 7};
  for (auto placement : {Placement::First, Placement::Last}) {
    cfg.placement = placement;
    const auto report = run_benchmark(cfg);
    REQUIRE(report.results.size() == 15);
    std::vector<std::size_t> normal, fast, ibft;
    for (const auto& r : report.results) {
      CHECK(r.found);
      CHECK(r.total_tx == 200);
      if (r.strategy == Strategy::Normal) normal.push_back(r.probes);
      if (r.strategy == Strategy::Fast) fast.push_back(r.probes);
      if (r.strategy == Strategy::Ibft) ibft.push_back(r.probes);
    }
    for (auto p : ibft) CHECK(p == 7);
    if (placement == Placement::First) {
      for (auto p : normal) CHECK(p == 1);
      for (auto p : fast) CHECK(p == 1);
    } else {
      for (std::size_t i = 1; i < fast.size(); ++i) CHECK(fast[i] > fast[i - 1]);
      CHECK(fast.front() == 20);
      for (auto p : normal) CHECK(p > 180);
    }
    CHECK(report.costs.size() == 6);
  }
  BenchConfig bad = cfg;
  bad.total_tx = 9;
  CHECK(code_of([&] { run_benchmark(bad); }) == ErrorCode::InvalidParams);
  bad = cfg;
  bad.proportions = {0.0};
  CHECK(code_of([&] { run_benchmark(bad); }) == ErrorCode::InvalidParams);
  bad.proportions = {1.5};
  CHECK(code_of([&] { run_benchmark(bad); }) == ErrorCode::InvalidParams);
  bad = cfg;
  bad.trials = 0;
  CHECK(code_of([&] { run_benchmark(bad); }) == ErrorCode::InvalidParams);
}

TEST_CASE("cost report puts the request on top") {
  const auto costs = lifecycle_cost_report();
  std::map<std::string, std::size_t> by_type;
  for (const auto& c : costs)
    if (c.tx_type != "None") by_type[c.tx_type] = c.bytes_written;
  REQUIRE(by_type.size() == 4);
  for (const char* t : {"Gen", "Upload", "Exchange"}) CHECK(by_type["Req"] > by_type[t]);
  CHECK(costs.front().stage == "registration");
  CHECK(cost_csv(costs).rfind("stage,tx_type,bytes_written\n", 0) == 0);
}

TEST_CASE("csv output") {
  CHECK(results_csv({}) == "strategy,proportion,trial_median_ns,probes,total_tx\n");
  std::vector<BenchResult> rows;
  for (auto s : {Strategy::Ibft, Strategy::Normal, Strategy::Fast})
    for (double p : {0.9, 0.1, 0.5}) rows.push_back({s, p, 100, 7, 1000, true});
  const auto csv = results_csv(rows);
  std::istringstream lines(csv);
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 10);
  CHECK(all[1] == "Normal,0.10,100,7,1000");
  CHECK(all[3] == "Normal,0.90,100,7,1000");
  CHECK(all[4].rfind("Fast,0.10", 0) == 0);
  CHECK(all[9].rfind("Ibft,0.90", 0) == 0);

  const auto path = fs::temp_directory_path() / "aigc-tracing-test.csv";
  emit_csv(rows, path);
  const auto first = slurp(path);
  emit_csv(rows, path);
  CHECK(slurp(path) == first);
  CHECK(first == csv);
  fs::remove(path);
  CHECK(code_of([&] { emit_csv(rows, "/nonexistent-dir/x.csv"); }) == ErrorCode::IoError);
  CHECK(strategy_name(Strategy::Ibft) == "Ibft");
  CHECK(placement_name(Placement::Last) == "last");
}
