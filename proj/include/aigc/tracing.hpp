#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "aigc/ibf.hpp"
#include "aigc/ledger.hpp"
#include "aigc/lifecycle.hpp"

namespace aigc::tracing {

using crypto::Digest;

enum class Strategy { Normal, Fast, Ibft };
std::string_view strategy_name(Strategy s) noexcept;

struct QueryResult {
  bool found = false;
  std::size_t probes = 0;
};

/// Full scan in chain order, stopping at the match.
QueryResult normal_query(const ledger::Ledger& ledger, const std::string& product_id,
                         const Digest& txid);

// Local per-product list of txids in chain order.
class FastIndex {
 public:
  static FastIndex build(const ledger::Ledger& ledger, const std::string& product_id);

  const std::string& product_id() const noexcept { return product_id_; }
  const std::vector<Digest>& txids() const noexcept { return txids_; }
  /// Ledger height the index was built at.
  std::uint64_t generation() const noexcept { return generation_; }

 private:
  std::string product_id_;
  std::vector<Digest> txids_;
  std::uint64_t generation_ = 0;
};

/// Walks the product list. Throws StaleIndex if the ledger has grown since
/// the index was built.
QueryResult fast_query(const FastIndex& index, const ledger::Ledger& ledger, const Digest& txid);

/// One world-state read, one transaction lookup, one filter check. Probes
/// are filter twins read (0 when the txid is not on chain). Throws
/// UnknownProduct.
QueryResult ibft_query(const ledger::Ledger& ledger, const std::string& product_id,
                       const Digest& txid);

// Synthetic chain: `total_tx` committed transactions, `product_tx` of which
// belong to `product_id`, spread at evenly spaced positions starting at 0.
// The rest are filler (two dummy products set up, then Exchange traffic),
// committed in blocks of 100.
struct SyntheticChain {
  ledger::Ledger ledger;
  std::string product_id;
  std::vector<Digest> product_txids;  // chain order
};

/// Throws InvalidParams unless 1 <= product_tx <= total_tx and the filler
/// has room for the dummy setup when needed.
SyntheticChain build_chain(std::size_t total_tx, std::size_t product_tx,
                           const ibf::Params& params = {}, std::uint64_t seed = 1);

enum class Placement { First, Last };
std::string_view placement_name(Placement p) noexcept;

struct BenchConfig {
  std::size_t total_tx = 1000;
  std::vector<double> proportions = {0.1, 0.3, 0.5, 0.7, 0.9};
  std::size_t trials = 5;
  Placement placement = Placement::First;
  ibf::Params params;
};

struct BenchResult {
  Strategy strategy = Strategy::Normal;
  double proportion = 0;
  std::int64_t median_ns = 0;
  std::size_t probes = 0;
  std::size_t total_tx = 0;
  bool found = false;
};

struct BenchReport {
  std::vector<BenchResult> results;
  std::vector<lifecycle::StageCost> costs;
};

/// Throws InvalidParams (total_tx < 10, proportions outside (0, 1], no trials).
BenchReport run_benchmark(const BenchConfig& config);

/// Write-set bytes per stage from one honest deterministic lifecycle run.
std::vector<lifecycle::StageCost> lifecycle_cost_report(const ibf::Params& params = {});

/// strategy,proportion,trial_median_ns,probes,total_tx, rows sorted by
/// (strategy, proportion).
std::string results_csv(const std::vector<BenchResult>& results);
std::string cost_csv(const std::vector<lifecycle::StageCost>& costs);
/// Throw IoError.
void emit_csv(const std::vector<BenchResult>& results, const std::filesystem::path& path);
void emit_cost_csv(const std::vector<lifecycle::StageCost>& costs,
                   const std::filesystem::path& path);

}  // namespace aigc::tracing
