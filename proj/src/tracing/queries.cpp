#include "aigc/error.hpp"
#include "aigc/tracing.hpp"

namespace aigc::tracing {

std::string_view strategy_name(Strategy s) noexcept {
  switch (s) {
    case Strategy::Normal: return "Normal";
    case Strategy::Fast: return "Fast";
    case Strategy::Ibft: return "Ibft";
  }
  return "?";
}

QueryResult normal_query(const ledger::Ledger& ledger, const std::string& product_id,
                         const Digest& txid) {
  QueryResult r;
  r.probes = ledger.visit_transactions([&](const ledger::Transaction& tx) {
    if (tx.txid == txid && tx.product_id == product_id) r.found = true;
    return !r.found;
  });
  return r;
}

FastIndex FastIndex::build(const ledger::Ledger& ledger, const std::string& product_id) {
  FastIndex index;
  index.product_id_ = product_id;
  index.generation_ = ledger.height();
  ledger.visit_transactions([&](const ledger::Transaction& tx) {
    if (tx.product_id == product_id) index.txids_.push_back(tx.txid);
    return true;
  });
  return index;
}

QueryResult fast_query(const FastIndex& index, const ledger::Ledger& ledger, const Digest& txid) {
  if (index.generation() != ledger.height())
    throw Error(ErrorCode::StaleIndex, "index built at height " +
                                           std::to_string(index.generation()) + ", ledger at " +
                                           std::to_string(ledger.height()));
  QueryResult r;
  for (const auto& id : index.txids()) {
    ++r.probes;
    if (id == txid) {
      r.found = true;
      break;
    }
  }
  return r;
}

QueryResult ibft_query(const ledger::Ledger& ledger, const std::string& product_id,
                       const Digest& txid) {
  if (!ledger.has_product(product_id)) throw Error(ErrorCode::UnknownProduct, product_id);
  const auto record = ledger.get_state(product_id);
  const auto tx = ledger.find_transaction(txid);
  if (!tx) return {};
  const auto filter = ibf::Filter::deserialize(record.bf);
  const auto check = filter.probe(ibf::encode_member(tx->args, tx->create_time));
  return {check.member, check.probes};
}

}  // namespace aigc::tracing
