#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "cubesettle/model.hpp"

namespace cubesettle {

// Plain: each party acts as its own oracle and embeds its cube in a
// transaction. Oraclize: a paid proxy sources the cubes, with a much
// heavier gas footprint.
enum class GasMode { Plain, Oraclize };

const char* gas_mode_name(GasMode mode);

struct GasSchedule {
  GasMode mode{};
  Gas deployment{};
  Gas update{};
  Gas callback{};
  Gas transfer{};

  static GasSchedule plain();     // 175000 / 41000 / 23000 / 21000
  static GasSchedule oraclize();  // 2061490 / 120000 / 70000 / 21000
  static GasSchedule for_mode(GasMode mode);
  bool operator==(const GasSchedule&) const = default;
};

using AccountId = std::uint64_t;
using TxId = std::uint64_t;
using ContractId = std::uint64_t;

struct Account {
  AccountId id{};
  ParticipantId owner;
  Wei balance{};
};

enum class TxKind { Deploy, Update, Callback, Transfer };

const char* tx_kind_name(TxKind kind);

struct TxReceipt {
  TxId id{};
  TxKind kind{};
  Gas gas_used{};
  Wei gas_price{};  // wei per gas
  Wei fee{};        // gas_used * gas_price, exact
  double latency_s{};
  AccountId payer{};
  std::optional<AccountId> recipient;  // Transfer only
  Wei amount{};                        // Transfer only
};

// Anchored at (0.9 Gwei -> 120 s) and (20 Gwei -> 14 s); log-linear in the
// gas price between the anchors, clamped to the nearer anchor outside.
// Throws Errc::NonPositiveGasPrice for gas_price_gwei <= 0.
double validation_latency(double gas_price_gwei);

double gas_cost_ether(Gas gas_used, double gas_price_gwei);
double ether_to_usd(double ether, double rate_usd_per_eth);

// Simulated chain: accounts, a miner fee pool, and per-operation gas
// accounting. Transactions apply immediately; the latency figure on each
// receipt is reporting metadata, not a scheduler.
class Ledger {
 public:
  explicit Ledger(GasMode mode);

  AccountId create_account(const ParticipantId& owner, Wei initial);
  std::optional<AccountId> account_of(const ParticipantId& owner) const;
  Wei balance(AccountId account) const;
  Wei miner_pool() const;
  std::vector<Account> accounts_snapshot() const;

  std::pair<ContractId, TxReceipt> deploy_contract(Wei gas_price, AccountId payer);

  // Update/Callback/Transfer. A transfer moves `amount` from payer to
  // recipient on top of the gas fee; everything is debited atomically or
  // not at all.
  TxReceipt submit_tx(TxKind kind, Wei gas_price, AccountId payer,
                      std::optional<AccountId> recipient = std::nullopt, Wei amount = 0);

  std::vector<TxReceipt> receipts_snapshot() const;
  const GasSchedule& schedule() const { return schedule_; }

  // CSV with header `tx_id,kind,gas_used,gas_price_wei,fee_wei,payer,latency_s`.
  void export_receipts_csv(std::ostream& out) const;

 private:
  TxReceipt apply_locked(TxKind kind, Gas gas_used, Wei gas_price, AccountId payer,
                         std::optional<AccountId> recipient, Wei amount);

  mutable std::mutex mu_;
  GasSchedule schedule_;
  std::map<AccountId, Account> accounts_;
  std::map<ParticipantId, AccountId> by_owner_;
  std::vector<TxReceipt> receipts_;
  Wei miner_pool_ = 0;
  TxId next_tx_ = 1;
  AccountId next_account_ = 1;
  ContractId next_contract_ = 1;
};

}  // namespace cubesettle
