#include "cubesettle/ledger.hpp"

#include <cmath>
#include <ostream>

#include "cubesettle/units.hpp"

namespace cubesettle {

const char* gas_mode_name(GasMode mode) {
  return mode == GasMode::Plain ? "plain" : "oraclize";
}

GasSchedule GasSchedule::plain() {
  return GasSchedule{GasMode::Plain, 175000, 41000, 23000, 21000};
}

GasSchedule GasSchedule::oraclize() {
  return GasSchedule{GasMode::Oraclize, 2061490, 120000, 70000, 21000};
}

GasSchedule GasSchedule::for_mode(GasMode mode) {
  return mode == GasMode::Plain ? plain() : oraclize();
}

const char* tx_kind_name(TxKind kind) {
  switch (kind) {
    case TxKind::Deploy: return "deploy";
    case TxKind::Update: return "update";
    case TxKind::Callback: return "callback";
    case TxKind::Transfer: return "transfer";
  }
  return "unknown";
}

double validation_latency(double gas_price_gwei) {
  if (gas_price_gwei <= 0.0) {
    throw Error(Errc::NonPositiveGasPrice, "gas price must be positive");
  }
  constexpr double kLowGwei = 0.9, kLowSeconds = 120.0;
  constexpr double kHighGwei = 20.0, kHighSeconds = 14.0;
  if (gas_price_gwei <= kLowGwei) return kLowSeconds;
  if (gas_price_gwei >= kHighGwei) return kHighSeconds;
  double t = (std::log(gas_price_gwei) - std::log(kLowGwei)) /
             (std::log(kHighGwei) - std::log(kLowGwei));
  return kLowSeconds + (kHighSeconds - kLowSeconds) * t;
}

double gas_cost_ether(Gas gas_used, double gas_price_gwei) {
  if (gas_price_gwei < 0.0) {
    throw Error(Errc::NonPositiveGasPrice, "gas price must be non-negative");
  }
  return static_cast<double>(gas_used) * gas_price_gwei * 1e-9;
}

double ether_to_usd(double ether, double rate_usd_per_eth) {
  if (rate_usd_per_eth <= 0.0) {
    throw Error(Errc::ValidationFailed, "exchange rate must be positive");
  }
  return ether * rate_usd_per_eth;
}

Ledger::Ledger(GasMode mode) : schedule_(GasSchedule::for_mode(mode)) {}

AccountId Ledger::create_account(const ParticipantId& owner, Wei initial) {
  std::lock_guard lock(mu_);
  if (by_owner_.count(owner) != 0) {
    throw Error(Errc::DuplicateOwner, to_string(owner) + " already has an account");
  }
  AccountId id = next_account_++;
  accounts_[id] = Account{id, owner, initial};
  by_owner_[owner] = id;
  return id;
}

std::optional<AccountId> Ledger::account_of(const ParticipantId& owner) const {
  std::lock_guard lock(mu_);
  auto it = by_owner_.find(owner);
  if (it == by_owner_.end()) return std::nullopt;
  return it->second;
}

Wei Ledger::balance(AccountId account) const {
  std::lock_guard lock(mu_);
  auto it = accounts_.find(account);
  if (it == accounts_.end()) {
    throw Error(Errc::UnknownParticipant, "no such account " + std::to_string(account));
  }
  return it->second.balance;
}

Wei Ledger::miner_pool() const {
  std::lock_guard lock(mu_);
  return miner_pool_;
}

std::vector<Account> Ledger::accounts_snapshot() const {
  std::lock_guard lock(mu_);
  std::vector<Account> out;
  out.reserve(accounts_.size());
  for (const auto& [id, account] : accounts_) out.push_back(account);
  return out;
}

std::pair<ContractId, TxReceipt> Ledger::deploy_contract(Wei gas_price, AccountId payer) {
  std::lock_guard lock(mu_);
  TxReceipt receipt =
      apply_locked(TxKind::Deploy, schedule_.deployment, gas_price, payer, std::nullopt, 0);
  return {next_contract_++, receipt};
}

TxReceipt Ledger::submit_tx(TxKind kind, Wei gas_price, AccountId payer,
                            std::optional<AccountId> recipient, Wei amount) {
  if (kind == TxKind::Deploy) {
    throw Error(Errc::ValidationFailed, "use deploy_contract for deployments");
  }
  Gas gas = 0;
  switch (kind) {
    case TxKind::Update: gas = schedule_.update; break;
    case TxKind::Callback: gas = schedule_.callback; break;
    case TxKind::Transfer: gas = schedule_.transfer; break;
    case TxKind::Deploy: break;
  }
  if (kind == TxKind::Transfer && !recipient.has_value()) {
    throw Error(Errc::ValidationFailed, "transfer needs a recipient");
  }
  std::lock_guard lock(mu_);
  return apply_locked(kind, gas, gas_price, payer, recipient, amount);
}

// All-or-nothing: validate everything, then mutate. A throw leaves balances,
// the miner pool and the receipt counter untouched.
TxReceipt Ledger::apply_locked(TxKind kind, Gas gas_used, Wei gas_price, AccountId payer,
                               std::optional<AccountId> recipient, Wei amount) {
  auto payer_it = accounts_.find(payer);
  if (payer_it == accounts_.end()) {
    throw Error(Errc::UnknownParticipant, "no such account " + std::to_string(payer));
  }
  auto recipient_it = accounts_.end();
  if (recipient.has_value()) {
    recipient_it = accounts_.find(*recipient);
    if (recipient_it == accounts_.end()) {
      throw Error(Errc::UnknownParticipant, "no such account " + std::to_string(*recipient));
    }
  }

  Wei fee = checked_mul(gas_used, gas_price);
  Wei debit = checked_add(fee, amount);
  if (payer_it->second.balance < debit) {
    throw Error(Errc::InsufficientFunds,
                tx_kind_name(kind) + std::string(" needs ") + std::to_string(debit) +
                    " wei but account " + std::to_string(payer) + " holds " +
                    std::to_string(payer_it->second.balance));
  }

  payer_it->second.balance -= debit;
  miner_pool_ = checked_add(miner_pool_, fee);
  if (recipient.has_value()) {
    recipient_it->second.balance = checked_add(recipient_it->second.balance, amount);
  }

  TxReceipt receipt;
  receipt.id = next_tx_++;
  receipt.kind = kind;
  receipt.gas_used = gas_used;
  receipt.gas_price = gas_price;
  receipt.fee = fee;
  receipt.latency_s = gas_price > 0 ? validation_latency(wei_to_gwei(gas_price)) : 0.0;
  receipt.payer = payer;
  receipt.recipient = recipient;
  receipt.amount = amount;
  receipts_.push_back(receipt);
  return receipt;
}

std::vector<TxReceipt> Ledger::receipts_snapshot() const {
  std::lock_guard lock(mu_);
  return receipts_;
}

void Ledger::export_receipts_csv(std::ostream& out) const {
  std::lock_guard lock(mu_);
  out << "tx_id,kind,gas_used,gas_price_wei,fee_wei,payer,latency_s\n";
  for (const auto& r : receipts_) {
    char latency[32];
    std::snprintf(latency, sizeof(latency), "%.6g", r.latency_s);
    out << r.id << ',' << tx_kind_name(r.kind) << ',' << r.gas_used << ',' << r.gas_price << ','
        << r.fee << ',' << r.payer << ',' << latency << '\n';
  }
}

}  // namespace cubesettle
