#include "rbresale/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rbresale {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Buyer: return "buyer";
    case Role::Seller: return "seller";
    case Role::None: break;
  }
  return "none";
}

std::string_view to_string(AuctionStatus s) {
  switch (s) {
    case AuctionStatus::Converged: return "converged";
    case AuctionStatus::NotConverged: return "not_converged";
    case AuctionStatus::PriceCollapsed: return "price_collapsed";
    case AuctionStatus::MarketClosed: break;
  }
  return "market_closed";
}

double willingness(const TradeUtility& u) { return u.slope(0.0); }

RoleAssignment assign_roles(std::span<const double> willingness) {
  RoleAssignment out;
  if (willingness.empty()) return out;
  out.mean_willingness =
      std::accumulate(willingness.begin(), willingness.end(), 0.0) / static_cast<double>(willingness.size());
  for (int i = 0; i < static_cast<int>(willingness.size()); ++i) {
    if (willingness[i] < out.mean_willingness) {
      out.sellers.push_back(i);
    } else {
      out.buyers.push_back(i);
    }
  }
  return out;
}

double allocation_from_bid(double bid, double price, Role role, double quota) {
  if (!(price > 0.0)) throw ZeroPriceError("allocation needs a positive price");
  return role == Role::Seller ? bid / price - quota : bid / price;
}

double bid_from_allocation(double trade, double price, Role role, double quota) {
  return role == Role::Seller ? price * (trade + quota) : price * trade;
}

namespace {

bool active(const Participant& p) {
  return p.role == Role::Buyer || (p.role == Role::Seller && p.quota > 0.0);
}

}  // namespace

double seller_quota_total(std::span<const Participant> participants) {
  double q = 0.0;
  for (const auto& p : participants) {
    if (p.role == Role::Seller && p.quota > 0.0) q += p.quota;
  }
  return q;
}

bool market_can_open(std::span<const Participant> participants) {
  int buyers = 0, sellers = 0;
  for (const auto& p : participants) {
    if (p.role == Role::Buyer) ++buyers;
    if (p.role == Role::Seller && p.quota > 0.0) ++sellers;
  }
  return buyers >= 1 && sellers >= 2;
}

TradeBounds trade_bounds(const Participant& p, double seller_quota_total) {
  if (p.role == Role::Seller) return {-std::min(p.quota, p.utility.saturating_sale()), 0.0};
  return {0.0, seller_quota_total};
}

double modified_pool(const Participant& p, double seller_quota_total) {
  return p.role == Role::Seller ? seller_quota_total - p.quota : seller_quota_total;
}

double modified_payoff(const Participant& p, double bid, double price, double seller_quota_total) {
  const double trade = allocation_from_bid(bid, price, p.role, p.quota);
  return modified_utility(p.utility, trade, modified_pool(p, seller_quota_total)) - price * trade;
}

double best_response_bid(const Participant& p, double price, double seller_quota_total) {
  if (!(price > 0.0)) throw ZeroPriceError("best response needs a positive price");
  if (p.role == Role::Seller && !(modified_pool(p, seller_quota_total) > 0.0)) {
    throw InsufficientSellersError("seller best response needs another seller");
  }
  const TradeBounds box = trade_bounds(p, seller_quota_total);
  const double lo = bid_from_allocation(box.lo, price, p.role, p.quota);
  const double hi = bid_from_allocation(box.hi, price, p.role, p.quota);
  auto payoff = [&](double b) { return modified_payoff(p, b, price, seller_quota_total); };
  return numeric::brent_max(payoff, lo, hi).x;
}

double update_price(double price, double sum_bids, double seller_quota_total, double step) {
  const double excess = sum_bids / price - seller_quota_total;
  return std::max(0.0, price + step * excess);
}

void best_responses(std::span<const Participant> participants, double price, double seller_quota_total,
                    std::span<double> bids, ExecutionPolicy policy) {
  const auto n = static_cast<std::ptrdiff_t>(participants.size());
  if (policy == ExecutionPolicy::Parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& p = participants[i];
      bids[i] = active(p) ? best_response_bid(p, price, seller_quota_total) : 0.0;
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const auto& p = participants[i];
      bids[i] = active(p) ? best_response_bid(p, price, seller_quota_total) : 0.0;
    }
  }
}

namespace {

MarketRound summarize_round(std::span<const Participant> participants, int index, double price,
                            std::span<const double> bids, bool keep_vectors) {
  MarketRound r;
  r.index = index;
  r.price = price;
  std::vector<double> alloc(participants.size(), 0.0);
  for (std::size_t i = 0; i < participants.size(); ++i) {
    const auto& p = participants[i];
    if (!active(p)) continue;
    alloc[i] = allocation_from_bid(bids[i], price, p.role, p.quota);
    if (p.role == Role::Buyer) {
      r.buyer_bids += bids[i];
      r.total_demand += alloc[i];
    } else {
      r.seller_bids += bids[i];
      r.total_supply -= alloc[i];
    }
    r.social_welfare += p.utility.value(alloc[i]);
  }
  r.excess_demand = r.total_demand - r.total_supply;
  if (keep_vectors) {
    r.bids.assign(bids.begin(), bids.end());
    r.allocations = std::move(alloc);
  }
  return r;
}

// Shrinks the long side of the book so that trades sum to zero exactly.
void clear_exactly(std::span<const Participant> participants, std::vector<double>& trades) {
  double demand = 0.0, supply = 0.0;
  for (std::size_t i = 0; i < trades.size(); ++i) {
    if (participants[i].role == Role::Buyer) demand += trades[i];
    if (participants[i].role == Role::Seller) supply -= trades[i];
  }
  if (demand > supply) {
    const double k = demand > 0.0 ? supply / demand : 0.0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
      if (participants[i].role == Role::Buyer) trades[i] *= k;
    }
  } else if (supply > demand) {
    const double k = supply > 0.0 ? demand / supply : 0.0;
    for (std::size_t i = 0; i < trades.size(); ++i) {
      if (participants[i].role == Role::Seller) trades[i] *= k;
    }
  }
}

}  // namespace

ClearingResult run_auction(std::span<const Participant> participants, const AuctionSettings& settings) {
  ClearingResult out;
  out.trades.assign(participants.size(), 0.0);
  out.bids.assign(participants.size(), 0.0);
  if (!market_can_open(participants)) {
    out.status = AuctionStatus::MarketClosed;
    return out;
  }
  if (!(settings.initial_price > 0.0)) throw ZeroPriceError("initial price must be positive");

  const double supply = seller_quota_total(participants);
  std::vector<double> bids(participants.size(), 0.0);
  double price = settings.initial_price;
  out.status = AuctionStatus::NotConverged;

  for (int k = 0; k < settings.max_rounds; ++k) {
    best_responses(participants, price, supply, bids, settings.policy);
    const double sum_bids = std::accumulate(bids.begin(), bids.end(), 0.0);
    const double next = update_price(price, sum_bids, supply, settings.step);
    if (settings.record_rounds) out.rounds.push_back(summarize_round(participants, k, price, bids, true));
    out.rounds_used = k + 1;
    out.bids = bids;
    out.bid_price = price;
    out.clearing_price = next;
    if (next == 0.0) {
      out.status = AuctionStatus::PriceCollapsed;
      break;
    }
    if (std::abs(next - price) / price <= settings.tolerance) {
      out.status = AuctionStatus::Converged;
      break;
    }
    price = next;
  }

  if (out.status != AuctionStatus::Converged) return out;

  for (std::size_t i = 0; i < participants.size(); ++i) {
    const auto& p = participants[i];
    if (!active(p)) continue;
    // b/p - q can miss zero by an ulp; keep trades on the role's side
    const double a = allocation_from_bid(out.bids[i], out.bid_price, p.role, p.quota);
    out.trades[i] = p.role == Role::Seller ? std::clamp(a, -p.quota, 0.0) : std::max(a, 0.0);
  }
  out.residual_excess = std::accumulate(out.trades.begin(), out.trades.end(), 0.0);
  clear_exactly(participants, out.trades);
  return out;
}

}  // namespace rbresale
