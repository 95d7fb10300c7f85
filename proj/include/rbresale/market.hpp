#pragma once

// The per-slot resale game: role choice from reported willingness, the
// bid-to-allocation maps, the modified utilities whose price-taking best
// responses reproduce the Nash first-order conditions, and the broker's
// iterative price adjustment.

#include <concepts>
#include <span>
#include <string_view>
#include <vector>

#include "rbresale/core_model.hpp"
#include "rbresale/error.hpp"
#include "rbresale/numeric.hpp"

namespace rbresale {

enum class Role { None, Buyer, Seller };

std::string_view to_string(Role r);

/// Anything exposing a trade-indexed utility and its slope.
template <class C>
concept TradeCurve = requires(const C& c, double a) {
  { c.value(a) } -> std::convertible_to<double>;
  { c.slope(a) } -> std::convertible_to<double>;
};

template <class C>
concept ClosedFormCurve = TradeCurve<C> && requires(const C& c, double x, double y) {
  { c.integral(x, y) } -> std::convertible_to<double>;
};

enum class Integration {
  /// Use the curve's closed-form integral when it has one, Simpson otherwise.
  Auto,
  Simpson,
};

inline constexpr double kQuadratureRelTol = 1e-9;

/// (1 - a/pool) U(a) + (1/pool) * integral_0^a U(z) dz.
///
/// With pool = total seller quota this is the buyer's modified utility; with
/// pool = the quota of the other sellers it is the seller's. Its slope is
/// (1 - a/pool) U'(a) in both cases, which is the first-order condition of
/// the proportional-allocation bid game.
template <TradeCurve C>
double modified_utility(const C& curve, double trade, double pool, Integration how = Integration::Auto) {
  double area = 0.0;
  if constexpr (ClosedFormCurve<C>) {
    if (how == Integration::Auto) area = curve.integral(0.0, trade);
  }
  if (how == Integration::Simpson || !ClosedFormCurve<C>) {
    area = numeric::adaptive_simpson([&](double z) { return curve.value(z); }, 0.0, trade, kQuadratureRelTol);
  }
  return (1.0 - trade / pool) * curve.value(trade) + area / pool;
}

template <TradeCurve C>
double modified_utility_slope(const C& curve, double trade, double pool) {
  return (1.0 - trade / pool) * curve.slope(trade);
}

/// Buyer branch; requires 0 <= a <= seller_quota_total.
template <TradeCurve C>
double modified_buyer_utility(const C& curve, double trade, double seller_quota_total,
                              Integration how = Integration::Auto) {
  if (!(seller_quota_total > 0.0)) throw ZeroSupplyError("buyer utility needs positive seller quota");
  return modified_utility(curve, trade, seller_quota_total, how);
}

/// Seller branch; requires -q_j <= a <= 0 and at least one other seller.
template <TradeCurve C>
double modified_seller_utility(const C& curve, double trade, double other_seller_quota,
                               Integration how = Integration::Auto) {
  if (!(other_seller_quota > 0.0)) {
    throw InsufficientSellersError("seller utility needs at least one other seller with quota");
  }
  return modified_utility(curve, trade, other_seller_quota, how);
}

struct Participant {
  int id = 0;
  Role role = Role::None;
  double quota = 0.0;
  TradeUtility utility{};
};

/// Marginal utility of a micro-purchase at zero trade.
double willingness(const TradeUtility& u);

struct RoleAssignment {
  std::vector<int> buyers;   // indices into the willingness vector
  std::vector<int> sellers;
  double mean_willingness = 0.0;
};

/// Below-mean willingness sells, everything else (ties included) buys.
RoleAssignment assign_roles(std::span<const double> willingness);

/// a = b/p for buyers and b/p - q for sellers.
double allocation_from_bid(double bid, double price, Role role, double quota);
double bid_from_allocation(double trade, double price, Role role, double quota);

struct TradeBounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// Feasible trades: [0, seller_quota_total] for buyers; for sellers
/// [-q, 0], cut short where the sale would push predicted loss past d_max.
TradeBounds trade_bounds(const Participant& p, double seller_quota_total);

/// Pool entering a participant's modified utility.
double modified_pool(const Participant& p, double seller_quota_total);

/// Payoff the participant maximises at a posted price: modified utility of
/// the implied allocation minus the money paid (or plus the money received).
double modified_payoff(const Participant& p, double bid, double price, double seller_quota_total);

/// Best response over the feasible bid interval (Brent's method).
double best_response_bid(const Participant& p, double price, double seller_quota_total);

/// Bid price update. A positive (sum_bids / p - supply) is excess demand in
/// RBs and raises the price; the result is projected onto [0, inf).
double update_price(double price, double sum_bids, double seller_quota_total, double step);

enum class ExecutionPolicy { Serial, Parallel };

/// Stage-2 kernel: one best response per participant at the posted price.
void best_responses(std::span<const Participant> participants, double price, double seller_quota_total,
                    std::span<double> bids, ExecutionPolicy policy);

struct AuctionSettings {
  double initial_price = 1.095;
  double step = 1e-7;
  double tolerance = 1e-5;
  int max_rounds = 10'000;
  ExecutionPolicy policy = ExecutionPolicy::Serial;
  bool record_rounds = false;
};

struct MarketRound {
  int index = 0;
  double price = 0.0;
  std::vector<double> bids;
  std::vector<double> allocations;
  double buyer_bids = 0.0;
  double seller_bids = 0.0;
  double total_demand = 0.0;  // RBs requested by buyers
  double total_supply = 0.0;  // RBs released by sellers
  double excess_demand = 0.0;
  double social_welfare = 0.0;  // sum of predicted-loss utilities
};

enum class AuctionStatus { Converged, NotConverged, MarketClosed, PriceCollapsed };

std::string_view to_string(AuctionStatus s);

struct ClearingResult {
  AuctionStatus status = AuctionStatus::MarketClosed;
  double clearing_price = 0.0;
  std::vector<double> trades;  // per participant, sums to zero when converged
  std::vector<double> bids;    // last-round bids
  double bid_price = 0.0;      // price the last bids answered
  double residual_excess = 0.0;  // excess demand before the exact-clearing rescale
  int rounds_used = 0;
  std::vector<MarketRound> rounds;

  bool converged() const { return status == AuctionStatus::Converged; }
};

/// Participants with role None and sellers without quota sit out.
bool market_can_open(std::span<const Participant> participants);

double seller_quota_total(std::span<const Participant> participants);

/// Iterates announce price -> best responses -> price update until the
/// relative price change is at most settings.tolerance.
ClearingResult run_auction(std::span<const Participant> participants, const AuctionSettings& settings);

}  // namespace rbresale
