#include "rbresale/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rbresale {

namespace {

bool active(const Participant& p) {
  return p.role == Role::Buyer || (p.role == Role::Seller && p.quota > 0.0);
}

// Marginal value of one more RB. A sale that saturates the predicted loss
// is worth an unbounded amount to keep, so that corner reads +inf.
double marginal(const Participant& p, double a) {
  if (p.utility.predicted_loss(a) >= p.utility.spec().d_max) return std::numeric_limits<double>::infinity();
  return p.utility.slope_or_flat(a);
}

double total_response(std::span<const Participant> participants, double lambda, double q_s,
                      std::vector<double>* out) {
  double sum = 0.0;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    const double a = active(participants[i]) ? kkt_response(participants[i], lambda, q_s) : 0.0;
    if (out) (*out)[i] = a;
    sum += a;
  }
  return sum;
}

}  // namespace

double kkt_response(const Participant& p, double lambda, double seller_quota_total) {
  const TradeBounds box = trade_bounds(p, seller_quota_total);
  const double pool = modified_pool(p, seller_quota_total);
  auto excess_slope = [&](double a) { return (1.0 - a / pool) * marginal(p, a) - lambda; };
  const double tol = 1e-13 * std::max(1.0, box.hi - box.lo);
  return numeric::bisect_decreasing(excess_slope, box.lo, box.hi, tol);
}

KktSolution solve_p1(std::span<const Participant> participants, const KktOptions& options) {
  if (!market_can_open(participants)) {
    throw BracketError("joint problem needs at least one buyer and two sellers with quota");
  }
  const double q_s = seller_quota_total(participants);

  // Upper bracket from marginal utilities at the feasibility corners.
  double hi = 0.0;
  for (const auto& p : participants) {
    if (!active(p)) continue;
    const TradeBounds box = trade_bounds(p, q_s);
    const double pool = modified_pool(p, q_s);
    for (const double a : {box.lo, box.hi}) {
      const double m = (1.0 - a / pool) * marginal(p, a);
      if (std::isfinite(m)) hi = std::max(hi, m);
    }
  }
  hi = std::max(hi, 1e-12);
  double lo = 0.0;
  int expansions = 0;
  while (total_response(participants, hi, q_s, nullptr) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++expansions > 200) {
      throw BracketError("aggregate excess demand stays positive for lambda in [0, " + std::to_string(hi) + "]");
    }
  }
  if (total_response(participants, lo, q_s, nullptr) < 0.0) {
    throw BracketError("aggregate excess demand is negative already at lambda = " + std::to_string(lo));
  }

  KktSolution sol;
  sol.trades.assign(participants.size(), 0.0);
  const double target = options.rel_tol * q_s;
  double lambda = 0.5 * (lo + hi);
  for (int it = 0; it < options.max_iterations; ++it) {
    lambda = 0.5 * (lo + hi);
    const double sum = total_response(participants, lambda, q_s, &sol.trades);
    sol.iterations = it + 1;
    sol.residual = sum;
    if (std::abs(sum) <= target) break;
    if (sum > 0.0) {
      lo = lambda;
    } else {
      hi = lambda;
    }
    if (!(hi - lo > 1e-15 * hi)) break;
  }
  sol.multiplier = lambda;
  return sol;
}

double p1_objective(std::span<const Participant> participants, std::span<const double> trades) {
  const double q_s = seller_quota_total(participants);
  double total = 0.0;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    const auto& p = participants[i];
    if (!active(p)) continue;
    total += modified_utility(p.utility, trades[i], modified_pool(p, q_s));
  }
  return total;
}

double clearing_price_from_bids(std::span<const double> bids, std::span<const double> seller_quotas) {
  const double supply = std::accumulate(seller_quotas.begin(), seller_quotas.end(), 0.0);
  if (!(supply > 0.0)) throw ZeroSupplyError("clearing price needs positive seller quota");
  return std::accumulate(bids.begin(), bids.end(), 0.0) / supply;
}

double clearing_price_from_bids(std::span<const Participant> participants, std::span<const double> bids) {
  std::vector<double> quotas;
  std::vector<double> active_bids;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    if (!active(participants[i])) continue;
    active_bids.push_back(bids[i]);
    if (participants[i].role == Role::Seller) quotas.push_back(participants[i].quota);
  }
  return clearing_price_from_bids(active_bids, quotas);
}

namespace {

double payoff_at(const Participant& p, double bid, double price) {
  const double a = allocation_from_bid(bid, price, p.role, p.quota);
  return p.utility.value(a) - price * a;
}

}  // namespace

double true_payoff(std::span<const Participant> participants, std::span<const double> bids, std::size_t i) {
  return payoff_at(participants[i], bids[i], clearing_price_from_bids(participants, bids));
}

NeReport verify_ne(std::span<const Participant> participants, std::span<const double> bids,
                   const NeCheckOptions& options) {
  NeReport report;
  report.best_deviation.assign(bids.begin(), bids.end());
  const double q_s = seller_quota_total(participants);
  double total = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    if (!active(participants[i])) continue;
    total += bids[i];
    largest = std::max(largest, bids[i]);
  }
  if (!(q_s > 0.0) || !(total > 0.0)) return report;  // nothing trades, nothing to deviate from

  const double tiny = 1e-9 * largest;
  std::vector<double> grid;
  for (std::size_t i = 0; i < participants.size(); ++i) {
    const auto& p = participants[i];
    if (!active(p)) continue;
    const double price = total / q_s;
    const double current = payoff_at(p, bids[i], price);
    const double tol = options.rel_tol * std::abs(current) + options.abs_floor;
    const TradeBounds box = trade_bounds(p, q_s);

    grid.clear();
    grid.push_back(0.0);
    grid.push_back(tiny);
    const double ratio = options.high_factor / options.low_factor;
    for (int k = 0; k < options.grid_points; ++k) {
      const double t = static_cast<double>(k) / (options.grid_points - 1);
      grid.push_back(bids[i] * options.low_factor * std::pow(ratio, t));
    }

    double best_gain = 0.0;
    for (const double b : grid) {
      const double others = total - bids[i];
      const double price_dev = (others + b) / q_s;
      if (!(price_dev > 0.0)) continue;
      const double a = allocation_from_bid(b, price_dev, p.role, p.quota);
      if (a < box.lo || a > box.hi) continue;  // outside the role's trade range
      const double gain = payoff_at(p, b, price_dev) - current;
      if (gain > best_gain) {
        best_gain = gain;
        report.best_deviation[i] = b;
      }
    }
    const double rel = best_gain / std::max(std::abs(current), options.abs_floor);
    if (best_gain > report.worst_gain) {
      report.worst_gain = best_gain;
      report.worst_rel_gain = rel;
      report.worst_user = static_cast<int>(i);
    }
    if (best_gain > tol) report.is_equilibrium = false;
  }
  return report;
}

double single_seller_payoff(const TradeUtility& seller, double quota, double buyer_bids, double bid) {
  const double trade = -quota * buyer_bids / (buyer_bids + bid);
  return seller.value(trade) + buyer_bids;
}

MonotonicityReport single_seller_monotonicity(const TradeUtility& seller, double quota, double buyer_bids,
                                              double bid_max, int points) {
  MonotonicityReport r;
  r.min_increment = std::numeric_limits<double>::infinity();
  double prev = single_seller_payoff(seller, quota, buyer_bids, bid_max / points);
  for (int k = 2; k <= points; ++k) {
    const double b = bid_max * static_cast<double>(k) / points;
    const double v = single_seller_payoff(seller, quota, buyer_bids, b);
    r.min_increment = std::min(r.min_increment, v - prev);
    if (!(v > prev)) r.strictly_increasing = false;
    prev = v;
  }
  return r;
}

}  // namespace rbresale
