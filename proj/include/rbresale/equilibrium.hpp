#pragma once

// Independent equilibrium checks for the resale game. Nothing here calls the
// auction: the KKT solver works on slopes by nested bisection, while the
// auction maximises payoffs with Brent's method.

#include <span>
#include <vector>

#include "rbresale/market.hpp"

namespace rbresale {

struct KktSolution {
  std::vector<double> trades;  // per participant, 0 for those sitting out
  double multiplier = 0.0;     // lambda, money per RB
  double residual = 0.0;       // sum of trades, RBs
  int iterations = 0;
};

struct KktOptions {
  /// Stop once |sum of trades| <= rel_tol * total seller quota.
  double rel_tol = 1e-10;
  int max_iterations = 400;
};

/// Trade a participant would choose at multiplier lambda: the root of
/// (1 - a/pool) U'(a) = lambda on its feasible box, or the nearer corner.
double kkt_response(const Participant& p, double lambda, double seller_quota_total);

/// Maximises the sum of modified utilities subject to sum(a) = 0 and the
/// per-role boxes by bisection on the multiplier of the balance constraint.
KktSolution solve_p1(std::span<const Participant> participants, const KktOptions& options = {});

/// Objective of the joint problem at a trade vector.
double p1_objective(std::span<const Participant> participants, std::span<const double> trades);

/// Price at which the bids clear the market: total bids over total seller quota.
double clearing_price_from_bids(std::span<const double> bids, std::span<const double> seller_quotas);

/// Clearing price using the active sellers among the participants.
double clearing_price_from_bids(std::span<const Participant> participants, std::span<const double> bids);

/// Unmodified payoff U(a) - p a of participant i when the bid vector is
/// `bids`, with p and a derived from the bids.
double true_payoff(std::span<const Participant> participants, std::span<const double> bids, std::size_t i);

struct NeReport {
  bool is_equilibrium = true;
  double worst_gain = 0.0;      // largest payoff improvement found, money units
  double worst_rel_gain = 0.0;  // the same over |V|
  int worst_user = -1;
  std::vector<double> best_deviation;  // per participant, the best bid on its grid
};

struct NeCheckOptions {
  double rel_tol = 1e-3;
  double abs_floor = 1e-9;
  int grid_points = 401;
  double low_factor = 0.5;
  double high_factor = 2.0;
};

/// Scans unilateral deviations on a multiplicative grid around each bid (plus
/// zero and a tiny positive bid) and reports whether any beats the current
/// true payoff by more than rel_tol * |V| + abs_floor. Deviations that would
/// take a trade outside the role's bounds are skipped.
NeReport verify_ne(std::span<const Participant> participants, std::span<const double> bids,
                   const NeCheckOptions& options = {});

/// Seller payoff when it is alone on its side of the market:
/// U(-q B / (B + b)) + B, with B the total buyer bid.
double single_seller_payoff(const TradeUtility& seller, double quota, double buyer_bids, double bid);

struct MonotonicityReport {
  bool strictly_increasing = true;
  double min_increment = 0.0;
};

/// Evaluates the lone seller's payoff on `points` bids spread evenly over
/// (0, bid_max] and checks that it strictly increases.
MonotonicityReport single_seller_monotonicity(const TradeUtility& seller, double quota, double buyer_bids,
                                              double bid_max, int points = 1000);

}  // namespace rbresale
