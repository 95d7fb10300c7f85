#pragma once

// Buffer dynamics, loss/wastage accounting and the square-root loss utility.
//
// Sign conventions: a trade `a` is in RBs, positive when buying and negative
// when selling. A net change `c` is arrivals minus quota throughput in bits.

#include <cstdint>
#include <limits>
#include <string_view>

namespace rbresale {

enum class ArrivalClass { HighBandwidth, LowRate };

std::string_view to_string(ArrivalClass c);

struct UserProfile {
  int id = 0;
  double buffer_capacity = 0.0;  // bits
  double base_quota = 0.0;       // RBs per slot
  double sensitivity = 0.0;
  ArrivalClass arrival_class = ArrivalClass::LowRate;
  double d_max = 0.0;  // bits; upper end of the arrival range

  /// Throws ConfigError if any invariant is violated.
  void validate() const;
};

struct UserSlotState {
  double occupied = 0.0;
  double empty = 0.0;
  double arrival = 0.0;
  double efficiency = 0.0;  // bits per RB
  double loss = 0.0;
  double wastage = 0.0;
  double trade = 0.0;  // RBs, signed
};

struct UtilitySpec {
  double sensitivity = 0.0;
  double d_max = 0.0;
};

double net_change(double arrival, double efficiency, double quota);

struct Settlement {
  double occupied_next = 0.0;
  double loss = 0.0;
  double wastage = 0.0;
};

/// Applies one slot of FIFO buffer dynamics. Loss and wastage are the parts
/// of `occupied + net - efficiency * trade` that fall above `capacity` or
/// below zero respectively, so at most one of them is positive.
Settlement settle_slot(double occupied, double capacity, double net, double efficiency, double trade);

/// s * (sqrt(d_max - l) - sqrt(d_max)) with l clamped into [0, d_max].
double utility(const UtilitySpec& spec, double loss);

/// Which values the predicted loss may take while bidding.
enum class LossDomain {
  /// Predicted loss is floored at zero; spare buffer is worth nothing.
  Clamped,
  /// Negative predicted loss stands for spare buffer room and the utility is
  /// continued smoothly into it.
  Headroom,
};

/// Linear loss predictor pl(a) = base - gain * f * a.
/// gain is 1 for the one-step predictor and 1/(1-gamma) for the discounted one.
struct LossPredictor {
  double gain = 1.0;
  LossDomain domain = LossDomain::Clamped;

  static LossPredictor one_step(LossDomain domain = LossDomain::Clamped);
  static LossPredictor discounted(double gamma, LossDomain domain = LossDomain::Clamped);
};

/// Square-root utility extended to the predictor's domain: values below zero
/// are only reachable in the Headroom domain and give positive utility.
double anticipated_utility(const UtilitySpec& spec, double predicted_loss);

/// dU/da through the predictor, given the already-evaluated predicted loss.
/// Returns 0 when the clamped predictor is pinned at zero loss; throws
/// DegenerateDomainError once the predicted loss reaches d_max.
double utility_gradient_wrt_trade(const UtilitySpec& spec, double predicted_loss, double efficiency,
                                  const LossPredictor& predictor);

/// Utility of one user as a function of its own trade for the current slot.
///
/// `overflow` is c - e: the loss the user would see without trading when it
/// is positive, and the spare buffer room (negated) otherwise.
class TradeUtility {
 public:
  TradeUtility() = default;
  /// `headroom` bounds the spare room the Headroom domain can credit; pass
  /// the buffer size, since no trade can empty a buffer below zero.
  TradeUtility(UtilitySpec spec, double overflow, double efficiency, LossPredictor predictor,
               double headroom = std::numeric_limits<double>::infinity());

  double predicted_loss(double trade) const;
  double value(double trade) const;
  /// Right derivative in the trade. Throws DegenerateDomainError at d_max.
  double slope(double trade) const;
  /// Same as slope() but returns 0 in the saturated region instead of throwing.
  double slope_or_flat(double trade) const;
  /// Closed-form integral of value() over [from, to].
  double integral(double from, double to) const;
  /// RBs whose sale lifts the predicted loss to d_max; the utility is not
  /// defined past that point. Infinite when trading does not move the loss.
  double saturating_sale() const;

  const UtilitySpec& spec() const { return spec_; }
  double efficiency() const { return efficiency_; }
  double base_loss() const { return base_; }
  const LossPredictor& predictor() const { return predictor_; }

 private:
  // pl(a) = base_ - rate_ * a before clamping.
  double raw_loss(double trade) const { return base_ - rate_ * trade; }

  UtilitySpec spec_{};
  double base_ = 0.0;
  double efficiency_ = 0.0;
  double rate_ = 0.0;
  double floor_ = 0.0;  // lowest predicted loss
  LossPredictor predictor_{};
};

}  // namespace rbresale
