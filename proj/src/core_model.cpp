#include "rbresale/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rbresale/error.hpp"

namespace rbresale {

std::string_view to_string(ArrivalClass c) {
  return c == ArrivalClass::HighBandwidth ? "HB" : "LR";
}

void UserProfile::validate() const {
  const auto who = "user " + std::to_string(id) + ": ";
  if (!(buffer_capacity > 0.0)) throw ConfigError(who + "buffer capacity must be > 0");
  if (!(base_quota >= 0.0)) throw ConfigError(who + "quota must be >= 0");
  if (!(sensitivity > 0.0)) throw ConfigError(who + "sensitivity must be > 0");
  if (!(d_max > 0.0)) throw ConfigError(who + "d_max must be > 0");
}

double net_change(double arrival, double efficiency, double quota) { return arrival - efficiency * quota; }

Settlement settle_slot(double occupied, double capacity, double net, double efficiency, double trade) {
  const double served = efficiency * trade;
  const double level = occupied + net - served;
  Settlement out;
  out.occupied_next = std::max(0.0, std::min(capacity, level));
  out.loss = std::max(0.0, net - served - (capacity - occupied));
  out.wastage = std::max(0.0, served - net - occupied);
  return out;
}

double utility(const UtilitySpec& spec, double loss) {
  const double l = std::clamp(loss, 0.0, spec.d_max);
  return spec.sensitivity * (std::sqrt(spec.d_max - l) - std::sqrt(spec.d_max));
}

LossPredictor LossPredictor::one_step(LossDomain domain) { return {1.0, domain}; }

LossPredictor LossPredictor::discounted(double gamma, LossDomain domain) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("discount must lie in (0, 1)");
  return {1.0 / (1.0 - gamma), domain};
}

double anticipated_utility(const UtilitySpec& spec, double predicted_loss) {
  const double l = std::min(predicted_loss, spec.d_max);
  return spec.sensitivity * (std::sqrt(spec.d_max - l) - std::sqrt(spec.d_max));
}

double utility_gradient_wrt_trade(const UtilitySpec& spec, double predicted_loss, double efficiency,
                                  const LossPredictor& predictor) {
  if (predicted_loss >= spec.d_max) {
    throw DegenerateDomainError("predicted loss reached d_max; utility slope is unbounded");
  }
  if (predictor.domain == LossDomain::Clamped && predicted_loss <= 0.0) return 0.0;
  return predictor.gain * efficiency * spec.sensitivity / (2.0 * std::sqrt(spec.d_max - predicted_loss));
}

TradeUtility::TradeUtility(UtilitySpec spec, double overflow, double efficiency, LossPredictor predictor,
                           double headroom)
    : spec_(spec),
      efficiency_(efficiency),
      rate_(predictor.gain * efficiency),
      floor_(predictor.domain == LossDomain::Clamped ? 0.0 : -headroom),
      predictor_(predictor) {
  if (!(headroom >= 0.0)) throw ConfigError("headroom must be >= 0");
  base_ = predictor.domain == LossDomain::Clamped ? std::max(0.0, overflow) : overflow;
}

double TradeUtility::predicted_loss(double trade) const {
  return std::clamp(raw_loss(trade), floor_, spec_.d_max);
}

double TradeUtility::saturating_sale() const {
  if (!(rate_ > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(0.0, (spec_.d_max - base_) / rate_);
}

double TradeUtility::value(double trade) const { return anticipated_utility(spec_, predicted_loss(trade)); }

double TradeUtility::slope(double trade) const {
  if (raw_loss(trade) <= floor_) return 0.0;
  return utility_gradient_wrt_trade(spec_, predicted_loss(trade), efficiency_, predictor_);
}

double TradeUtility::slope_or_flat(double trade) const {
  const double pl = predicted_loss(trade);
  if (pl >= spec_.d_max || raw_loss(trade) <= floor_) return 0.0;
  return utility_gradient_wrt_trade(spec_, pl, efficiency_, predictor_);
}

namespace {

// s * integral of sqrt(D - base + rate * a) over [x, y], written so that
// short intervals do not cancel catastrophically.
double sqrt_segment(double s, double shift, double rate, double x, double y) {
  const double A = std::max(0.0, shift + rate * y);
  const double B = std::max(0.0, shift + rate * x);
  const double ra = std::sqrt(A);
  const double rb = std::sqrt(B);
  if (ra + rb == 0.0) return 0.0;
  return s * (2.0 / 3.0) * (y - x) * (A + ra * rb + B) / (ra + rb);
}

}  // namespace

double TradeUtility::integral(double from, double to) const {
  if (from == to) return 0.0;
  if (from > to) return -integral(to, from);
  const double s = spec_.sensitivity;
  const double D = spec_.d_max;
  if (!(rate_ > 0.0)) return value(0.0) * (to - from);

  // Saturated (pl >= D) for a <= sat; pinned at the floor for a >= flr.
  const double sat = (base_ - D) / rate_;
  const double flr = (base_ - floor_) / rate_;

  double total = 0.0;
  if (from < sat) total += -s * std::sqrt(D) * (std::min(to, sat) - from);
  const double lo = std::max(from, sat);
  const double hi = std::min(to, flr);
  if (lo < hi) total += sqrt_segment(s, D - base_, rate_, lo, hi) - s * std::sqrt(D) * (hi - lo);
  if (to > flr) total += anticipated_utility(spec_, floor_) * (to - std::max(from, flr));
  return total;
}

}  // namespace rbresale
