#include "rbresale/traffic.hpp"

#include <cmath>
#include <string>

#include "rbresale/error.hpp"

namespace rbresale {

namespace {

// (r^t - 1) / t with its limit log(r) at t = 0.
double expm1_ratio(double log_r, double t) {
  if (std::abs(t * log_r) < 1e-12) return log_r;
  return std::expm1(t * log_r) / t;
}

}  // namespace

double truncated_pareto_mean(double lower, double upper, double shape) {
  // density ~ x^(-shape-1) on [lower, upper]; work with y = x / lower.
  const double log_r = std::log(upper / lower);
  // mean / lower = [int_1^r y^-shape dy] / [int_1^r y^(-shape-1) dy]
  const double num = expm1_ratio(log_r, 1.0 - shape);
  const double den = expm1_ratio(log_r, -shape);
  const double m = lower * num / den;
  // Very large |shape| pushes one of the exponentials out of range; the
  // mean has then collapsed onto the nearer endpoint.
  if (!std::isfinite(m)) return shape > 0.0 ? lower : upper;
  return m;
}

double fit_pareto_shape(double lower, double upper, double mean) {
  if (!(lower > 0.0 && lower < mean && mean < upper)) {
    throw InfeasibleMeanError("no truncated Pareto on [" + std::to_string(lower) + ", " + std::to_string(upper) +
                              "] has mean " + std::to_string(mean));
  }
  // The truncated mean decreases monotonically in the shape.
  double lo = -1.0, hi = 1.0;
  while (truncated_pareto_mean(lower, upper, lo) < mean) lo *= 2.0;
  while (truncated_pareto_mean(lower, upper, hi) > mean) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (truncated_pareto_mean(lower, upper, mid) > mean) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

TrafficModel::TrafficModel(double lower, double upper, double mean)
    : lower_(lower), upper_(upper), mean_(mean), shape_(fit_pareto_shape(lower, upper, mean)) {}

double TrafficModel::quantile(double u) const {
  // F(x) = (1 - (L/x)^a) / (1 - (L/U)^a), inverted in log space.
  const double log_r = std::log(upper_ / lower_);
  if (std::abs(shape_ * log_r) < 1e-12) return lower_ * std::exp(u * log_r);
  const double tail = -std::expm1(-shape_ * log_r);  // 1 - (L/U)^a
  const double x = lower_ * std::exp(-std::log1p(-u * tail) / shape_);
  return std::min(std::max(x, lower_), upper_);
}

double TrafficModel::sample(Rng& rng) const { return quantile(uniform01(rng)); }

}  // namespace rbresale
