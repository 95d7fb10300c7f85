#pragma once

// Heavy-tailed per-slot arrivals: a Pareto law truncated to [lower, upper]
// whose shape is fitted so that the truncated mean hits a target.

#include "rbresale/rng.hpp"

namespace rbresale {

/// Analytic mean of the Pareto(lower, shape) law truncated to [lower, upper].
/// Defined for any real shape; shape = -1 is the uniform law.
double truncated_pareto_mean(double lower, double upper, double shape);

/// Bisection on the shape. Throws InfeasibleMeanError unless lower < mean < upper.
double fit_pareto_shape(double lower, double upper, double mean);

class TrafficModel {
 public:
  TrafficModel() = default;
  TrafficModel(double lower, double upper, double mean);

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  double mean() const { return mean_; }
  double shape() const { return shape_; }

  /// Inverse-CDF draw.
  double sample(Rng& rng) const;
  double quantile(double u) const;

 private:
  double lower_ = 0.0;
  double upper_ = 0.0;
  double mean_ = 0.0;
  double shape_ = 0.0;
};

}  // namespace rbresale
