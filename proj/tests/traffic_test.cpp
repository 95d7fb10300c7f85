#include <cmath>
#include <tuple>

#include <doctest.h>

#include "rbresale/error.hpp"
#include "rbresale/traffic.hpp"

using namespace rbresale;
using doctest::Approx;

namespace {

// Mean of the truncated law by Simpson on the density, independent of the
// closed form.
double numeric_mean(double lo, double hi, double shape) {
  const int n = 200'000;
  const double h = (hi - lo) / n;
  double num = 0, den = 0;
  for (int k = 0; k <= n; ++k) {
    const double x = lo + k * h;
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    const double d = std::pow(x / lo, -shape - 1);
    num += w * x * d;
    den += w * d;
  }
  return num / den;
}

}  // namespace

TEST_CASE("closed-form truncated mean") {
  for (const double shape : {-3.0, -1.0, -0.5, 0.0, 0.7, 1.0, 2.5, 11.0}) {
    CHECK(truncated_pareto_mean(10e6, 100e6, shape) == Approx(numeric_mean(10e6, 100e6, shape)).epsilon(1e-9));
  }
  // shape -1 is the uniform law
  CHECK(truncated_pareto_mean(100, 150, -1) == Approx(125));
}

TEST_CASE("fitted shapes reproduce the targets") {
  for (const auto& [lo, hi, mean] :
       {std::tuple{10e6, 100e6, 11e6}, std::tuple{100e6, 150e6, 108e6}, std::tuple{100e6, 150e6, 125e6}}) {
    const double a = fit_pareto_shape(lo, hi, mean);
    CHECK(truncated_pareto_mean(lo, hi, a) == Approx(mean).epsilon(1e-12));
  }
  CHECK(fit_pareto_shape(100, 150, 125) == Approx(-1).epsilon(1e-9));
  CHECK_THROWS_AS(fit_pareto_shape(10, 100, 5), InfeasibleMeanError);
  CHECK_THROWS_AS(fit_pareto_shape(10, 100, 100), InfeasibleMeanError);
}

TEST_CASE("sampling") {
  const TrafficModel m(10e6, 100e6, 11e6);
  CHECK(m.quantile(0) == Approx(10e6));
  CHECK(m.quantile(1) == Approx(100e6));
  double prev = 0;
  for (double u = 0; u < 1; u += 0.01) {
    const double q = m.quantile(u);
    CHECK(q >= prev);
    prev = q;
  }
  Rng rng = make_stream(5, Stream::Traffic);
  double sum = 0;
  const int n = 200'000;
  for (int i = 0; i < n; ++i) {
    const double x = m.sample(rng);
    REQUIRE(x >= 10e6);
    REQUIRE(x <= 100e6);
    sum += x;
  }
  CHECK(sum / n == Approx(11e6).epsilon(2e-3));
}
