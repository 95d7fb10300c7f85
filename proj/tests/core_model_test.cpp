#include <cmath>

#include <doctest.h>

#include "rbresale/core_model.hpp"
#include "rbresale/error.hpp"
#include "rbresale/rng.hpp"

using namespace rbresale;
using doctest::Approx;

TEST_CASE("net change") {
  CHECK(net_change(0, 5, 2) == -10);
  CHECK(net_change(100, 5, 20) == 0);
  CHECK(net_change(150e6, 6.6917e7, 2) == Approx(1.6166e7).epsilon(1e-4));
}

TEST_CASE("settle_slot examples") {
  auto s = settle_slot(40, 100, 30, 1, 10);
  CHECK(s.occupied_next == 60);
  CHECK(s.loss == 0);
  CHECK(s.wastage == 0);

  s = settle_slot(90, 100, 50, 1, 20);
  CHECK(s.occupied_next == 100);
  CHECK(s.loss == 20);
  CHECK(s.wastage == 0);

  s = settle_slot(5, 100, -10, 1, 0);
  CHECK(s.occupied_next == 0);
  CHECK(s.loss == 0);
  CHECK(s.wastage == 5);
}

TEST_CASE("settle_slot properties") {
  Rng rng = make_stream(11, Stream::Traffic);
  for (int t = 0; t < 20'000; ++t) {
    const double cap = uniform(rng, 1.0, 1e9);
    const double occ = uniform(rng, 0.0, cap);
    const double net = uniform(rng, -cap, cap);
    const double f = uniform(rng, 0.0, 1e4);
    const double a = uniform(rng, -1e5, 1e5);
    const auto s = settle_slot(occ, cap, net, f, a);
    REQUIRE(s.occupied_next >= 0.0);
    REQUIRE(s.occupied_next <= cap);
    REQUIRE(s.loss >= 0.0);
    REQUIRE(s.wastage >= 0.0);
    REQUIRE(s.loss * s.wastage == 0.0);
    // buying more never adds loss and never removes wastage
    const auto more = settle_slot(occ, cap, net, f, a + uniform(rng, 0.0, 1e4));
    REQUIRE(more.loss <= s.loss);
    REQUIRE(more.wastage >= s.wastage);
    // what entered the buffer is either stored, lost or made up by wastage
    REQUIRE(occ + net - f * a - s.loss + s.wastage == Approx(s.occupied_next).scale(cap));
  }
}

TEST_CASE("utility examples") {
  CHECK(utility({2, 100}, 0) == 0);
  CHECK(utility({2, 100}, 36) == Approx(-4));
  CHECK(utility({22, 150e6}, 150e6) == Approx(-22 * std::sqrt(150e6)));
  CHECK(utility({22, 150e6}, 150e6) == Approx(-2.6944e5).epsilon(1e-4));
  // clamped on both sides
  CHECK(utility({2, 100}, 500) == utility({2, 100}, 100));
  CHECK(utility({2, 100}, -5) == 0);
}

TEST_CASE("utility is decreasing and concave in loss") {
  Rng rng = make_stream(12, Stream::Traffic);
  const UtilitySpec u{22, 150e6};
  for (int t = 0; t < 5000; ++t) {
    double l[3] = {uniform(rng, 0, 150e6), uniform(rng, 0, 150e6), uniform(rng, 0, 150e6)};
    std::sort(l, l + 3);
    if (l[1] - l[0] < 1.0 || l[2] - l[1] < 1.0) continue;
    REQUIRE(utility(u, l[0]) > utility(u, l[1]));
    REQUIRE(utility(u, l[1]) > utility(u, l[2]));
    const double mid = 0.5 * (l[0] + l[2]);
    REQUIRE(utility(u, mid) >= 0.5 * (utility(u, l[0]) + utility(u, l[2])));
  }
}

TEST_CASE("gradient examples") {
  const UtilitySpec u{2, 100};
  CHECK(utility_gradient_wrt_trade(u, 36, 1, LossPredictor::one_step()) == Approx(0.125));
  CHECK(utility_gradient_wrt_trade(u, 36, 1, LossPredictor::discounted(0.9)) == Approx(1.25));
  CHECK(utility_gradient_wrt_trade(u, 0, 1, LossPredictor::one_step()) == 0);
  CHECK_THROWS_AS(utility_gradient_wrt_trade(u, 100, 1, LossPredictor::one_step()), DegenerateDomainError);
  CHECK_THROWS_AS(LossPredictor::discounted(1.0), ConfigError);
}

TEST_CASE("trade utility under the clamped domain") {
  const TradeUtility u({2, 100}, 36, 1, LossPredictor::one_step());
  CHECK(u.predicted_loss(0) == 36);
  CHECK(u.predicted_loss(10) == 26);
  CHECK(u.predicted_loss(50) == 0);    // floored
  CHECK(u.predicted_loss(-80) == 100);  // capped
  CHECK(u.slope(0) == Approx(0.125));
  CHECK(u.slope(50) == 0);
  CHECK_THROWS_AS(u.slope(-80), DegenerateDomainError);
  CHECK(u.slope_or_flat(-80) == 0);
  CHECK(u.saturating_sale() == Approx(64));

  // spare room is worth nothing under clamping
  const TradeUtility idle({2, 100}, -30, 1, LossPredictor::one_step());
  CHECK(idle.base_loss() == 0);
  CHECK(idle.value(5) == 0);
  CHECK(idle.slope(0) == 0);
}

TEST_CASE("trade utility under the headroom domain") {
  const TradeUtility u({2, 100}, -21, 1, LossPredictor::one_step(LossDomain::Headroom), 44);
  CHECK(u.predicted_loss(0) == -21);
  CHECK(u.value(0) == Approx(2 * (std::sqrt(121.0) - 10)));
  CHECK(u.slope(0) == Approx(2.0 / (2 * 11)));
  CHECK(u.predicted_loss(100) == -44);  // floor at minus the headroom
  CHECK(u.slope(100) == 0);
  CHECK_THROWS_AS(TradeUtility({2, 100}, 0, 1, LossPredictor::one_step(LossDomain::Headroom), -1), ConfigError);
}

TEST_CASE("gradient matches finite differences of utility through the predictor") {
  Rng rng = make_stream(13, Stream::Traffic);
  for (int t = 0; t < 400; ++t) {
    const UtilitySpec spec{uniform(rng, 21, 25), 150e6};
    const auto pred = t % 2 ? LossPredictor::discounted(0.9, LossDomain::Headroom)
                            : LossPredictor::one_step(LossDomain::Headroom);
    const double f = uniform(rng, 1e3, 5e3);
    const TradeUtility u(spec, uniform(rng, -3e8, 1e8), f, pred, 1e9);
    const double a = uniform(rng, -2e3, 2e3);
    if (u.predicted_loss(a) >= 0.9 * spec.d_max || u.slope_or_flat(a) == 0) continue;
    const double h = 1e-2;
    const double fd = (u.value(a + h) - u.value(a - h)) / (2 * h);
    REQUIRE(fd == Approx(u.slope(a)).epsilon(1e-6));
  }
}

TEST_CASE("closed-form integral agrees with quadrature across kinks") {
  const TradeUtility u({22, 150e6}, 5e7, 3000, LossPredictor::discounted(0.9, LossDomain::Headroom), 1e9);
  // covers the saturated stretch, the smooth part and the floor
  const double from = -5e3, to = 4e4;
  double simpson = 0;
  const int n = 200'000;
  const double h = (to - from) / n;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    simpson += w * u.value(from + k * h);
  }
  simpson *= h / 3;
  CHECK(u.integral(from, to) == Approx(simpson).epsilon(1e-7));
  CHECK(u.integral(to, from) == Approx(-simpson).epsilon(1e-7));
  CHECK(u.integral(7, 7) == 0);
}

TEST_CASE("user profile validation") {
  UserProfile p{0, 1e9, 4000, 22, ArrivalClass::HighBandwidth, 150e6};
  CHECK_NOTHROW(p.validate());
  p.sensitivity = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
