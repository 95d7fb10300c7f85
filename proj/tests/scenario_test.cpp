#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <doctest.h>

#include "rbresale/scenario.hpp"

using namespace rbresale;
using doctest::Approx;

namespace {

ScenarioConfig short_run(Scheme s, int slots = 120, std::uint64_t seed = 3) {
  ScenarioConfig cfg = reference_config();
  cfg.scheme = s;
  cfg.slots = slots;
  cfg.seed = seed;
  return cfg;
}

// Average rank of each value, ties sharing their mean rank.
std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    for (std::size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j);
    i = j + 1;
  }
  return r;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  const auto rx = ranks(x), ry = ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / rx.size();
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / ry.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

TEST_CASE("social welfare") {
  const std::vector<UserProfile> users{{0, 1e9, 1, 2, ArrivalClass::LowRate, 100},
                                       {1, 1e9, 1, 3, ArrivalClass::LowRate, 100}};
  const double none[] = {0, 0};
  CHECK(social_welfare(users, none) == 0);
  const double one[] = {36, 0};
  CHECK(social_welfare(users, one) == Approx(-4));
}

TEST_CASE("config validation") {
  ScenarioConfig cfg = reference_config();
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.user_count() == 10);

  auto broken = cfg;
  broken.population[0].quota = 3800;  // quotas now sum to 219,000
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  broken = cfg;
  broken.scheme = Scheme::Future;
  broken.gamma.reset();
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  broken = cfg;
  broken.population[1].arrival_mean = 5e6;
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  broken = cfg;
  broken.step = 0;
  CHECK_THROWS_AS(broken.validate(), ConfigError);
}

TEST_CASE("users depend only on the seed") {
  auto a = reference_config();
  auto b = a;
  b.scheme = Scheme::Future;
  const auto ua = make_users(a), ub = make_users(b);
  REQUIRE(ua.size() == 10);
  for (std::size_t i = 0; i < ua.size(); ++i) {
    CHECK(ua[i].sensitivity == ub[i].sensitivity);
    const bool hb = ua[i].arrival_class == ArrivalClass::HighBandwidth;
    CHECK(ua[i].sensitivity >= (hb ? 21 : 23));
    CHECK(ua[i].sensitivity <= (hb ? 23 : 25));
    CHECK(ua[i].d_max == (hb ? 150e6 : 100e6));
  }
  b.seed = 99;
  CHECK(make_users(b)[0].sensitivity != ua[0].sensitivity);
}

TEST_CASE("static scheme never trades") {
  const auto r = run_scenario(short_run(Scheme::Static));
  CHECK(r.metrics.market_slots == 0);
  CHECK(r.rounds.empty());
  for (const auto& s : r.slots) {
    REQUIRE(s.trade == 0);
    REQUIRE(s.role == Role::None);
  }
}

TEST_CASE("schemes see the same traffic and channel") {
  const auto a = run_scenario(short_run(Scheme::Static));
  const auto b = run_scenario(short_run(Scheme::Heuristic));
  const auto c = run_scenario(short_run(Scheme::Random));
  REQUIRE(a.slots.size() == b.slots.size());
  for (std::size_t k = 0; k < a.slots.size(); ++k) {
    REQUIRE(a.slots[k].arrival == b.slots[k].arrival);
    REQUIRE(a.slots[k].arrival == c.slots[k].arrival);
    REQUIRE(a.slots[k].efficiency == b.slots[k].efficiency);
    REQUIRE(a.slots[k].efficiency == c.slots[k].efficiency);
  }
}

TEST_CASE("slot records obey conservation and metric identities") {
  for (const Scheme s : {Scheme::Static, Scheme::Random, Scheme::Heuristic, Scheme::Future}) {
    const auto r = run_scenario(short_run(s));
    std::map<int, double> traded, pool;
    long loss_events = 0, wastage_events = 0;
    double loss = 0, wastage = 0;
    for (const auto& rec : r.slots) {
      const auto& u = r.users[rec.user];
      REQUIRE(std::abs(rec.empty + rec.occupied - u.buffer_capacity) <= 4e-16 * u.buffer_capacity);
      REQUIRE(rec.occupied >= 0);
      REQUIRE(rec.occupied <= u.buffer_capacity);
      REQUIRE(rec.loss * rec.wastage == 0);
      if (rec.role == Role::Seller) REQUIRE(rec.trade <= 0);
      if (rec.role == Role::Seller) REQUIRE(rec.trade >= -u.base_quota);
      if (rec.role == Role::Buyer) REQUIRE(rec.trade >= 0);
      traded[rec.slot] += rec.trade;
      pool[rec.slot] += u.base_quota + rec.trade;
      loss_events += rec.loss > 0;
      wastage_events += rec.wastage > 0;
      loss += rec.loss;
      wastage += rec.wastage;
    }
    for (const auto& [t, p] : pool) REQUIRE(p == Approx(r.config.rb_pool).epsilon(1e-12));
    for (const auto& [t, a] : traded) REQUIRE(std::abs(a) <= 1e-9 * r.config.rb_pool);
    CHECK(r.metrics.loss_events == loss_events);
    CHECK(r.metrics.wastage_events == wastage_events);
    CHECK(r.metrics.loss_amount == Approx(loss));
    CHECK(r.metrics.wastage_amount == Approx(wastage));
    CHECK(r.metrics.converged_slots + r.metrics.nonconverged_slots == r.metrics.market_slots);
  }
}

TEST_CASE("runs replay exactly") {
  auto cfg = short_run(Scheme::Future);
  cfg.trace_rounds = true;
  const auto a = run_scenario(cfg);
  const auto b = run_scenario(cfg);
  REQUIRE(a.slots.size() == b.slots.size());
  for (std::size_t k = 0; k < a.slots.size(); ++k) {
    REQUIRE(a.slots[k].trade == b.slots[k].trade);
    REQUIRE(a.slots[k].occupied == b.slots[k].occupied);
    REQUIRE(a.slots[k].price == b.slots[k].price);
  }
  CHECK(a.rounds.size() == b.rounds.size());
  CHECK(a.metrics.welfare == b.metrics.welfare);
}

TEST_CASE("batch results do not depend on the execution policy") {
  std::vector<ScenarioConfig> configs;
  for (const Scheme s : {Scheme::Random, Scheme::Heuristic, Scheme::Future}) configs.push_back(short_run(s, 60));
  configs[1].policy = ExecutionPolicy::Parallel;
  const auto serial = run_batch(configs, ExecutionPolicy::Serial);
  const auto parallel = run_batch(configs, ExecutionPolicy::Parallel);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    REQUIRE(serial[i].slots.size() == parallel[i].slots.size());
    for (std::size_t k = 0; k < serial[i].slots.size(); ++k) {
      REQUIRE(serial[i].slots[k].trade == parallel[i].slots[k].trade);
    }
    CHECK(serial[i].metrics.welfare == parallel[i].metrics.welfare);
  }
}

TEST_CASE("paired runs share a static baseline") {
  const std::uint64_t seeds[] = {1, 2};
  const auto runs = run_paired(short_run(Scheme::Heuristic, 60), seeds, ExecutionPolicy::Serial);
  REQUIRE(runs.size() == 8);
  CHECK(runs[0].config.scheme == Scheme::Static);
  CHECK(runs[0].metrics.welfare_delta == 0);
  CHECK(runs[4].config.seed == 2);
  CHECK(runs[2].metrics.welfare_delta == Approx(runs[2].metrics.welfare - runs[0].metrics.welfare));
}

TEST_CASE("market snapshot matches the run") {
  auto cfg = short_run(Scheme::Heuristic, 40);
  const auto run = run_scenario(cfg);
  const int slot = 30;
  const auto market = market_at_slot(cfg, slot);
  REQUIRE(market.size() == 10);
  AuctionSettings settings;
  settings.initial_price = cfg.initial_price;
  settings.step = cfg.step;
  settings.tolerance = cfg.tolerance;
  settings.max_rounds = cfg.max_rounds;
  const auto cr = run_auction(market, settings);
  for (std::size_t i = 0; i < market.size(); ++i) {
    const auto& rec = run.slots[slot * 10 + i];
    CHECK(rec.role == market[i].role);
    if (cr.converged()) CHECK(rec.trade == cr.trades[i]);
  }
  cfg.trace_slot = slot;
  const auto trace = trace_slot(cfg, settings);
  CHECK(trace.slot == slot);
  CHECK(trace.clearing.rounds.size() == static_cast<std::size_t>(trace.clearing.rounds_used));
}

TEST_CASE("emptier buffers report lower willingness") {
  const auto r = run_scenario(short_run(Scheme::Heuristic, 720));
  double mean = 0;
  for (std::size_t u = 0; u < r.users.size(); ++u) {
    std::vector<double> empty, will;
    for (std::size_t k = u; k < r.slots.size(); k += r.users.size()) {
      // willingness is reported before settlement, so pair it with the
      // buffer the user brought into the slot
      const double prior = k >= r.users.size() ? r.slots[k - r.users.size()].empty : 0;
      if (k < r.users.size() || !std::isfinite(r.slots[k].willingness)) continue;
      empty.push_back(prior);
      will.push_back(r.slots[k].willingness);
    }
    mean += spearman(empty, will) / r.users.size();
  }
  CHECK(mean < 0);
}
