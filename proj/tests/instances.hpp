#pragma once

// Random market instances shared by the tests and the acceptance driver.

#include <vector>

#include "rbresale/market.hpp"
#include "rbresale/rng.hpp"

namespace rbresale::testing {

struct InstanceRanges {
  double sensitivity_min = 21.0;
  double sensitivity_max = 25.0;
  double efficiency_min = 1500.0;  // bits per RB
  double efficiency_max = 3000.0;
  double buyer_overflow_min = 5e6;  // bits of predicted loss
  double buyer_overflow_max = 80e6;
  double seller_overflow_min = -400e6;  // spare room
  double seller_overflow_max = -20e6;
  double headroom = 1e9;
};

inline Participant random_participant(Rng& rng, int id, Role role, const InstanceRanges& r = {}) {
  const bool hb = uniform01(rng) < 0.5;
  const UtilitySpec spec{uniform(rng, r.sensitivity_min, r.sensitivity_max), hb ? 150e6 : 100e6};
  const double f = uniform(rng, r.efficiency_min, r.efficiency_max);
  const double overflow = role == Role::Buyer ? uniform(rng, r.buyer_overflow_min, r.buyer_overflow_max)
                                              : uniform(rng, r.seller_overflow_min, r.seller_overflow_max);
  const LossPredictor pred =
      uniform01(rng) < 0.5 ? LossPredictor::one_step(LossDomain::Headroom)
                           : LossPredictor::discounted(0.9, LossDomain::Headroom);
  Participant p;
  p.id = id;
  p.role = role;
  p.quota = hb ? 4000.0 : 40000.0;
  p.utility = TradeUtility(spec, overflow, f, pred, r.headroom);
  return p;
}

inline std::vector<Participant> random_market(Rng& rng, int buyers, int sellers, const InstanceRanges& r = {}) {
  std::vector<Participant> out;
  for (int i = 0; i < buyers; ++i) out.push_back(random_participant(rng, i, Role::Buyer, r));
  for (int j = 0; j < sellers; ++j) out.push_back(random_participant(rng, buyers + j, Role::Seller, r));
  return out;
}

}  // namespace rbresale::testing
