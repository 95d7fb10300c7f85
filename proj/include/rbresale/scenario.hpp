#pragma once

// Multi-slot scenario runner. Every slot goes through four phases: consume
// (arrivals, channel, net change), choose role, bid, trade (buffer
// settlement and metrics). Buffer state rolls over from slot to slot.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "rbresale/channel.hpp"
#include "rbresale/core_model.hpp"
#include "rbresale/market.hpp"
#include "rbresale/traffic.hpp"

namespace rbresale {

enum class Scheme { Static, Random, Heuristic, Future };

std::string_view to_string(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view s);

/// One homogeneous group of users.
struct ClassTemplate {
  ArrivalClass arrival_class = ArrivalClass::LowRate;
  int count = 0;
  double quota = 0.0;  // RBs per slot per user
  double sensitivity_min = 0.0;
  double sensitivity_max = 0.0;
  double arrival_min = 0.0;  // bits
  double arrival_max = 0.0;
  double arrival_mean = 0.0;
  double buffer = 0.0;  // bits

  bool operator==(const ClassTemplate&) const = default;
};

enum class PredictorKind { OneStep, Discounted };

struct ScenarioConfig {
  EnvironmentParams env{};
  double noise_dbm = -96.0;  // source of env.noise
  std::vector<ClassTemplate> population;
  int slots = 4320;
  Scheme scheme = Scheme::Heuristic;
  std::optional<double> gamma;  // required for Future
  double step = 1e-6;
  double tolerance = 1e-5;
  double initial_price = 1.095;
  int max_rounds = 10'000;
  bool warm_start = false;
  std::uint64_t seed = 1;
  double rb_pool = 220'000.0;
  double initial_empty_min = 30e6;
  double initial_empty_max = 70e6;
  double speed = 10.0;  // m per slot
  LossDomain loss_domain = LossDomain::Headroom;
  PredictorKind random_predictor = PredictorKind::OneStep;
  bool certify = false;
  bool trace_rounds = false;
  ExecutionPolicy policy = ExecutionPolicy::Serial;
  int trace_slot = 360;  // slot whose bidding the single-slot trace replays

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
  int user_count() const;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Parameters of the reference 10-user population and Table-I environment.
ScenarioConfig reference_config();

struct SlotRecord {
  int slot = 0;
  int user = 0;
  Role role = Role::None;
  double trade = 0.0;
  double bid = 0.0;
  double price = 0.0;
  double occupied = 0.0;  // after settlement
  double empty = 0.0;
  double loss = 0.0;
  double wastage = 0.0;
  double willingness = 0.0;
  double efficiency = 0.0;
  double arrival = 0.0;
};

struct RoundRecord {
  int slot = 0;
  int round = 0;
  double price = 0.0;
  double buyer_bids = 0.0;
  double seller_bids = 0.0;
  double total_demand = 0.0;
  double total_supply = 0.0;
  double social_welfare = 0.0;
};

struct RunMetrics {
  long loss_events = 0;
  double loss_amount = 0.0;
  long wastage_events = 0;
  double wastage_amount = 0.0;
  double welfare = 0.0;        // sum over slots of social welfare
  double welfare_delta = 0.0;  // welfare minus the Static run on the same seed
  long market_slots = 0;       // slots in which the broker opened the market
  long converged_slots = 0;
  long total_rounds = 0;  // bidding rounds summed over opened slots
  long nonconverged_slots = 0;  // opened but settled with zero trades
  long certified_slots = 0;
  long certification_failures = 0;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<UserProfile> users;
  RunMetrics metrics;
  std::vector<SlotRecord> slots;
  std::vector<RoundRecord> rounds;
};

/// Sum of realised-loss utilities over users.
double social_welfare(std::span<const UserProfile> users, std::span<const double> losses);

/// Draws the users (sensitivities) for a config; depends only on the seed.
std::vector<UserProfile> make_users(const ScenarioConfig& cfg);

RunResult run_scenario(const ScenarioConfig& cfg);

/// Runs slots [0, slot) as run_scenario would, then opens `slot` and returns
/// its participants with roles chosen but before any bidding.
std::vector<Participant> market_at_slot(const ScenarioConfig& cfg, int slot);

/// Runs every scheme on every seed (scheme-major within a seed) and fills
/// welfare_delta against the Static run of the same seed.
std::vector<RunResult> run_paired(const ScenarioConfig& base, std::span<const std::uint64_t> seeds,
                                  ExecutionPolicy policy);

struct SlotTrace {
  int slot = 0;
  std::vector<Participant> participants;
  ClearingResult clearing;
};

/// Replays cfg.trace_slot with round recording on, using `auction` for the
/// bidding of that slot only.
SlotTrace trace_slot(const ScenarioConfig& cfg, AuctionSettings auction);

/// Runs independent configs, in parallel when policy says so. Results are
/// returned in input order and do not depend on the policy.
std::vector<RunResult> run_batch(std::span<const ScenarioConfig> configs, ExecutionPolicy policy);

}  // namespace rbresale
