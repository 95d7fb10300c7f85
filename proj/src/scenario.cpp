#include "rbresale/scenario.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "rbresale/equilibrium.hpp"
#include "rbresale/error.hpp"
#include "rbresale/rng.hpp"
#include "rbresale/units.hpp"

namespace rbresale {

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::Static: return "static";
    case Scheme::Random: return "random";
    case Scheme::Heuristic: return "heuristic";
    case Scheme::Future: return "future";
  }
  return "?";
}

std::optional<Scheme> parse_scheme(std::string_view s) {
  if (s == "static") return Scheme::Static;
  if (s == "random") return Scheme::Random;
  if (s == "heuristic") return Scheme::Heuristic;
  if (s == "future") return Scheme::Future;
  return std::nullopt;
}

int ScenarioConfig::user_count() const {
  int n = 0;
  for (const auto& c : population) n += c.count;
  return n;
}

void ScenarioConfig::validate() const {
  env.validate();
  if (population.empty()) throw ConfigError("population is empty");
  double quotas = 0.0;
  for (const auto& c : population) {
    const std::string who = std::string(to_string(c.arrival_class)) + ": ";
    if (c.count < 0) throw ConfigError(who + "count must be >= 0");
    if (!(c.quota >= 0.0)) throw ConfigError(who + "quota must be >= 0");
    if (!(c.sensitivity_min > 0.0 && c.sensitivity_min <= c.sensitivity_max)) {
      throw ConfigError(who + "sensitivity range must satisfy 0 < min <= max");
    }
    if (!(c.arrival_min > 0.0 && c.arrival_min < c.arrival_mean && c.arrival_mean < c.arrival_max)) {
      throw ConfigError(who + "arrival range must satisfy 0 < min < mean < max");
    }
    if (!(c.buffer > 0.0)) throw ConfigError(who + "buffer must be > 0");
    quotas += c.count * c.quota;
  }
  if (user_count() < 1) throw ConfigError("population has no users");
  if (std::abs(quotas - rb_pool) > 1e-9 * std::max(1.0, rb_pool)) {
    throw ConfigError("sum of quotas (" + std::to_string(quotas) + ") must equal rb_pool (" + std::to_string(rb_pool) +
                      ")");
  }
  if (slots < 0) throw ConfigError("slots must be >= 0");
  if (scheme == Scheme::Future && !gamma) throw ConfigError("scheme future requires gamma");
  if (gamma && !(*gamma > 0.0 && *gamma < 1.0)) throw ConfigError("gamma must lie in (0, 1)");
  if (random_predictor == PredictorKind::Discounted && scheme == Scheme::Random && !gamma) {
    throw ConfigError("discounted predictor for scheme random requires gamma");
  }
  if (!(step > 0.0)) throw ConfigError("step must be > 0");
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be > 0");
  if (!(initial_price > 0.0)) throw ConfigError("initial_price must be > 0");
  if (max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
  if (!(initial_empty_min >= 0.0 && initial_empty_min <= initial_empty_max)) {
    throw ConfigError("initial empty range must satisfy 0 <= min <= max");
  }
  for (const auto& c : population) {
    if (initial_empty_max > c.buffer) throw ConfigError("initial empty buffer exceeds buffer size");
  }
  if (!(speed >= 0.0)) throw ConfigError("speed must be >= 0");
  if (trace_slot < 0) throw ConfigError("trace_slot must be >= 0");
}

ScenarioConfig reference_config() {
  using units::gigabits;
  using units::megabits;
  ScenarioConfig cfg;
  cfg.env.rb_airtime = 0.5e-3;
  cfg.noise_dbm = -96.0;
  cfg.env.noise = units::dbm_to_watts(cfg.noise_dbm);
  cfg.population = {
      {ArrivalClass::HighBandwidth, 5, 4'000.0, 21.0, 23.0, megabits(100), megabits(150), megabits(108), gigabits(1)},
      {ArrivalClass::LowRate, 5, 40'000.0, 23.0, 25.0, megabits(10), megabits(100), megabits(11), gigabits(1)},
  };
  cfg.gamma = 0.9;
  return cfg;
}

double social_welfare(std::span<const UserProfile> users, std::span<const double> losses) {
  double w = 0.0;
  for (std::size_t i = 0; i < users.size(); ++i) {
    w += utility({users[i].sensitivity, users[i].d_max}, losses[i]);
  }
  return w;
}

std::vector<UserProfile> make_users(const ScenarioConfig& cfg) {
  Rng rng = make_stream(cfg.seed, Stream::Population);
  std::vector<UserProfile> users;
  int id = 0;
  for (const auto& c : cfg.population) {
    for (int k = 0; k < c.count; ++k) {
      UserProfile u;
      u.id = id++;
      u.buffer_capacity = c.buffer;
      u.base_quota = c.quota;
      u.sensitivity = uniform(rng, c.sensitivity_min, c.sensitivity_max);
      u.arrival_class = c.arrival_class;
      u.d_max = c.arrival_max;
      u.validate();
      users.push_back(u);
    }
  }
  return users;
}

namespace {

LossPredictor predictor_for(const ScenarioConfig& cfg) {
  const bool discounted = cfg.scheme == Scheme::Future ||
                          (cfg.scheme == Scheme::Random && cfg.random_predictor == PredictorKind::Discounted);
  return discounted ? LossPredictor::discounted(*cfg.gamma, cfg.loss_domain) : LossPredictor::one_step(cfg.loss_domain);
}

struct UserRuntime {
  UserProfile profile;
  TrafficModel traffic;
  Rng traffic_rng;
  Rng mobility_rng;
  MobilityState mobility;
  double occupied = 0.0;
};

// Slot-by-slot state machine behind run_scenario and market_at_slot.
class Simulator {
 public:
  explicit Simulator(const ScenarioConfig& cfg) : cfg_(cfg), predictor_(predictor_for(cfg)) {
    cfg.validate();
    users_ = make_users(cfg);
    const int n = static_cast<int>(users_.size());
    Rng init = make_stream(cfg.seed, Stream::InitialBuffer);
    for (int i = 0; i < n; ++i) {
      const auto& u = users_[i];
      const ClassTemplate* tpl = nullptr;
      for (const auto& c : cfg.population) {
        if (c.arrival_class == u.arrival_class) tpl = &c;
      }
      UserRuntime r{u,
                    TrafficModel(tpl->arrival_min, tpl->arrival_max, tpl->arrival_mean),
                    make_stream(cfg.seed, Stream::Traffic, i),
                    make_stream(cfg.seed, Stream::Mobility, i),
                    {},
                    0.0};
      r.mobility = initial_mobility(r.mobility_rng, cfg.env.arena, cfg.speed);
      r.occupied = u.buffer_capacity - uniform(init, cfg.initial_empty_min, cfg.initial_empty_max);
      rt_.push_back(std::move(r));
    }
    role_rng_ = make_stream(cfg.seed, Stream::Roles);
    efficiency_.resize(n);
    arrival_.resize(n);
    net_.resize(n);
    will_.resize(n);
    losses_.resize(n);
    participants_.resize(n);
    next_mobility_.resize(n);
    auction_.initial_price = cfg.initial_price;
    auction_.step = cfg.step;
    auction_.tolerance = cfg.tolerance;
    auction_.max_rounds = cfg.max_rounds;
    auction_.policy = cfg.policy;
    auction_.record_rounds = cfg.trace_rounds;
    last_price_ = cfg.initial_price;
  }

  const std::vector<UserProfile>& users() const { return users_; }
  const std::vector<Participant>& participants() const { return participants_; }

  // Arrivals, channel and net change, then the role each user takes.
  void open_slot() {
    const int n = static_cast<int>(rt_.size());
    for (int i = 0; i < n; ++i) {
      auto& r = rt_[i];
      next_mobility_[i] = step_mobility(r.mobility, r.mobility_rng, cfg_.env.arena);
      efficiency_[i] = efficiency_factor(r.mobility.position, next_mobility_[i].position, cfg_.env);
      arrival_[i] = r.traffic.sample(r.traffic_rng);
      net_[i] = net_change(arrival_[i], efficiency_[i], r.profile.base_quota);
      const double empty = r.profile.buffer_capacity - r.occupied;
      const UtilitySpec spec{r.profile.sensitivity, r.profile.d_max};
      participants_[i] = {r.profile.id, Role::None, r.profile.base_quota,
                          TradeUtility(spec, net_[i] - empty, efficiency_[i], predictor_, r.profile.buffer_capacity)};
      try {
        will_[i] = willingness(participants_[i].utility);
      } catch (const DegenerateDomainError&) {
        will_[i] = std::numeric_limits<double>::infinity();
      }
    }

    switch (cfg_.scheme) {
      case Scheme::Static: break;
      case Scheme::Random:
        for (int i = 0; i < n; ++i) participants_[i].role = uniform01(role_rng_) < 0.5 ? Role::Buyer : Role::Seller;
        break;
      case Scheme::Heuristic:
      case Scheme::Future: {
        const RoleAssignment roles = assign_roles(will_);
        for (int b : roles.buyers) participants_[b].role = Role::Buyer;
        for (int s : roles.sellers) participants_[s].role = Role::Seller;
        break;
      }
    }
  }

  // Bidding and settlement for the slot opened last.
  void close_slot(int t, RunResult& result) {
    const int n = static_cast<int>(rt_.size());
    std::vector<double> trades(n, 0.0), bids(n, 0.0);
    double price = 0.0;
    auto& m = result.metrics;
    if (cfg_.scheme != Scheme::Static && market_can_open(participants_)) {
      ++m.market_slots;
      if (cfg_.warm_start) auction_.initial_price = last_price_;
      ClearingResult cr = run_auction(participants_, auction_);
      m.total_rounds += cr.rounds_used;
      if (cr.converged()) {
        ++m.converged_slots;
        trades = cr.trades;
        bids = cr.bids;
        price = cr.clearing_price;
        last_price_ = price;
        if (cfg_.certify) {
          ++m.certified_slots;
          if (!verify_ne(participants_, cr.bids).is_equilibrium) ++m.certification_failures;
        }
      } else {
        ++m.nonconverged_slots;
      }
      for (const auto& round : cr.rounds) {
        result.rounds.push_back({t, round.index, round.price, round.buyer_bids, round.seller_bids, round.total_demand,
                                 round.total_supply, round.social_welfare});
      }
    }

    for (int i = 0; i < n; ++i) {
      auto& r = rt_[i];
      const Settlement s = settle_slot(r.occupied, r.profile.buffer_capacity, net_[i], efficiency_[i], trades[i]);
      r.occupied = s.occupied_next;
      losses_[i] = s.loss;
      if (s.loss > 0.0) {
        ++m.loss_events;
        m.loss_amount += s.loss;
      }
      if (s.wastage > 0.0) {
        ++m.wastage_events;
        m.wastage_amount += s.wastage;
      }
      result.slots.push_back({t, r.profile.id, participants_[i].role, trades[i], bids[i], price, r.occupied,
                              r.profile.buffer_capacity - r.occupied, s.loss, s.wastage, will_[i], efficiency_[i],
                              arrival_[i]});
      r.mobility = next_mobility_[i];
    }
    m.welfare += social_welfare(users_, losses_);
  }

 private:
  const ScenarioConfig& cfg_;
  LossPredictor predictor_;
  std::vector<UserProfile> users_;
  std::vector<UserRuntime> rt_;
  Rng role_rng_;
  AuctionSettings auction_;
  std::vector<double> efficiency_, arrival_, net_, will_, losses_;
  std::vector<Participant> participants_;
  std::vector<MobilityState> next_mobility_;
  double last_price_ = 0.0;
};

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
  Simulator sim(cfg);
  RunResult result;
  result.config = cfg;
  result.users = sim.users();
  result.slots.reserve(static_cast<std::size_t>(cfg.slots) * result.users.size());
  for (int t = 0; t < cfg.slots; ++t) {
    sim.open_slot();
    sim.close_slot(t, result);
  }
  return result;
}

std::vector<Participant> market_at_slot(const ScenarioConfig& cfg, int slot) {
  if (slot < 0) throw ConfigError("slot must be >= 0");
  ScenarioConfig quiet = cfg;
  quiet.trace_rounds = false;
  quiet.certify = false;
  Simulator sim(quiet);
  RunResult scratch;
  for (int t = 0; t < slot; ++t) {
    sim.open_slot();
    sim.close_slot(t, scratch);
    scratch.slots.clear();
  }
  sim.open_slot();
  return sim.participants();
}

std::vector<RunResult> run_batch(std::span<const ScenarioConfig> configs, ExecutionPolicy policy) {
  std::vector<RunResult> out(configs.size());
  const auto n = static_cast<std::ptrdiff_t>(configs.size());
  if (policy == ExecutionPolicy::Parallel) {
    std::vector<std::exception_ptr> errors(configs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        out[i] = run_scenario(configs[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = run_scenario(configs[i]);
  }
  return out;
}

std::vector<RunResult> run_paired(const ScenarioConfig& base, std::span<const std::uint64_t> seeds,
                                  ExecutionPolicy policy) {
  constexpr Scheme kOrder[] = {Scheme::Static, Scheme::Random, Scheme::Heuristic, Scheme::Future};
  std::vector<ScenarioConfig> configs;
  for (const std::uint64_t seed : seeds) {
    for (const Scheme s : kOrder) {
      ScenarioConfig c = base;
      c.seed = seed;
      c.scheme = s;
      configs.push_back(std::move(c));
    }
  }
  std::vector<RunResult> runs = run_batch(configs, policy);
  for (std::size_t k = 0; k < runs.size(); k += std::size(kOrder)) {
    const double baseline = runs[k].metrics.welfare;
    for (std::size_t j = 0; j < std::size(kOrder); ++j) {
      runs[k + j].metrics.welfare_delta = runs[k + j].metrics.welfare - baseline;
    }
  }
  return runs;
}

SlotTrace trace_slot(const ScenarioConfig& cfg, AuctionSettings auction) {
  SlotTrace out;
  out.slot = cfg.trace_slot;
  out.participants = market_at_slot(cfg, cfg.trace_slot);
  auction.record_rounds = true;
  out.clearing = run_auction(out.participants, auction);
  return out;
}

}  // namespace rbresale
