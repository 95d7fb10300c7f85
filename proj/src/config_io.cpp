#include "rbresale/config_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "rbresale/error.hpp"
#include "rbresale/units.hpp"

namespace rbresale {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view text, const std::string& key, int line) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected a number, got '" + std::string(text) + "'", line);
  return v;
}

long long parse_integer(std::string_view text, const std::string& key, int line) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": expected an integer, got '" + std::string(text) + "'", line);
  return v;
}

bool parse_bool(std::string_view text, const std::string& key, int line) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ConfigError(key + ": expected true or false, got '" + std::string(text) + "'", line);
}

double parse_size(std::string_view text, const std::string& key, int line) {
  const auto space = text.find_last_of(" \t");
  if (space == std::string_view::npos) {
    throw ConfigError(key + ": size needs a unit (b, kb, Mb, Gb), got '" + std::string(text) + "'", line);
  }
  const std::string_view unit = trim(text.substr(space + 1));
  const double v = parse_number(trim(text.substr(0, space)), key, line);
  if (unit == "b") return v;
  if (unit == "kb") return v * 1e3;
  if (unit == "Mb") return v * units::kMegabit;
  if (unit == "Gb") return v * units::kGigabit;
  throw ConfigError(key + ": unknown size unit '" + std::string(unit) + "'", line);
}

std::string format_size(double bits) {
  if ((bits / units::kGigabit) * units::kGigabit == bits && bits >= units::kGigabit) {
    return format_double(bits / units::kGigabit) + " Gb";
  }
  if ((bits / units::kMegabit) * units::kMegabit == bits) return format_double(bits / units::kMegabit) + " Mb";
  return format_double(bits) + " b";
}

template <class E>
struct EnumName {
  E value;
  const char* name;
};

constexpr EnumName<Scheme> kSchemes[] = {
    {Scheme::Static, "static"}, {Scheme::Random, "random"}, {Scheme::Heuristic, "heuristic"}, {Scheme::Future, "future"}};
constexpr EnumName<LossDomain> kDomains[] = {{LossDomain::Clamped, "clamped"}, {LossDomain::Headroom, "headroom"}};
constexpr EnumName<PredictorKind> kPredictors[] = {{PredictorKind::OneStep, "one_step"},
                                                  {PredictorKind::Discounted, "discounted"}};
constexpr EnumName<ExecutionPolicy> kPolicies[] = {{ExecutionPolicy::Serial, "serial"},
                                                  {ExecutionPolicy::Parallel, "parallel"}};
constexpr EnumName<IntraSlotPolicy> kIntraSlot[] = {{IntraSlotPolicy::SlotStart, "slot_start"},
                                                   {IntraSlotPolicy::Midpoint, "midpoint"}};

template <class E, std::size_t N>
E parse_enum(const EnumName<E> (&table)[N], std::string_view text, const std::string& key, int line) {
  std::string options;
  for (const auto& e : table) {
    if (text == e.name) return e.value;
    options += options.empty() ? e.name : std::string("|") + e.name;
  }
  throw ConfigError(key + ": expected one of " + options + ", got '" + std::string(text) + "'", line);
}

template <class E, std::size_t N>
std::string enum_name(const EnumName<E> (&table)[N], E v) {
  for (const auto& e : table) {
    if (e.value == v) return e.name;
  }
  return "?";
}

using Setter = std::function<void(ScenarioConfig&, std::string_view, const std::string&, int)>;
using Getter = std::function<std::string(const ScenarioConfig&)>;

struct Field {
  ConfigKey key;
  Setter set;
  Getter get;
};

Field number_field(std::string name, std::string unit, std::string help, double ScenarioConfig::*member) {
  return {{std::move(name), std::move(unit), std::move(help)},
          [member](ScenarioConfig& c, std::string_view v, const std::string& k, int l) { c.*member = parse_number(v, k, l); },
          [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

Field env_field(std::string name, std::string unit, std::string help, double EnvironmentParams::*member) {
  return {{std::move(name), std::move(unit), std::move(help)},
          [member](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
            c.env.*member = parse_number(v, k, l);
          },
          [member](const ScenarioConfig& c) { return format_double(c.env.*member); }};
}

Field size_field(std::string name, std::string help, double ScenarioConfig::*member) {
  return {{std::move(name), "size", std::move(help)},
          [member](ScenarioConfig& c, std::string_view v, const std::string& k, int l) { c.*member = parse_size(v, k, l); },
          [member](const ScenarioConfig& c) { return format_size(c.*member); }};
}

Field bool_field(std::string name, std::string help, bool ScenarioConfig::*member) {
  return {{std::move(name), "", std::move(help)},
          [member](ScenarioConfig& c, std::string_view v, const std::string& k, int l) { c.*member = parse_bool(v, k, l); },
          [member](const ScenarioConfig& c) { return std::string(c.*member ? "true" : "false"); }};
}

template <class E, std::size_t N>
Field enum_field(std::string name, std::string help, E ScenarioConfig::*member, const EnumName<E> (&table)[N]) {
  return {{std::move(name), "", std::move(help)},
          [member, &table](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
            c.*member = parse_enum(table, v, k, l);
          },
          [member, &table](const ScenarioConfig& c) { return enum_name(table, c.*member); }};
}

std::vector<Field> build_scalar_fields() {
  std::vector<Field> f;
  const std::pair<const char*, double Point::*> station[] = {{"station_x", &Point::x}, {"station_y", &Point::y}};
  for (const auto& [name, member] : station) {
    f.push_back({{name, "m", "base station position"},
                 [member](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                   c.env.station.*member = parse_number(v, k, l);
                 },
                 [member](const ScenarioConfig& c) { return format_double(c.env.station.*member); }});
  }
  f.push_back(env_field("station_height", "m", "antenna height above the users", &EnvironmentParams::station_height));
  f.push_back(env_field("tx_power", "W", "user transmit power", &EnvironmentParams::tx_power));
  f.push_back({{"noise_dbm", "dBm", "noise power"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                 c.noise_dbm = parse_number(v, k, l);
                 c.env.noise = units::dbm_to_watts(c.noise_dbm);
               },
               [](const ScenarioConfig& c) { return format_double(c.noise_dbm); }});
  f.push_back(env_field("carrier_frequency", "Hz", "carrier frequency", &EnvironmentParams::carrier));
  f.push_back(env_field("rb_bandwidth", "Hz", "bandwidth of one RB", &EnvironmentParams::rb_bandwidth));
  f.push_back(env_field("slot_length", "s", "length of a trading slot", &EnvironmentParams::slot_length));
  f.push_back(env_field("rb_airtime", "s", "transmission time of one RB within the slot", &EnvironmentParams::rb_airtime));
  f.push_back(env_field("light_speed", "m/s", "propagation speed", &EnvironmentParams::light_speed));
  const std::pair<const char*, double Arena::*> arena[] = {
      {"arena_x_min", &Arena::x_min}, {"arena_y_min", &Arena::y_min}, {"arena_x_max", &Arena::x_max},
      {"arena_y_max", &Arena::y_max}};
  for (const auto& [name, member] : arena) {
    f.push_back({{name, "m", "square the users roam in"},
                 [member](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                   c.env.arena.*member = parse_number(v, k, l);
                 },
                 [member](const ScenarioConfig& c) { return format_double(c.env.arena.*member); }});
  }
  f.push_back({{"intra_slot", "", "position used for the slot's channel: slot_start|midpoint"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                 c.env.intra_slot = parse_enum(kIntraSlot, v, k, l);
               },
               [](const ScenarioConfig& c) { return enum_name(kIntraSlot, c.env.intra_slot); }});
  f.push_back(number_field("speed", "m/slot", "user speed", &ScenarioConfig::speed));
  f.push_back({{"slots", "", "number of slots"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                 c.slots = static_cast<int>(parse_integer(v, k, l));
               },
               [](const ScenarioConfig& c) { return std::to_string(c.slots); }});
  f.push_back(enum_field("scheme", "static|random|heuristic|future", &ScenarioConfig::scheme, kSchemes));
  f.push_back({{"gamma", "", "discount of the multi-step predictor; required by scheme future"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) { c.gamma = parse_number(v, k, l); },
               [](const ScenarioConfig& c) { return c.gamma ? format_double(*c.gamma) : std::string(); }});
  f.push_back(number_field("step", "", "price step of the bidding rounds", &ScenarioConfig::step));
  f.push_back(number_field("tolerance", "", "relative price change that ends the bidding", &ScenarioConfig::tolerance));
  f.push_back(number_field("initial_price", "", "price announced in the first round", &ScenarioConfig::initial_price));
  f.push_back({{"max_rounds", "", "bidding rounds before a slot is given up"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                 c.max_rounds = static_cast<int>(parse_integer(v, k, l));
               },
               [](const ScenarioConfig& c) { return std::to_string(c.max_rounds); }});
  f.push_back(bool_field("warm_start", "start each slot at the previous clearing price", &ScenarioConfig::warm_start));
  f.push_back({{"seed", "", "random seed"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                 std::uint64_t s = 0;
                 const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), s);
                 if (ec != std::errc() || ptr != v.data() + v.size()) {
                   throw ConfigError(k + ": expected an integer in [0, 2^64), got '" + std::string(v) + "'", l);
                 }
                 c.seed = s;
               },
               [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
  f.push_back(number_field("rb_pool", "RB", "RBs per slot, equal to the sum of quotas", &ScenarioConfig::rb_pool));
  f.push_back(size_field("initial_empty_min", "lower end of the initial empty buffer", &ScenarioConfig::initial_empty_min));
  f.push_back(size_field("initial_empty_max", "upper end of the initial empty buffer", &ScenarioConfig::initial_empty_max));
  f.push_back(enum_field("loss_domain", "predicted loss range while bidding: clamped|headroom",
                         &ScenarioConfig::loss_domain, kDomains));
  f.push_back(enum_field("random_predictor", "predictor of scheme random: one_step|discounted",
                         &ScenarioConfig::random_predictor, kPredictors));
  f.push_back(bool_field("certify", "check every cleared slot for profitable deviations", &ScenarioConfig::certify));
  f.push_back(bool_field("trace_rounds", "record every bidding round", &ScenarioConfig::trace_rounds));
  f.push_back(enum_field("policy", "serial|parallel best responses", &ScenarioConfig::policy, kPolicies));
  f.push_back({{"trace_slot", "", "slot replayed by the single-slot price trace"},
               [](ScenarioConfig& c, std::string_view v, const std::string& k, int l) {
                 c.trace_slot = static_cast<int>(parse_integer(v, k, l));
               },
               [](const ScenarioConfig& c) { return std::to_string(c.trace_slot); }});
  return f;
}

const std::vector<Field>& scalar_fields() {
  static const std::vector<Field> fields = build_scalar_fields();
  return fields;
}

struct ClassField {
  const char* name;
  const char* unit;
  const char* help;
};

constexpr ClassField kClassFields[] = {
    {"count", "", "users in the class"},
    {"quota", "RB", "RBs per user per slot"},
    {"sensitivity_min", "", "lower end of the loss sensitivity"},
    {"sensitivity_max", "", "upper end of the loss sensitivity"},
    {"arrival_min", "size", "smallest per-slot arrival"},
    {"arrival_max", "size", "largest per-slot arrival, also the utility's loss cap"},
    {"arrival_mean", "size", "mean per-slot arrival"},
    {"buffer", "size", "buffer per user"},
};

constexpr EnumName<ArrivalClass> kClasses[] = {{ArrivalClass::HighBandwidth, "hb"}, {ArrivalClass::LowRate, "lr"}};

void set_class_field(ClassTemplate& t, std::string_view field, std::string_view v, const std::string& k, int l) {
  if (field == "count") {
    t.count = static_cast<int>(parse_integer(v, k, l));
  } else if (field == "quota") {
    t.quota = parse_number(v, k, l);
  } else if (field == "sensitivity_min") {
    t.sensitivity_min = parse_number(v, k, l);
  } else if (field == "sensitivity_max") {
    t.sensitivity_max = parse_number(v, k, l);
  } else if (field == "arrival_min") {
    t.arrival_min = parse_size(v, k, l);
  } else if (field == "arrival_max") {
    t.arrival_max = parse_size(v, k, l);
  } else if (field == "arrival_mean") {
    t.arrival_mean = parse_size(v, k, l);
  } else if (field == "buffer") {
    t.buffer = parse_size(v, k, l);
  } else {
    throw ConfigError("unknown key '" + k + "'", l);
  }
}

std::string get_class_field(const ClassTemplate& t, std::string_view field) {
  if (field == "count") return std::to_string(t.count);
  if (field == "quota") return format_double(t.quota);
  if (field == "sensitivity_min") return format_double(t.sensitivity_min);
  if (field == "sensitivity_max") return format_double(t.sensitivity_max);
  if (field == "arrival_min") return format_size(t.arrival_min);
  if (field == "arrival_max") return format_size(t.arrival_max);
  if (field == "arrival_mean") return format_size(t.arrival_mean);
  return format_size(t.buffer);
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> k;
    for (const auto& f : scalar_fields()) k.push_back(f.key);
    for (const auto& c : kClasses) {
      for (const auto& f : kClassFields) k.push_back({std::string(c.name) + "." + f.name, f.unit, f.help});
    }
    return k;
  }();
  return keys;
}

ScenarioConfig parse_config_text(std::string_view text) {
  ScenarioConfig cfg;
  cfg.env.noise = units::dbm_to_watts(cfg.noise_dbm);
  std::map<std::string, int> seen;
  std::map<ArrivalClass, std::set<std::string>> class_keys;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    if (value.empty()) throw ConfigError(key + ": missing value", line_no);
    if (auto [it, fresh] = seen.emplace(key, line_no); !fresh) {
      throw ConfigError(key + ": duplicate key (first set on line " + std::to_string(it->second) + ")", line_no);
    }

    if (const auto dot = key.find('.'); dot != std::string::npos) {
      const ArrivalClass cls = parse_enum(kClasses, std::string_view(key).substr(0, dot), key, line_no);
      ClassTemplate* t = nullptr;
      for (auto& c : cfg.population) {
        if (c.arrival_class == cls) t = &c;
      }
      if (!t) {
        cfg.population.push_back({});
        t = &cfg.population.back();
        t->arrival_class = cls;
      }
      const std::string field = key.substr(dot + 1);
      set_class_field(*t, field, value, key, line_no);
      class_keys[cls].insert(field);
      continue;
    }
    bool known = false;
    for (const auto& f : scalar_fields()) {
      if (f.key.name == key) {
        f.set(cfg, value, key, line_no);
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key '" + key + "'", line_no);
  }

  for (const auto& [cls, fields] : class_keys) {
    for (const auto& f : kClassFields) {
      if (!fields.count(f.name)) {
        throw ConfigError("missing key '" + enum_name(kClasses, cls) + "." + f.name + "'");
      }
    }
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string format_config(const ScenarioConfig& cfg) {
  std::string out;
  auto line = [&out](const ConfigKey& key, const std::string& value) {
    if (value.empty()) return;
    out += key.name + " = " + value;
    if (!key.unit.empty() && key.unit != "size") out += "  # " + key.unit;
    out += '\n';
  };
  for (const auto& f : scalar_fields()) line(f.key, f.get(cfg));
  for (const auto& c : cfg.population) {
    const std::string prefix = enum_name(kClasses, c.arrival_class) + ".";
    for (const auto& f : kClassFields) line({prefix + f.name, f.unit, f.help}, get_class_field(c, f.name));
  }
  return out;
}

}  // namespace rbresale
