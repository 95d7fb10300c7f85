#include "rbresale/output.hpp"

#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include "rbresale/config_io.hpp"

#ifndef RBRESALE_VERSION
#define RBRESALE_VERSION "unknown"
#endif

namespace rbresale {

const char* version_string() { return RBRESALE_VERSION; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void write_slots_csv(std::ostream& out, const RunResult& run) {
  out << "slot,user,class,role,trade,bid,price,occupied,empty,loss,wastage,willingness,efficiency,arrival\n";
  for (const auto& r : run.slots) {
    out << r.slot << ',' << r.user << ',' << csv_field(std::string(to_string(run.users[r.user].arrival_class)))
        << ',' << csv_field(std::string(to_string(r.role))) << ',' << format_double(r.trade) << ','
        << format_double(r.bid) << ',' << format_double(r.price) << ',' << format_double(r.occupied) << ','
        << format_double(r.empty) << ',' << format_double(r.loss) << ',' << format_double(r.wastage) << ','
        << format_double(r.willingness) << ',' << format_double(r.efficiency) << ',' << format_double(r.arrival)
        << '\n';
  }
}

void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> rounds) {
  out << "slot,round,price,total_demand,total_supply,social_welfare\n";
  for (const auto& r : rounds) {
    out << r.slot << ',' << r.round << ',' << format_double(r.price) << ',' << format_double(r.total_demand) << ','
        << format_double(r.total_supply) << ',' << format_double(r.social_welfare) << '\n';
  }
}

nlohmann::ordered_json metrics_json(const RunMetrics& m) {
  nlohmann::ordered_json j;
  j["loss_events"] = m.loss_events;
  j["loss_amount_bits"] = m.loss_amount;
  j["wastage_events"] = m.wastage_events;
  j["wastage_amount_bits"] = m.wastage_amount;
  j["welfare"] = m.welfare;
  j["welfare_delta"] = m.welfare_delta;
  j["market_slots"] = m.market_slots;
  j["converged_slots"] = m.converged_slots;
  j["nonconverged_slots"] = m.nonconverged_slots;
  j["total_rounds"] = m.total_rounds;
  j["certified_slots"] = m.certified_slots;
  j["certification_failures"] = m.certification_failures;
  return j;
}

nlohmann::ordered_json run_summary(const RunResult& run) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["scheme"] = std::string(to_string(run.config.scheme));
  j["seed"] = run.config.seed;
  j["slots"] = run.config.slots;
  j["users"] = run.users.size();
  j["metrics"] = metrics_json(run.metrics);
  nlohmann::ordered_json users = nlohmann::ordered_json::array();
  for (const auto& u : run.users) {
    users.push_back({{"id", u.id},
                     {"class", std::string(to_string(u.arrival_class))},
                     {"quota", u.base_quota},
                     {"sensitivity", u.sensitivity},
                     {"buffer_bits", u.buffer_capacity}});
  }
  j["user_profiles"] = std::move(users);
  return j;
}

namespace {

struct Mean {
  double loss_events = 0, loss_amount = 0, wastage_events = 0, wastage_amount = 0, welfare = 0, welfare_delta = 0;
  double nonconverged = 0;
  int n = 0;
};

std::map<Scheme, Mean> scheme_means(std::span<const RunResult> runs) {
  std::map<Scheme, Mean> means;
  for (const auto& r : runs) {
    auto& m = means[r.config.scheme];
    m.loss_events += r.metrics.loss_events;
    m.loss_amount += r.metrics.loss_amount;
    m.wastage_events += r.metrics.wastage_events;
    m.wastage_amount += r.metrics.wastage_amount;
    m.welfare += r.metrics.welfare;
    m.welfare_delta += r.metrics.welfare_delta;
    m.nonconverged += r.metrics.nonconverged_slots;
    ++m.n;
  }
  for (auto& [s, m] : means) {
    m.loss_events /= m.n;
    m.loss_amount /= m.n;
    m.wastage_events /= m.n;
    m.wastage_amount /= m.n;
    m.welfare /= m.n;
    m.welfare_delta /= m.n;
    m.nonconverged /= m.n;
  }
  return means;
}

}  // namespace

nlohmann::ordered_json compare_summary(std::span<const RunResult> runs) {
  nlohmann::ordered_json j;
  j["version"] = version_string();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : runs) {
    nlohmann::ordered_json row;
    row["scheme"] = std::string(to_string(r.config.scheme));
    row["seed"] = r.config.seed;
    row["metrics"] = metrics_json(r.metrics);
    rows.push_back(std::move(row));
  }
  j["runs"] = std::move(rows);
  nlohmann::ordered_json table = nlohmann::ordered_json::array();
  for (const auto& [scheme, m] : scheme_means(runs)) {
    table.push_back({{"scheme", std::string(to_string(scheme))},
                     {"seeds", m.n},
                     {"loss_events", m.loss_events},
                     {"loss_amount_gb", m.loss_amount / 1e9},
                     {"wastage_events", m.wastage_events},
                     {"wastage_amount_gb", m.wastage_amount / 1e9},
                     {"welfare_delta", m.welfare_delta},
                     {"nonconverged_slots", m.nonconverged}});
  }
  j["mean_over_seeds"] = std::move(table);
  return j;
}

void write_compare_csv(std::ostream& out, std::span<const RunResult> runs) {
  out << "scheme,seed,loss_events,loss_amount,wastage_events,wastage_amount,welfare,welfare_delta,"
         "market_slots,nonconverged_slots,total_rounds\n";
  for (const auto& r : runs) {
    const auto& m = r.metrics;
    out << to_string(r.config.scheme) << ',' << r.config.seed << ',' << m.loss_events << ','
        << format_double(m.loss_amount) << ',' << m.wastage_events << ',' << format_double(m.wastage_amount) << ','
        << format_double(m.welfare) << ',' << format_double(m.welfare_delta) << ',' << m.market_slots << ','
        << m.nonconverged_slots << ',' << m.total_rounds << '\n';
  }
  for (const auto& [scheme, m] : scheme_means(runs)) {
    out << to_string(scheme) << ",mean," << format_double(m.loss_events) << ',' << format_double(m.loss_amount) << ','
        << format_double(m.wastage_events) << ',' << format_double(m.wastage_amount) << ','
        << format_double(m.welfare) << ',' << format_double(m.welfare_delta) << ",,"
        << format_double(m.nonconverged) << ",\n";
  }
}

std::string manifest_text(const ScenarioConfig& cfg, const std::string& command) {
  std::string out = "# rbresale " + std::string(version_string()) + "\n";
  out += "# command: " + command + "\n";
  out += "# seed: " + std::to_string(cfg.seed) + "\n";
  return out + format_config(cfg);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("write to " + path.string() + " failed");
}

}  // namespace rbresale
