#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "rbresale/config_io.hpp"
#include "rbresale/output.hpp"

#ifndef RBRESALE_CONFIG_DIR
#define RBRESALE_CONFIG_DIR "configs"
#endif

using namespace rbresale;
using doctest::Approx;

namespace {

std::string table1_text() {
  std::ifstream f(RBRESALE_CONFIG_DIR "/table1.cfg");
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

// Replaces the line starting with `key` (or appends one when absent).
std::string with(std::string text, const std::string& key, const std::string& line) {
  const auto at = text.find("\n" + key + " ");
  if (at == std::string::npos) return text + line + "\n";
  const auto end = text.find('\n', at + 1);
  return text.replace(at + 1, end - at - 1, line);
}

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::vector<std::string> csv_row(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string cell;
  while (std::getline(s, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST_CASE("bundled config carries the reference environment") {
  const auto cfg = parse_config(RBRESALE_CONFIG_DIR "/table1.cfg");
  CHECK(cfg.env.station_height == 10);
  CHECK(cfg.env.tx_power == 0.1);
  CHECK(cfg.noise_dbm == -96);
  CHECK(cfg.env.noise == Approx(2.5118864e-13));
  CHECK(cfg.env.carrier == 2.4e9);
  CHECK(cfg.env.rb_bandwidth == 360e3);
  CHECK(cfg.env.slot_length == 10);
  CHECK(cfg.tolerance == 1e-5);
  CHECK(cfg.rb_pool == 220000);
  CHECK(cfg.user_count() == 10);
  CHECK(cfg.population[0].arrival_mean == 108e6);
  CHECK(cfg.population[1].buffer == 1e9);
  CHECK(cfg == reference_config());
}

TEST_CASE("config errors") {
  const std::string base = table1_text();
  CHECK_NOTHROW(parse_config_text(base));

  // future without a discount
  std::string t = with(base, "scheme", "scheme = future");
  t = with(t, "gamma", "");
  CHECK_THROWS_AS(parse_config_text(t), ConfigError);

  // quotas no longer add up to the pool
  CHECK_THROWS_AS(parse_config_text(with(base, "rb_pool", "rb_pool = 219000")), ConfigError);

  CHECK(error_line("slots = 10\nbogus = 3\n") == 2);
  CHECK(error_line(base + "slots = 5\n") > 0);  // duplicate
  CHECK(error_line("hb.buffer = 1\n") == 1);     // size without unit
  CHECK(error_line("hb.buffer = 1 TB\n") == 1);
  CHECK(error_line("slots = ten\n") == 1);
  CHECK(error_line("warm_start = yes\n") == 1);
  CHECK(error_line("just a line\n") == 1);
  CHECK_THROWS_AS(parse_config_text(with(base, "lr.buffer", "")), ConfigError);  // incomplete class
  CHECK_THROWS_AS(parse_config("/nonexistent/table.cfg"), ConfigError);
}

TEST_CASE("config round trip") {
  auto cfg = reference_config();
  CHECK(parse_config_text(format_config(cfg)) == cfg);
  cfg.scheme = Scheme::Random;
  cfg.gamma.reset();
  cfg.loss_domain = LossDomain::Clamped;
  cfg.env.intra_slot = IntraSlotPolicy::Midpoint;
  cfg.initial_empty_min = 12345;
  cfg.step = 0.1 + 0.2;
  cfg.seed = 18446744073709551615ull;
  CHECK(parse_config_text(format_config(cfg)) == cfg);
  CHECK(parse_config_text(manifest_text(cfg, "rbresale run --x")) == cfg);
  // unset optionals are left out; everything else is echoed
  for (const auto& k : config_keys()) {
    const bool listed = format_config(cfg).find(k.name + " =") != std::string::npos;
    CHECK(listed == (k.name != "gamma"));
  }
}

TEST_CASE("csv quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("static run writes a header-only rounds table") {
  auto cfg = reference_config();
  cfg.scheme = Scheme::Static;
  cfg.slots = 10;
  const auto r = run_scenario(cfg);
  std::ostringstream o;
  write_rounds_csv(o, r.rounds);
  CHECK(o.str() == "slot,round,price,total_demand,total_supply,social_welfare\n");
}

TEST_CASE("summary totals agree with the slots table") {
  auto cfg = reference_config();
  cfg.scheme = Scheme::Heuristic;
  cfg.slots = 200;
  const auto r = run_scenario(cfg);
  std::ostringstream o;
  write_slots_csv(o, r);
  std::stringstream in(o.str());
  std::string line;
  std::getline(in, line);
  const auto header = csv_row(line);
  REQUIRE(header.size() == 14);
  const auto col = [&](const char* name) { return std::find(header.begin(), header.end(), name) - header.begin(); };
  const auto loss_col = col("loss"), waste_col = col("wastage");
  double loss = 0, waste = 0;
  long rows = 0, loss_events = 0;
  while (std::getline(in, line)) {
    const auto row = csv_row(line);
    REQUIRE(row.size() == header.size());
    const double l = std::stod(row[loss_col]);
    loss += l;
    loss_events += l > 0;
    waste += std::stod(row[waste_col]);
    ++rows;
  }
  CHECK(rows == 2000);
  const auto summary = run_summary(r);
  CHECK(summary["metrics"]["loss_amount_bits"].get<double>() == Approx(loss));
  CHECK(summary["metrics"]["wastage_amount_bits"].get<double>() == Approx(waste));
  CHECK(summary["metrics"]["loss_events"].get<long>() == loss_events);
}

TEST_CASE("compare table lists every run and a mean per scheme") {
  const std::uint64_t seeds[] = {4, 5};
  auto cfg = reference_config();
  cfg.slots = 30;
  const auto runs = run_paired(cfg, seeds, ExecutionPolicy::Serial);
  std::ostringstream o;
  write_compare_csv(o, runs);
  std::stringstream in(o.str());
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 1 + 8 + 4);
  const auto j = compare_summary(runs);
  CHECK(j["runs"].size() == 8);
  CHECK(j["mean_over_seeds"].size() == 4);
}

TEST_CASE("files are written verbatim") {
  const auto dir = std::filesystem::temp_directory_path() / "rbresale_io_test";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "x.txt", "a,b\n1,2\n");
  std::ifstream f(dir / "x.txt", std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  CHECK(s.str() == "a,b\n1,2\n");
  CHECK_THROWS(write_text_file(dir / "missing" / "x.txt", ""));
  std::filesystem::remove_all(dir);
}
