// Command-line front end: run, compare and fig3.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rbresale/config_io.hpp"
#include "rbresale/output.hpp"
#include "rbresale/scenario.hpp"

namespace fs = std::filesystem;
using namespace rbresale;

namespace {

std::string command_line(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

void write_csv(const fs::path& path, const auto& writer) {
  std::ostringstream buf;
  writer(buf);
  write_text_file(path, buf.str());
}

int cmd_run(const ScenarioConfig& cfg, const fs::path& out, const std::string& command) {
  RunResult run = run_scenario(cfg);
  if (cfg.scheme != Scheme::Static) {
    ScenarioConfig base = cfg;
    base.scheme = Scheme::Static;
    base.trace_rounds = false;
    base.certify = false;
    run.metrics.welfare_delta = run.metrics.welfare - run_scenario(base).metrics.welfare;
  }
  fs::create_directories(out);
  write_csv(out / "slots.csv", [&](std::ostream& o) { write_slots_csv(o, run); });
  write_csv(out / "rounds.csv", [&](std::ostream& o) { write_rounds_csv(o, run.rounds); });
  write_text_file(out / "summary.json", run_summary(run).dump(2) + "\n");
  write_text_file(out / "manifest.cfg", manifest_text(cfg, command));
  const auto& m = run.metrics;
  std::printf("%s seed %llu: loss %ld events %.6g Gb, wastage %ld events %.6g Gb, welfare delta %.6g\n",
              std::string(to_string(cfg.scheme)).c_str(), static_cast<unsigned long long>(cfg.seed), m.loss_events,
              m.loss_amount / 1e9, m.wastage_events, m.wastage_amount / 1e9, m.welfare_delta);
  if (m.nonconverged_slots > 0) {
    std::fprintf(stderr, "warning: %ld of %ld market slots did not converge and settled without trades\n",
                 m.nonconverged_slots, m.market_slots);
  }
  if (m.certification_failures > 0) {
    std::fprintf(stderr, "warning: %ld of %ld certified slots admit a profitable deviation\n",
                 m.certification_failures, m.certified_slots);
  }
  return 0;
}

int cmd_compare(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds, const fs::path& out,
                const std::string& command, bool parallel) {
  const auto runs = run_paired(cfg, seeds, parallel ? ExecutionPolicy::Parallel : ExecutionPolicy::Serial);
  fs::create_directories(out);
  write_csv(out / "compare.csv", [&](std::ostream& o) { write_compare_csv(o, runs); });
  const auto summary = compare_summary(runs);
  write_text_file(out / "summary.json", summary.dump(2) + "\n");
  write_text_file(out / "manifest.cfg", manifest_text(cfg, command));
  std::printf("%-10s %12s %14s %12s %14s %16s\n", "scheme", "loss no.", "loss Gb", "waste no.", "waste Gb",
              "welfare delta");
  for (const auto& row : summary["mean_over_seeds"]) {
    std::printf("%-10s %12.1f %14.4f %12.1f %14.4f %16.6g\n", row["scheme"].get<std::string>().c_str(),
                row["loss_events"].get<double>(), row["loss_amount_gb"].get<double>(),
                row["wastage_events"].get<double>(), row["wastage_amount_gb"].get<double>(),
                row["welfare_delta"].get<double>());
  }
  return 0;
}

int cmd_fig3(const ScenarioConfig& cfg, double step, double initial_price, const fs::path& out,
             const std::string& command) {
  if (cfg.scheme == Scheme::Static) throw ConfigError("fig3 needs a trading scheme; static never opens the market");
  AuctionSettings auction;
  auction.initial_price = initial_price;
  auction.step = step;
  auction.tolerance = cfg.tolerance;
  auction.max_rounds = cfg.max_rounds;
  auction.policy = cfg.policy;
  const SlotTrace trace = trace_slot(cfg, auction);
  const auto& cr = trace.clearing;

  std::vector<RoundRecord> rounds;
  for (const auto& r : cr.rounds) {
    rounds.push_back({trace.slot, r.index, r.price, r.buyer_bids, r.seller_bids, r.total_demand, r.total_supply,
                      r.social_welfare});
  }
  fs::create_directories(out);
  write_csv(out / "rounds.csv", [&](std::ostream& o) { write_rounds_csv(o, rounds); });

  nlohmann::ordered_json j;
  j["version"] = version_string();
  j["slot"] = trace.slot;
  j["status"] = std::string(to_string(cr.status));
  j["rounds"] = cr.rounds_used;
  j["initial_price"] = initial_price;
  j["step"] = step;
  j["clearing_price"] = cr.clearing_price;
  if (!cr.rounds.empty()) {
    const auto& last = cr.rounds.back();
    j["final_total_demand"] = last.total_demand;
    j["final_total_supply"] = last.total_supply;
    j["final_gap"] = last.total_supply > 0.0 ? std::abs(last.total_demand - last.total_supply) / last.total_supply : 0.0;
    j["initial_welfare"] = cr.rounds.front().social_welfare;
    j["final_welfare"] = last.social_welfare;
  }
  write_text_file(out / "summary.json", j.dump(2) + "\n");
  write_text_file(out / "manifest.cfg", manifest_text(cfg, command));
  std::printf("slot %d: %s after %d rounds, price %.6g\n", trace.slot, std::string(to_string(cr.status)).c_str(),
              cr.rounds_used, cr.clearing_price);
  return cr.status == AuctionStatus::Converged ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"User-to-user RB resale simulator"};
  app.require_subcommand(1);
  const std::string command = command_line(argc, argv);

  std::string config_path;
  std::string out_dir;

  auto* run = app.add_subcommand("run", "simulate one scheme on one seed");
  std::string scheme_name;
  std::uint64_t seed = 0;
  int slots = -1;
  bool trace_rounds = false, certify = false, parallel_run = false;
  run->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run->add_option("--scheme", scheme_name, "static|random|heuristic|future")
      ->check(CLI::IsMember({"static", "random", "heuristic", "future"}));
  run->add_option("--seed", seed, "random seed");
  run->add_option("--slots", slots, "number of slots")->check(CLI::NonNegativeNumber);
  run->add_option("--out", out_dir, "output directory")->required();
  run->add_flag("--trace-rounds", trace_rounds, "record every bidding round in rounds.csv");
  run->add_flag("--certify", certify, "check each cleared slot for profitable deviations");
  run->add_flag("--parallel", parallel_run, "compute best responses on all threads");

  auto* compare = app.add_subcommand("compare", "run all schemes on paired seeds");
  std::vector<std::uint64_t> seeds;
  bool parallel_batch = false;
  int compare_slots = -1;
  compare->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  compare->add_option("--seeds", seeds, "seeds, comma separated")->required()->delimiter(',');
  compare->add_option("--slots", compare_slots, "number of slots")->check(CLI::NonNegativeNumber);
  compare->add_option("--out", out_dir, "output directory")->required();
  compare->add_flag("--parallel", parallel_batch, "run the (scheme, seed) pairs on all threads");

  auto* fig3 = app.add_subcommand("fig3", "trace the bidding rounds of one slot");
  double step = 1e-7, initial_price = 1.095;
  int trace_at = -1;
  fig3->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  fig3->add_option("--out", out_dir, "output directory")->required();
  fig3->add_option("--step", step, "price step for the traced slot")->capture_default_str();
  fig3->add_option("--initial-price", initial_price, "first announced price")->capture_default_str();
  fig3->add_option("--slot", trace_at, "slot to trace (default: trace_slot from the config)");

  CLI11_PARSE(app, argc, argv);

  try {
    ScenarioConfig cfg = parse_config(config_path);
    if (*run) {
      if (!scheme_name.empty()) cfg.scheme = *parse_scheme(scheme_name);
      if (run->count("--seed")) cfg.seed = seed;
      if (slots >= 0) cfg.slots = slots;
      cfg.trace_rounds = cfg.trace_rounds || trace_rounds;
      cfg.certify = cfg.certify || certify;
      if (parallel_run) cfg.policy = ExecutionPolicy::Parallel;
      cfg.validate();
      return cmd_run(cfg, out_dir, command);
    }
    if (*compare) {
      if (compare_slots >= 0) cfg.slots = compare_slots;
      cfg.trace_rounds = false;
      cfg.certify = false;
      ScenarioConfig future = cfg;
      future.scheme = Scheme::Future;
      future.validate();
      return cmd_compare(cfg, seeds, out_dir, command, parallel_batch);
    }
    if (trace_at >= 0) cfg.trace_slot = trace_at;
    cfg.validate();
    return cmd_fig3(cfg, step, initial_price, out_dir, command);
  } catch (const ConfigError& e) {
    if (e.line() > 0) {
      std::fprintf(stderr, "%s:%d: %s\n", config_path.c_str(), e.line(), e.what());
    } else {
      std::fprintf(stderr, "%s: %s\n", config_path.c_str(), e.what());
    }
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
