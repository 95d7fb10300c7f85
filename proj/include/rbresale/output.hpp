#pragma once

// Result files. CSVs are RFC 4180 with LF line ends and a header row; every
// number is printed with %.17g so a re-read gives back the same doubles.
//
//   slots.csv   slot,user,class,role,trade,bid,price,occupied,empty,loss,wastage,willingness,efficiency,arrival
//   rounds.csv  slot,round,price,total_demand,total_supply,social_welfare
//
// Sizes are in bits, trades in RBs. Willingness is "inf" when a user's
// predicted loss already sits at its cap.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "rbresale/scenario.hpp"

namespace rbresale {

/// Quotes a CSV field when it holds a comma, quote or line break.
std::string csv_field(const std::string& s);

void write_slots_csv(std::ostream& out, const RunResult& run);
void write_rounds_csv(std::ostream& out, std::span<const RoundRecord> rounds);

nlohmann::ordered_json metrics_json(const RunMetrics& m);
nlohmann::ordered_json run_summary(const RunResult& run);

/// Per-run rows plus per-scheme means over seeds.
nlohmann::ordered_json compare_summary(std::span<const RunResult> runs);

/// One row per (scheme, seed) followed by one mean row per scheme.
void write_compare_csv(std::ostream& out, std::span<const RunResult> runs);

/// Config echo headed by the version and seed; parses back as a config.
std::string manifest_text(const ScenarioConfig& cfg, const std::string& command);

/// Writes `content` to `path`, throwing std::runtime_error on any I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

const char* version_string();

}  // namespace rbresale
