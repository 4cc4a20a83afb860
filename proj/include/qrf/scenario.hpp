#pragma once

#include <json.hpp>

#include "qrf/verify.hpp"

namespace qrf::cli {

using json = nlohmann::json;

inline constexpr const char* kToolVersion = "qrflab 0.1.0";
inline constexpr const char* kSchemaVersion = "1";

/// Command-line overrides applied on top of scenario fields.
struct RunOverrides {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  bool mutate_parity_sign = false;  // hidden test fixture for cmd_verify
};

json load_scenario_file(const std::string& path);

/// Schema-validate a scenario document; unknown fields are rejected with
/// their paths.
void validate_scenario(const json& scenario);

GameConfig parse_game_config(const json& scenario);

/// Execute a verify or game scenario and return the full result record
/// (version, tool, command, inputs echo, result, wall_time_ms).
json run_scenario(const json& scenario, const RunOverrides& overrides);

/// Execute a sweep scenario; returns the CSV table.
std::string run_sweep_csv(const json& scenario, const RunOverrides& overrides);

/// Exit status encoding: 0 ok, 1 property failure, 2 configuration error,
/// 3 numerical indeterminacy (ambiguous candidate set).
int exit_code_for(const json& record);

json state_to_json(const StateVector& s);

/// The record minus the wall-time field, serialised; the determinism
/// contract applies to this payload.
std::string payload_string(const json& record);

}  // namespace qrf::cli
