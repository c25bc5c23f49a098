#pragma once

// Scenario runner shared by the CLI and the acceptance suite. Each scenario
// reads a JSON config, writes a manifest plus CSV/JSON/field outputs into an
// output directory, and reports an exit code: 0 ok, 2 scenario assertion
// failed, 3 bad config. All outputs are byte-deterministic for a fixed
// config.

#include <json.hpp>

#include <string>

namespace wigkit {

inline constexpr int exit_ok = 0;
inline constexpr int exit_assertion = 2;
inline constexpr int exit_config = 3;

struct ScenarioResult {
    int exit_code = exit_ok;
    std::string message;
    nlohmann::json report;
};

// config must carry "scenario": one of steer-sweep, counterexample,
// remote-negativity, chain-audit, field-dump.
ScenarioResult run_scenario(const nlohmann::json& config,
                            const std::string& out_dir);

}  // namespace wigkit
