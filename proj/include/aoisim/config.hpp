#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "aoisim/dtmc.hpp"
#include "aoisim/engine.hpp"
#include "aoisim/optimize.hpp"

namespace aoisim {

// Bad or missing configuration content (exit code 1 at the CLI).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem failures (exit code 2 at the CLI).
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { Csv, Json };

struct GridSpec {
    ParamGrid grid;
    // Replaces the k grid with the single value 1/sqrt(D) at each network
    // size, the reference choice for the constant probability function.
    bool k_inv_sqrt_d = false;
};

struct CompareEntry {
    std::string label;
    std::optional<PolicyConfig> fixed;       // one concrete policy
    std::optional<GridSpec> grid;            // optimized per D
    std::map<int, PolicyConfig> per_d;       // frozen per-D parameters
};

struct ExperimentConfig {
    SystemParams params;
    std::optional<PolicyConfig> policy;
    uint64_t num_slots = 1'000'000;
    uint64_t warmup_slots = 10'000;
    uint32_t num_replications = 10;
    uint64_t seed = 1;
    std::vector<int> d_values;
    std::optional<GridSpec> grid;
    std::vector<CompareEntry> compare_entries;
    dtmc::ThresholdForm threshold_form = dtmc::ThresholdForm::Corrected;
    std::string figure;  // "", "fig4", "fig5" or "fig6" for --emit-plotdata
    std::string output_path = "-";
    OutputFormat output_format = OutputFormat::Csv;
};

// Reads and parses a JSON experiment file; throws ConfigError with the
// offending field named, IoError when the file cannot be read.
nlohmann::json load_config_json(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& j);

PolicyConfig policy_from_json(const nlohmann::json& j);
nlohmann::json policy_to_json(const PolicyConfig& policy);

// FNV-1a over the canonical (sorted-key) serialization.
uint64_t config_hash(const nlohmann::json& j);

}  // namespace aoisim
