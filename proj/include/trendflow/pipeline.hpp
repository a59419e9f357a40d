#pragma once

// End-to-end batch run: ingest a log, run the requested stages, write their
// artifacts and a manifest with a SHA-256 per artifact.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trendflow/depnet.hpp"
#include "trendflow/log_io.hpp"
#include "trendflow/setters.hpp"

namespace trendflow {

enum class Stage { stats, depnet, backbone, cluster, setters };

std::string_view to_string(Stage stage);
Stage stage_from_string(std::string_view name);
const std::vector<Stage>& all_stages();

struct PipelineConfig {
    std::filesystem::path input;
    std::optional<std::filesystem::path> catalog;  // default: <input stem>.catalog.csv next to the input
    std::optional<LogFormat> format;               // default: from the input suffix
    std::filesystem::path output_dir = "trendflow_out";
    Duration tick_interval = kDefaultTickInterval;
    std::vector<Stage> stages;

    WeightingMode depnet_mode = WeightingMode::uniform;
    Duration lag_halflife = kDefaultLagHalflife;
    std::optional<double> alpha;  // empty: tune
    bool out_only = false;
    std::vector<double> cuts{0.5, 0.75};
    std::optional<std::size_t> cluster_count;  // extra cut at this many clusters
    WeightingMode setter_mode = WeightingMode::uniform;
    KindFilter kinds = KindFilter::both;
    std::uint64_t seed = 0;
    int verbosity = 1;  // 0 quiet, 1 stage progress, 2 detail

    std::filesystem::path catalog_path() const;
    // Requested stages plus the stages they depend on, in execution order.
    std::vector<Stage> resolved_stages() const;
};

// Overlays the keys present in a config document onto `config`.
// Throws std::invalid_argument on unknown keys or bad values.
void apply_config_json(PipelineConfig& config, const nlohmann::json& doc);
nlohmann::ordered_json config_to_json(const PipelineConfig& config);

enum class ExitCode : int { ok = 0, usage = 1, data = 2, internal = 3 };

struct PipelineResult {
    ExitCode status = ExitCode::ok;
    nlohmann::ordered_json manifest;
    std::string error;  // empty on success
};

// Writes <output_dir>/manifest.json in every case, listing the artifacts
// written so far and a failure record when a stage fails.
PipelineResult run_pipeline(const PipelineConfig& config, std::ostream& log);

// Hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

}  // namespace trendflow
