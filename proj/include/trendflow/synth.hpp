#pragma once

// Synthetic observation logs with planted structure: geographic clusters
// that share local trends, hub cities that start most nationwide trends, and
// country-level promotion of those trends once enough cities carry them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trendflow/model.hpp"

namespace trendflow {

struct GeneratorConfig {
    std::uint64_t seed = 1;
    std::size_t n_locations = 63;  // cities; a country-level location is added on top
    std::size_t n_clusters = 3;
    std::size_t n_hubs = 11;
    std::int64_t ticks = 7200;     // 50 days of 10-minute ticks
    Duration tick_interval = kDefaultTickInterval;
    Timestamp start = Timestamp{std::chrono::seconds{1365724800}};  // 2013-04-12T00:00:00Z
    std::size_t n_trends = 4000;

    double p_local = 0.65;                // trend stays inside its origin cluster
    double global_trend_fraction = 0.8;   // of the remaining trends, share that go nationwide
    double hashtag_fraction = 0.4;
    double local_spread_mean = 4.0;       // cities reached per cluster by a local trend
    double hub_origin_probability = 0.9;  // nationwide trend starts at a hub
    double hub_delay_mean = 2.0;          // ticks until a hub picks up a nationwide trend
    double adoption_delay_mean = 36.0;    // same for other cities
    double local_delay_mean = 3.0;        // spread delay of local and regional trends
    std::int64_t hub_lead = 3;            // minimum ticks from onset to country-level trending
    double country_threshold = 0.25;      // share of cities that must carry a trend first
    double lifetime_median = 3.0;         // ticks, log-normal, local and regional trends
    double lifetime_sigma = 0.5;
    double global_lifetime_factor = 5.0;
    double promoted_rate = 0.02;          // snapshots carrying a promoted entry at rank 1

    // Throws std::invalid_argument on out-of-range values.
    void validate() const;
};

// "paper-like" (the defaults) or "small" (12 cities, 2 days; for quick runs).
GeneratorConfig generator_preset(std::string_view name);

enum class TrendClass { local, regional, global };

std::string_view to_string(TrendClass c);

struct PlantedLocation {
    std::size_t cluster = 0;
    bool is_hub = false;
};

// Half-open tick range [begin, end), ticks counted from the config start.
struct TickInterval {
    std::int64_t begin = 0;
    std::int64_t end = 0;

    bool operator==(const TickInterval&) const = default;
};

struct Presence {
    LocationIndex location = 0;
    std::int64_t planted_start = 0;        // first planted tick (may lie past the window)
    std::vector<TickInterval> realized;    // ticks actually emitted
};

struct PlantedTrend {
    TrendId id = 0;
    TrendClass cls = TrendClass::local;
    LocationIndex origin = 0;
    std::int64_t onset = 0;
    std::int64_t lifetime = 0;  // ticks per location
    std::vector<Presence> presence;       // cities and, for nationwide trends, the country
    std::optional<std::int64_t> country_onset;  // first realized country-level tick

    bool country_trending() const { return country_onset.has_value(); }
    // Cities with at least one realized tick.
    std::vector<LocationIndex> spread() const;
};

struct GroundTruth {
    std::vector<PlantedLocation> locations;  // catalog order; the country entry is last
    std::vector<PlantedTrend> trends;
    std::size_t evicted = 0;                 // planted (trend, location, tick) triples dropped by capacity

    std::vector<int> cluster_labels(const std::vector<LocationIndex>& cities) const;
    std::vector<LocationIndex> hubs() const;
};

struct SyntheticData {
    ObservationLog log;
    GroundTruth truth;
};

// Deterministic given the config. Throws std::invalid_argument for an
// infeasible config (planted load beyond top-10 capacity).
SyntheticData generate(const GeneratorConfig& config);

nlohmann::ordered_json config_to_json(const GeneratorConfig& config);
GeneratorConfig config_from_json(const nlohmann::json& doc, GeneratorConfig base = {});
nlohmann::ordered_json truth_to_json(const GroundTruth& truth, const ObservationLog& log, const GeneratorConfig& config);

}  // namespace trendflow
