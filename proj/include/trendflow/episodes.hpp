#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "trendflow/model.hpp"

namespace trendflow {

// Presence of one trend at one location.
struct EpisodeRow {
    TrendId trend = 0;
    LocationIndex location = 0;
    Timestamp first_seen{};
    std::int64_t ticks = 0;          // snapshots containing the trend
    std::vector<std::int64_t> runs;  // lengths of maximal runs of consecutive ticks, in order

    bool operator==(const EpisodeRow&) const = default;
};

// Per (trend, location) aggregation of a promoted-free log. Rows for the
// country-level location are kept apart from the city rows.
class TrendEpisodeTable {
public:
    TrendEpisodeTable() = default;
    TrendEpisodeTable(LocationCatalog catalog, Duration tick_interval, std::vector<TrendName> trends,
                      std::vector<EpisodeRow> rows);

    const LocationCatalog& catalog() const noexcept { return catalog_; }
    Duration tick_interval() const noexcept { return tick_interval_; }
    const std::vector<TrendName>& trend_names() const noexcept { return trends_; }
    const TrendName& trend_name(TrendId id) const { return trends_.at(id); }
    std::optional<TrendId> find_trend(std::string_view text) const;

    // City rows ordered by (trend, location).
    std::span<const EpisodeRow> rows() const noexcept { return rows_; }
    std::span<const EpisodeRow> rows_for(TrendId trend) const;
    const EpisodeRow* country_row(TrendId trend) const;
    std::span<const EpisodeRow> country_rows() const noexcept { return country_rows_; }

    // Trends with at least one city row, ascending.
    const std::vector<TrendId>& city_trends() const noexcept { return city_trends_; }

    Duration duration(const EpisodeRow& row) const { return tick_interval_ * row.ticks; }
    bool empty() const noexcept { return rows_.empty(); }

private:
    LocationCatalog catalog_;
    Duration tick_interval_ = kDefaultTickInterval;
    std::vector<TrendName> trends_;
    std::unordered_map<std::string, TrendId> by_key_;
    std::vector<EpisodeRow> rows_;
    std::vector<EpisodeRow> country_rows_;
    std::vector<TrendId> city_trends_;
    std::unordered_map<TrendId, std::pair<std::size_t, std::size_t>> ranges_;
    std::unordered_map<TrendId, std::size_t> country_by_trend_;
};

// Requires promoted entries to have been removed (throws std::invalid_argument otherwise).
TrendEpisodeTable build_episodes(const ObservationLog& log);

}  // namespace trendflow
