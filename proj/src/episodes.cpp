#include "trendflow/episodes.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace trendflow {

TrendEpisodeTable::TrendEpisodeTable(LocationCatalog catalog, Duration tick_interval, std::vector<TrendName> trends,
                                     std::vector<EpisodeRow> rows)
    : catalog_(std::move(catalog)), tick_interval_(tick_interval), trends_(std::move(trends)) {
    if (tick_interval_.count() <= 0) throw std::invalid_argument("tick interval must be positive");
    for (TrendId id = 0; id < trends_.size(); ++id) by_key_.emplace(normalize_trend_key(trends_[id].text), id);

    const auto country = catalog_.country_index();
    for (auto& row : rows) {
        if (row.trend >= trends_.size()) throw std::invalid_argument("episode row references unknown trend");
        if (row.location >= catalog_.size()) throw std::invalid_argument("episode row references unknown location");
        if (row.ticks <= 0) throw std::invalid_argument("episode row with no presence");
        if (row.runs.empty()) row.runs.push_back(row.ticks);
        if (country && row.location == *country) {
            country_rows_.push_back(std::move(row));
        } else {
            rows_.push_back(std::move(row));
        }
    }
    auto by_trend_loc = [](const EpisodeRow& a, const EpisodeRow& b) {
        return a.trend != b.trend ? a.trend < b.trend : a.location < b.location;
    };
    std::sort(rows_.begin(), rows_.end(), by_trend_loc);
    std::sort(country_rows_.begin(), country_rows_.end(), by_trend_loc);

    for (std::size_t i = 0; i < rows_.size();) {
        std::size_t j = i;
        while (j < rows_.size() && rows_[j].trend == rows_[i].trend) {
            if (j > i && rows_[j].location == rows_[j - 1].location)
                throw std::invalid_argument("duplicate episode row");
            ++j;
        }
        ranges_.emplace(rows_[i].trend, std::pair{i, j});
        city_trends_.push_back(rows_[i].trend);
        i = j;
    }
    for (std::size_t i = 0; i < country_rows_.size(); ++i) {
        if (!country_by_trend_.emplace(country_rows_[i].trend, i).second)
            throw std::invalid_argument("duplicate country episode row");
    }
}

std::optional<TrendId> TrendEpisodeTable::find_trend(std::string_view text) const {
    auto it = by_key_.find(normalize_trend_key(text));
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

std::span<const EpisodeRow> TrendEpisodeTable::rows_for(TrendId trend) const {
    auto it = ranges_.find(trend);
    if (it == ranges_.end()) return {};
    return std::span<const EpisodeRow>(rows_).subspan(it->second.first, it->second.second - it->second.first);
}

const EpisodeRow* TrendEpisodeTable::country_row(TrendId trend) const {
    auto it = country_by_trend_.find(trend);
    return it == country_by_trend_.end() ? nullptr : &country_rows_[it->second];
}

TrendEpisodeTable build_episodes(const ObservationLog& log) {
    struct Acc {
        Timestamp first;
        std::int64_t last_tick = 0;
        EpisodeRow row;
    };
    const auto tick = log.tick_interval().count();
    std::map<std::pair<TrendId, LocationIndex>, Acc> acc;

    // Snapshots are time ordered, so each (trend, location) sees ticks ascending.
    for (const auto& snap : log.snapshots()) {
        const std::int64_t t = snap.timestamp.time_since_epoch().count() / tick;
        for (const auto& e : snap.entries) {
            if (e.promoted) throw std::invalid_argument("build_episodes requires promoted entries to be filtered");
            auto [it, inserted] = acc.try_emplace({e.trend, snap.location});
            auto& a = it->second;
            if (inserted) {
                a.row.trend = e.trend;
                a.row.location = snap.location;
                a.row.first_seen = snap.timestamp;
                a.row.runs.push_back(0);
            } else if (t != a.last_tick + 1) {
                a.row.runs.push_back(0);
            }
            ++a.row.runs.back();
            ++a.row.ticks;
            a.last_tick = t;
        }
    }

    std::vector<EpisodeRow> rows;
    rows.reserve(acc.size());
    for (auto& [key, a] : acc) rows.push_back(std::move(a.row));
    return TrendEpisodeTable(log.catalog(), log.tick_interval(), log.trends(), std::move(rows));
}

}  // namespace trendflow
