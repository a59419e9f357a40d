#pragma once

// Locations, trend names and snapshot observations.

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace trendflow {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

using LocationIndex = std::uint32_t;
using TrendId = std::uint32_t;

inline constexpr Duration kDefaultTickInterval{600};
inline constexpr int kMaxRank = 10;

// Raised for invalid input data. `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& reason, std::size_t line = 0);

    std::size_t line() const noexcept { return line_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string reason_;
    std::size_t line_;
};

struct Location {
    std::string id;
    std::string display_name;
    double latitude = 0.0;   // degrees
    double longitude = 0.0;  // degrees
    bool is_country_level = false;

    bool operator==(const Location&) const = default;
};

class LocationCatalog {
public:
    LocationCatalog() = default;
    explicit LocationCatalog(std::vector<Location> locations);

    // Throws DataError on duplicate ids, out-of-range coordinates or a second
    // country-level entry.
    LocationIndex add(Location location);

    std::size_t size() const noexcept { return locations_.size(); }
    const Location& operator[](LocationIndex i) const { return locations_.at(i); }
    const std::vector<Location>& locations() const noexcept { return locations_; }

    std::optional<LocationIndex> find(std::string_view id) const;
    std::optional<LocationIndex> country_index() const noexcept { return country_; }

    // Indices of every location that is not the country-level entry, in catalog order.
    std::vector<LocationIndex> city_indices() const;

    bool operator==(const LocationCatalog& other) const { return locations_ == other.locations_; }

private:
    std::vector<Location> locations_;
    std::unordered_map<std::string, LocationIndex> by_id_;
    std::optional<LocationIndex> country_;
};

enum class TrendKind { hashtag, phrase };

std::string_view to_string(TrendKind kind);

struct TrendName {
    std::string text;
    TrendKind kind = TrendKind::phrase;

    // Trims surrounding whitespace; throws DataError when nothing is left.
    static TrendName from_text(std::string_view raw);

    bool operator==(const TrendName&) const = default;
};

// Identity key: NFC-normalized, case-folded, whitespace-trimmed text.
std::string normalize_trend_key(std::string_view text);

struct TrendEntry {
    TrendId trend = 0;
    int rank = 0;
    bool promoted = false;

    bool operator==(const TrendEntry&) const = default;
};

struct TrendSnapshot {
    LocationIndex location = 0;
    Timestamp timestamp{};
    std::vector<TrendEntry> entries;  // ascending rank

    bool operator==(const TrendSnapshot&) const = default;
};

// Immutable once built. Snapshots are ordered by (timestamp, location).
class ObservationLog {
public:
    ObservationLog() = default;

    const LocationCatalog& catalog() const noexcept { return catalog_; }
    Duration tick_interval() const noexcept { return tick_interval_; }
    const std::vector<TrendName>& trends() const noexcept { return trends_; }
    const TrendName& trend(TrendId id) const { return trends_.at(id); }
    std::optional<TrendId> find_trend(std::string_view text) const;
    const std::vector<TrendSnapshot>& snapshots() const noexcept { return snapshots_; }

    // Content equality: same catalog, interval, and snapshot contents by trend text.
    bool operator==(const ObservationLog& other) const;

private:
    friend class LogBuilder;
    friend ObservationLog filter_promoted(const ObservationLog& log);

    LocationCatalog catalog_;
    Duration tick_interval_ = kDefaultTickInterval;
    std::vector<TrendName> trends_;
    std::unordered_map<std::string, TrendId> by_key_;
    std::vector<TrendSnapshot> snapshots_;
};

class LogBuilder {
public:
    explicit LogBuilder(LocationCatalog catalog, Duration tick_interval = kDefaultTickInterval);

    // Returns the id of the trend with the same identity key, interning it on first use.
    TrendId intern(std::string_view text);

    // Validates and appends. Entries may arrive in any rank order.
    // Throws DataError (line attached) on any invariant violation.
    void add_snapshot(TrendSnapshot snapshot, std::size_t line = 0);

    const LocationCatalog& catalog() const noexcept { return log_.catalog_; }
    Duration tick_interval() const noexcept { return log_.tick_interval_; }

    ObservationLog build() &&;

private:
    ObservationLog log_;
    std::unordered_set<std::uint64_t> seen_;  // packed (location, tick)
};

// Drops every promoted entry; remaining ranks are kept as given.
ObservationLog filter_promoted(const ObservationLog& log);

bool on_tick_grid(Timestamp ts, Duration tick_interval);

}  // namespace trendflow
