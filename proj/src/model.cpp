#include "trendflow/model.hpp"

#include <algorithm>
#include <cmath>

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

namespace trendflow {

namespace {

constexpr std::size_t kMaxLocations = std::size_t{1} << 20;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

bool is_ascii(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

std::string format_line(const std::string& reason, std::size_t line) {
    if (line == 0) return reason;
    return "line " + std::to_string(line) + ": " + reason;
}

}  // namespace

DataError::DataError(const std::string& reason, std::size_t line)
    : std::runtime_error(format_line(reason, line)), reason_(reason), line_(line) {}

LocationCatalog::LocationCatalog(std::vector<Location> locations) {
    for (auto& loc : locations) add(std::move(loc));
}

LocationIndex LocationCatalog::add(Location location) {
    if (location.id.empty()) throw DataError("empty location id");
    if (by_id_.count(location.id)) throw DataError("duplicate location id '" + location.id + "'");
    if (!(location.latitude >= -90.0 && location.latitude <= 90.0))
        throw DataError("latitude out of range for '" + location.id + "'");
    if (!(location.longitude >= -180.0 && location.longitude <= 180.0))
        throw DataError("longitude out of range for '" + location.id + "'");
    if (location.is_country_level && country_)
        throw DataError("second country-level location '" + location.id + "'");
    if (locations_.size() >= kMaxLocations) throw DataError("too many locations");

    const auto index = static_cast<LocationIndex>(locations_.size());
    by_id_.emplace(location.id, index);
    if (location.is_country_level) country_ = index;
    locations_.push_back(std::move(location));
    return index;
}

std::optional<LocationIndex> LocationCatalog::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<LocationIndex> LocationCatalog::city_indices() const {
    std::vector<LocationIndex> out;
    out.reserve(locations_.size());
    for (LocationIndex i = 0; i < locations_.size(); ++i) {
        if (!locations_[i].is_country_level) out.push_back(i);
    }
    return out;
}

std::string_view to_string(TrendKind kind) {
    return kind == TrendKind::hashtag ? "hashtag" : "phrase";
}

TrendName TrendName::from_text(std::string_view raw) {
    const auto text = trim(raw);
    if (text.empty()) throw DataError("empty trend text");
    return TrendName{std::string(text), text.front() == '#' ? TrendKind::hashtag : TrendKind::phrase};
}

std::string normalize_trend_key(std::string_view text) {
    text = trim(text);
    if (is_ascii(text)) {
        std::string key(text);
        std::transform(key.begin(), key.end(), key.begin(), [](char c) {
            return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
        });
        return key;
    }
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalizer unavailable");
    icu::UnicodeString folded = icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    folded.foldCase();
    icu::UnicodeString normalized = nfc->normalize(folded, status);
    if (U_FAILURE(status)) throw DataError("cannot normalize trend text");
    std::string key;
    normalized.toUTF8String(key);
    return key;
}

std::optional<TrendId> ObservationLog::find_trend(std::string_view text) const {
    auto it = by_key_.find(normalize_trend_key(text));
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
}

bool ObservationLog::operator==(const ObservationLog& other) const {
    if (!(catalog_ == other.catalog_) || tick_interval_ != other.tick_interval_) return false;
    if (snapshots_.size() != other.snapshots_.size()) return false;
    for (std::size_t s = 0; s < snapshots_.size(); ++s) {
        const auto& a = snapshots_[s];
        const auto& b = other.snapshots_[s];
        if (a.location != b.location || a.timestamp != b.timestamp || a.entries.size() != b.entries.size())
            return false;
        for (std::size_t e = 0; e < a.entries.size(); ++e) {
            const auto& x = a.entries[e];
            const auto& y = b.entries[e];
            if (x.rank != y.rank || x.promoted != y.promoted) return false;
            if (trends_[x.trend] != other.trends_[y.trend]) return false;
        }
    }
    return true;
}

bool on_tick_grid(Timestamp ts, Duration tick_interval) {
    if (tick_interval.count() <= 0) return false;
    return ts.time_since_epoch().count() % tick_interval.count() == 0;
}

LogBuilder::LogBuilder(LocationCatalog catalog, Duration tick_interval) {
    if (tick_interval.count() <= 0) throw DataError("tick interval must be positive");
    log_.catalog_ = std::move(catalog);
    log_.tick_interval_ = tick_interval;
}

TrendId LogBuilder::intern(std::string_view text) {
    auto name = TrendName::from_text(text);
    auto key = normalize_trend_key(name.text);
    auto [it, inserted] = log_.by_key_.try_emplace(std::move(key), static_cast<TrendId>(log_.trends_.size()));
    if (inserted) log_.trends_.push_back(std::move(name));
    return it->second;
}

void LogBuilder::add_snapshot(TrendSnapshot snapshot, std::size_t line) {
    if (snapshot.location >= log_.catalog_.size()) throw DataError("unknown location", line);
    if (!on_tick_grid(snapshot.timestamp, log_.tick_interval_)) throw DataError("off-grid timestamp", line);
    for (const auto& e : snapshot.entries) {
        if (e.rank < 1 || e.rank > kMaxRank) throw DataError("rank out of range", line);
        if (e.trend >= log_.trends_.size()) throw DataError("unknown trend id", line);
    }
    auto& entries = snapshot.entries;
    std::sort(entries.begin(), entries.end(), [](const TrendEntry& a, const TrendEntry& b) { return a.rank < b.rank; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].rank == entries[i - 1].rank) throw DataError("duplicate rank", line);
    }
    std::vector<TrendId> ids;
    ids.reserve(entries.size());
    for (const auto& e : entries) ids.push_back(e.trend);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) throw DataError("duplicate trend in snapshot", line);

    const auto tick = static_cast<std::uint64_t>(snapshot.timestamp.time_since_epoch().count() / log_.tick_interval_.count());
    const std::uint64_t key = (tick << 20) | snapshot.location;
    if (!seen_.insert(key).second) throw DataError("duplicate snapshot", line);

    log_.snapshots_.push_back(std::move(snapshot));
}

ObservationLog LogBuilder::build() && {
    auto& snaps = log_.snapshots_;
    std::stable_sort(snaps.begin(), snaps.end(), [](const TrendSnapshot& a, const TrendSnapshot& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.location < b.location;
    });
    seen_.clear();
    return std::move(log_);
}

ObservationLog filter_promoted(const ObservationLog& log) {
    ObservationLog out = log;
    for (auto& snap : out.snapshots_) {
        std::erase_if(snap.entries, [](const TrendEntry& e) { return e.promoted; });
    }
    return out;
}

}  // namespace trendflow
