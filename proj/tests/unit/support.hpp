#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "trendflow/episodes.hpp"
#include "trendflow/model.hpp"
#include "trendflow/random.hpp"

namespace tft {

using namespace trendflow;

inline const Timestamp kT0{std::chrono::seconds{1365724800}};  // 2013-04-12T00:00:00Z

inline Timestamp at_min(long minutes) { return kT0 + std::chrono::minutes{minutes}; }

inline LocationCatalog make_catalog(const std::vector<std::string>& cities, bool with_country = true) {
    LocationCatalog c;
    double k = 0.0;
    for (const auto& id : cities) {
        c.add({id, "City " + id, 30.0 + k, -100.0 + k, false});
        k += 0.5;
    }
    if (with_country) c.add({"us", "United States", 39.8, -98.6, true});
    return c;
}

inline std::vector<std::string> city_names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("c" + std::to_string(100 + i));
    return out;
}

struct Appearance {
    std::string trend;
    std::string loc;
    long minute = 0;
};

// Ranks follow insertion order within each snapshot.
inline ObservationLog make_log(const LocationCatalog& catalog, const std::vector<Appearance>& apps) {
    LogBuilder b(catalog);
    std::map<std::pair<long, LocationIndex>, TrendSnapshot> snaps;
    for (const auto& a : apps) {
        const auto loc = catalog.find(a.loc).value();
        auto& s = snaps[{a.minute, loc}];
        s.location = loc;
        s.timestamp = at_min(a.minute);
        s.entries.push_back({b.intern(a.trend), static_cast<int>(s.entries.size()) + 1, false});
    }
    for (auto& [key, s] : snaps) b.add_snapshot(s);
    return std::move(b).build();
}

inline TrendEpisodeTable make_episodes(const LocationCatalog& catalog, const std::vector<Appearance>& apps) {
    return build_episodes(make_log(catalog, apps));
}

// Random log over `cities` cities plus a country entry; each snapshot holds up
// to 10 trends drawn from a pool, a few of them promoted when asked.
inline ObservationLog random_log(std::uint64_t seed, std::size_t cities, std::size_t ticks, std::size_t pool,
                                 bool promoted = false) {
    Rng rng(seed);
    const auto catalog = make_catalog(city_names(cities));
    LogBuilder b(catalog);
    std::vector<TrendId> ids;
    for (std::size_t i = 0; i < pool; ++i) ids.push_back(b.intern((i % 3 == 0 ? "#t" : "topic ") + std::to_string(i)));
    for (std::size_t t = 0; t < ticks; ++t) {
        for (LocationIndex loc = 0; loc < catalog.size(); ++loc) {
            if (uniform01(rng) < 0.3) continue;
            std::vector<TrendId> pick = ids;
            for (std::size_t i = pick.size(); i > 1; --i) std::swap(pick[i - 1], pick[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
            const auto n = 1 + static_cast<std::size_t>(uniform01(rng) * std::min<double>(10, static_cast<double>(pool)));
            TrendSnapshot s{loc, kT0 + static_cast<long>(t) * kDefaultTickInterval, {}};
            for (std::size_t k = 0; k < std::min<std::size_t>(n, pick.size()); ++k) {
                s.entries.push_back({pick[k], static_cast<int>(k) + 1, promoted && uniform01(rng) < 0.1});
            }
            b.add_snapshot(std::move(s));
        }
    }
    return std::move(b).build();
}

// Standard normal draw for test fixtures.
inline double normal(Rng& rng, double mu = 0.0, double sigma = 1.0) {
    const double u1 = uniform01(rng), u2 = uniform01(rng);
    return mu + sigma * std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace tft
