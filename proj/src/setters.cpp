#include "trendflow/setters.hpp"

#include <algorithm>
#include <stdexcept>

namespace trendflow {

KindFilter kind_filter_from_string(std::string_view name) {
    if (name == "hashtag") return KindFilter::hashtag;
    if (name == "phrase") return KindFilter::phrase;
    if (name == "both") return KindFilter::both;
    throw std::invalid_argument("unknown kind filter '" + std::string(name) + "'");
}

bool accepts(KindFilter filter, TrendKind kind) {
    switch (filter) {
        case KindFilter::hashtag: return kind == TrendKind::hashtag;
        case KindFilter::phrase: return kind == TrendKind::phrase;
        case KindFilter::both: return true;
    }
    return true;
}

std::vector<Point2> SetterFollowerCounts::points() const {
    std::vector<Point2> out;
    out.reserve(cities.size());
    for (const auto& c : cities) out.push_back({c.n_before, c.n_after});
    return out;
}

SetterFollowerCounts count_before_after(const TrendEpisodeTable& episodes, WeightingMode mode, Duration lag_halflife,
                                        KindFilter kinds) {
    if (mode == WeightingMode::lag_discounted && lag_halflife.count() <= 0)
        throw std::invalid_argument("lag half-life must be positive");
    SetterFollowerCounts out;
    out.mode = mode;
    const auto cities = episodes.catalog().city_indices();
    std::vector<std::size_t> slot(episodes.catalog().size(), SIZE_MAX);
    for (std::size_t k = 0; k < cities.size(); ++k) {
        slot[cities[k]] = k;
        out.cities.push_back({cities[k], 0.0, 0.0});
    }
    if (!episodes.catalog().country_index()) {
        out.warnings.emplace_back("catalog has no country-level location; no counts");
        return out;
    }

    std::size_t without_cities = 0;
    for (const auto& country : episodes.country_rows()) {
        if (!accepts(kinds, episodes.trend_name(country.trend).kind)) continue;
        ++out.country_trends;
        const auto rows = episodes.rows_for(country.trend);
        if (rows.empty()) {
            ++without_cities;
            continue;
        }
        const Timestamp onset = country.first_seen;

        Timestamp earliest = rows.front().first_seen;
        std::size_t at_earliest = 0;
        for (const auto& r : rows) earliest = std::min(earliest, r.first_seen);
        for (const auto& r : rows) at_earliest += r.first_seen == earliest;

        for (const auto& r : rows) {
            auto& c = out.cities[slot[r.location]];
            if (r.first_seen > onset) {
                c.n_after += 1.0;
            } else if (r.first_seen < onset) {
                switch (mode) {
                    case WeightingMode::uniform: c.n_before += 1.0; break;
                    case WeightingMode::lag_discounted: c.n_before += lag_discount(r.first_seen - earliest, lag_halflife); break;
                    case WeightingMode::initiator_only:
                        if (r.first_seen == earliest && at_earliest == 1) c.n_before += 1.0;
                        break;
                }
            }
        }
    }
    if (without_cities > 0) {
        out.warnings.push_back(std::to_string(without_cities) +
                               " country-level trend(s) never trended in any city; ignored");
    }
    return out;
}

std::string_view to_string(CityRole role) {
    return role == CityRole::trendsetter ? "trendsetter" : "follower";
}

std::vector<std::size_t> CityLabeling::trendsetters() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < roles.size(); ++i) {
        if (roles[i] == CityRole::trendsetter) out.push_back(i);
    }
    return out;
}

CityLabeling classify_cities(const SetterFollowerCounts& counts, const GmmModel& gmm) {
    if (gmm.mixture.size() == 0) throw std::invalid_argument("mixture has no components");
    CityLabeling out;
    const auto points = counts.points();
    for (auto p : points) out.component.push_back(gmm.mixture.argmax(p));
    out.roles.assign(points.size(), std::nullopt);

    if (gmm.mixture.size() != 2) {
        out.warnings.push_back("selected K = " + std::to_string(gmm.mixture.size()) +
                               "; labels are per component without setter/follower roles");
        return out;
    }
    const auto& comps = gmm.mixture.components();
    auto ratio = [](const GaussianComponent& c) { return c.mean.x / (c.mean.y + 1.0); };
    // ties go to component 0
    const std::size_t setter = ratio(comps[1]) > ratio(comps[0]) ? 1 : 0;
    out.setter_component = setter;
    for (std::size_t i = 0; i < points.size(); ++i) {
        out.roles[i] = out.component[i] == setter ? CityRole::trendsetter : CityRole::follower;
    }
    return out;
}

ClassRegressions fit_class_regressions(const SetterFollowerCounts& counts, const GmmModel& gmm) {
    ClassRegressions out;
    const auto labeling = classify_cities(counts, gmm);
    out.warnings = labeling.warnings;
    if (!labeling.has_roles()) return out;

    for (CityRole role : {CityRole::trendsetter, CityRole::follower}) {
        std::vector<double> x, y;
        for (std::size_t i = 0; i < counts.cities.size(); ++i) {
            if (labeling.roles[i] != role) continue;
            x.push_back(counts.cities[i].n_before);
            y.push_back(counts.cities[i].n_after);
        }
        if (x.size() < 3) {
            out.warnings.push_back(std::string(to_string(role)) + " class has fewer than 3 cities; regression skipped");
            continue;
        }
        try {
            out.fits.push_back({role, ordinary_least_squares(x, y)});
        } catch (const std::invalid_argument& e) {
            out.warnings.push_back(std::string(to_string(role)) + " regression skipped: " + e.what());
        }
    }
    return out;
}

}  // namespace trendflow
