#pragma once

// Trendsetter / trend-follower analysis: how often each city shows a
// country-level trend before the country does, and how often after.

#include <optional>
#include <string>
#include <vector>

#include "trendflow/depnet.hpp"
#include "trendflow/episodes.hpp"
#include "trendflow/gmm.hpp"
#include "trendflow/statistics.hpp"

namespace trendflow {

enum class KindFilter { hashtag, phrase, both };

KindFilter kind_filter_from_string(std::string_view name);
bool accepts(KindFilter filter, TrendKind kind);

struct CityCounts {
    LocationIndex location = 0;
    double n_before = 0.0;
    double n_after = 0.0;
};

struct SetterFollowerCounts {
    WeightingMode mode = WeightingMode::uniform;
    std::vector<CityCounts> cities;  // catalog city order
    std::size_t country_trends = 0;  // country-level trends that passed the kind filter
    std::vector<std::string> warnings;

    std::vector<Point2> points() const;  // (n_before, n_after) per city
};

// For every country-level trend with country onset T*: a city whose first
// appearance precedes T* earns before-credit, one that follows T* earns an
// after-count, ties earn nothing. Before-credit is 1 (uniform), 2^(-lag/halflife)
// with the lag measured from the trend's earliest city (lag_discounted), or 1
// for the unique earliest city only (initiator_only).
SetterFollowerCounts count_before_after(const TrendEpisodeTable& episodes, WeightingMode mode,
                                        Duration lag_halflife = kDefaultLagHalflife,
                                        KindFilter kinds = KindFilter::both);

enum class CityRole { trendsetter, follower };

std::string_view to_string(CityRole role);

struct CityLabeling {
    std::vector<std::size_t> component;        // per city
    std::optional<std::size_t> setter_component;
    std::vector<std::optional<CityRole>> roles;  // empty optionals unless two components
    std::vector<std::string> warnings;

    bool has_roles() const { return setter_component.has_value(); }
    std::vector<std::size_t> trendsetters() const;  // indices into the counts' city list
};

// Cities go to their most responsible component. With two components the one
// whose mean has the larger n_before / (n_after + 1) is the trendsetter class.
CityLabeling classify_cities(const SetterFollowerCounts& counts, const GmmModel& gmm);

struct RegressionFit {
    CityRole role = CityRole::follower;
    LinearFit fit;
};

struct ClassRegressions {
    std::vector<RegressionFit> fits;
    std::vector<std::string> warnings;
};

// OLS of n_after on n_before within each class; classes with fewer than three
// cities are skipped with a warning.
ClassRegressions fit_class_regressions(const SetterFollowerCounts& counts, const GmmModel& gmm);

}  // namespace trendflow
