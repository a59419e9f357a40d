#pragma once

// Spread, lifetime and entropy statistics over a trend episode table.
// Entropies are in nats. Lifetimes are per-location averages: the summed
// trending time of a trend divided by the number of cities it reached.

#include <cstddef>
#include <vector>

#include "trendflow/episodes.hpp"

namespace trendflow {

struct TrendSpread {
    TrendId trend = 0;
    int n_locations = 0;
    double lifetime_minutes = 0.0;
    double entropy = 0.0;
};

// One entry per trend with at least one city row, ascending trend id.
std::vector<TrendSpread> spread_stats(const TrendEpisodeTable& episodes);

// Index n holds the number of trends seen in exactly n cities, for n in
// 1..number of catalog cities. Index 0 is always zero. Empty for an empty table.
std::vector<std::size_t> spread_histogram(const TrendEpisodeTable& episodes);

// Shannon entropy of the trending-time shares across cities.
// Throws std::out_of_range for a trend without city rows.
double trend_entropy(const TrendEpisodeTable& episodes, TrendId trend);

// Same quantity from raw durations; zero durations contribute nothing.
double entropy_of(const std::vector<double>& durations);

struct BinnedCurve {
    std::vector<double> x;       // bin centers
    std::vector<double> mean;    // mean lifetime (minutes)
    std::vector<double> std_error; // standard error, 0 for single-member bins
    std::vector<std::size_t> count;

    std::size_t size() const noexcept { return x.size(); }
};

enum class CurveAxis { n_locations, entropy };

struct BinningConfig {
    int entropy_bins = 20;
};

// Mean lifetime per x-bin. For n_locations one bin per distinct integer
// value; for entropy equal-width bins over the observed range. Empty bins are
// omitted.
BinnedCurve lifetime_vs(CurveAxis axis, const TrendEpisodeTable& episodes, const BinningConfig& binning = {});
BinnedCurve lifetime_vs(CurveAxis axis, const std::vector<TrendSpread>& spreads, const BinningConfig& binning = {});

// Step CDF over per-trend lifetimes.
class LifetimeCdf {
public:
    explicit LifetimeCdf(std::vector<double> lifetimes_minutes);

    // Fraction of trends with lifetime <= the given number of minutes.
    double operator()(double minutes) const;
    double at(Duration d) const { return (*this)(static_cast<double>(d.count()) / 60.0); }
    const std::vector<double>& sorted() const noexcept { return sorted_; }

private:
    std::vector<double> sorted_;
};

LifetimeCdf lifetime_cdf(const TrendEpisodeTable& episodes);

// Contiguous-run view: CDF over the lengths of individual trending runs
// (a trend leaving and re-entering a city's list starts a new run).
LifetimeCdf run_length_cdf(const TrendEpisodeTable& episodes);

}  // namespace trendflow
