#include "trendflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace trendflow {

namespace {

double minutes(const TrendEpisodeTable& t, std::int64_t ticks) {
    return static_cast<double>(ticks * t.tick_interval().count()) / 60.0;
}

struct Moments {
    std::size_t n = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        ++n;
        sum += v;
        sum_sq += v * v;
    }
    double mean() const { return sum / static_cast<double>(n); }
    double std_error() const {
        if (n < 2) return 0.0;
        const double m = mean();
        const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1));
        return std::sqrt(var / static_cast<double>(n));
    }
};

}  // namespace

double entropy_of(const std::vector<double>& durations) {
    double total = 0.0;
    for (double d : durations) {
        if (d < 0.0) throw std::invalid_argument("negative duration");
        total += d;
    }
    if (total <= 0.0) return 0.0;
    double s = 0.0;
    for (double d : durations) {
        if (d <= 0.0) continue;
        const double p = d / total;
        s -= p * std::log(p);
    }
    return std::max(0.0, s);
}

double trend_entropy(const TrendEpisodeTable& episodes, TrendId trend) {
    const auto rows = episodes.rows_for(trend);
    if (rows.empty()) throw std::out_of_range("trend has no city episodes");
    std::vector<double> durations;
    durations.reserve(rows.size());
    for (const auto& r : rows) durations.push_back(static_cast<double>(r.ticks));
    return entropy_of(durations);
}

std::vector<TrendSpread> spread_stats(const TrendEpisodeTable& episodes) {
    std::vector<TrendSpread> out;
    out.reserve(episodes.city_trends().size());
    std::vector<double> durations;
    for (TrendId id : episodes.city_trends()) {
        const auto rows = episodes.rows_for(id);
        durations.clear();
        std::int64_t total = 0;
        for (const auto& r : rows) {
            durations.push_back(static_cast<double>(r.ticks));
            total += r.ticks;
        }
        TrendSpread s;
        s.trend = id;
        s.n_locations = static_cast<int>(rows.size());
        s.lifetime_minutes = minutes(episodes, total) / static_cast<double>(rows.size());
        s.entropy = entropy_of(durations);
        out.push_back(s);
    }
    return out;
}

std::vector<std::size_t> spread_histogram(const TrendEpisodeTable& episodes) {
    if (episodes.empty()) return {};
    const std::size_t cities = episodes.catalog().city_indices().size();
    std::vector<std::size_t> hist(cities + 1, 0);
    for (TrendId id : episodes.city_trends()) {
        const std::size_t n = episodes.rows_for(id).size();
        if (n >= hist.size()) hist.resize(n + 1, 0);
        ++hist[n];
    }
    return hist;
}

BinnedCurve lifetime_vs(CurveAxis axis, const std::vector<TrendSpread>& spreads, const BinningConfig& binning) {
    BinnedCurve curve;
    if (spreads.empty()) return curve;

    if (axis == CurveAxis::n_locations) {
        std::map<int, Moments> bins;
        for (const auto& s : spreads) bins[s.n_locations].add(s.lifetime_minutes);
        for (const auto& [n, m] : bins) {
            curve.x.push_back(static_cast<double>(n));
            curve.mean.push_back(m.mean());
            curve.std_error.push_back(m.std_error());
            curve.count.push_back(m.n);
        }
        return curve;
    }

    if (binning.entropy_bins < 1) throw std::invalid_argument("entropy_bins must be >= 1");
    double lo = spreads.front().entropy;
    double hi = lo;
    for (const auto& s : spreads) {
        lo = std::min(lo, s.entropy);
        hi = std::max(hi, s.entropy);
    }
    const int nbins = hi > lo ? binning.entropy_bins : 1;
    const double width = hi > lo ? (hi - lo) / nbins : 1.0;
    std::vector<Moments> bins(static_cast<std::size_t>(nbins));
    for (const auto& s : spreads) {
        int b = hi > lo ? static_cast<int>((s.entropy - lo) / width) : 0;
        b = std::clamp(b, 0, nbins - 1);
        bins[static_cast<std::size_t>(b)].add(s.lifetime_minutes);
    }
    for (int b = 0; b < nbins; ++b) {
        const auto& m = bins[static_cast<std::size_t>(b)];
        if (m.n == 0) continue;
        curve.x.push_back(hi > lo ? lo + (b + 0.5) * width : lo);
        curve.mean.push_back(m.mean());
        curve.std_error.push_back(m.std_error());
        curve.count.push_back(m.n);
    }
    return curve;
}

BinnedCurve lifetime_vs(CurveAxis axis, const TrendEpisodeTable& episodes, const BinningConfig& binning) {
    return lifetime_vs(axis, spread_stats(episodes), binning);
}

LifetimeCdf::LifetimeCdf(std::vector<double> lifetimes_minutes) : sorted_(std::move(lifetimes_minutes)) {
    if (sorted_.empty()) throw std::invalid_argument("lifetime CDF needs at least one trend");
    std::sort(sorted_.begin(), sorted_.end());
}

double LifetimeCdf::operator()(double minutes) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), minutes);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

LifetimeCdf lifetime_cdf(const TrendEpisodeTable& episodes) {
    std::vector<double> lifetimes;
    for (const auto& s : spread_stats(episodes)) lifetimes.push_back(s.lifetime_minutes);
    return LifetimeCdf(std::move(lifetimes));
}

LifetimeCdf run_length_cdf(const TrendEpisodeTable& episodes) {
    std::vector<double> runs;
    for (const auto& r : episodes.rows()) {
        for (auto len : r.runs) runs.push_back(minutes(episodes, len));
    }
    return LifetimeCdf(std::move(runs));
}

}  // namespace trendflow
