#include <doctest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"
#include "trendflow/stats.hpp"

using namespace tft;
using doctest::Approx;

namespace {

// Shannon entropy in nats, written out independently of the library.
double entropy_oracle(const std::vector<double>& t) {
    double total = 0;
    for (double v : t) total += v;
    double s = 0;
    for (double v : t) {
        if (v > 0) s -= (v / total) * std::log(v / total);
    }
    return s;
}

// Appearances for a trend with the given number of ticks per city.
void add_trend(std::vector<Appearance>& apps, const std::string& trend, const std::vector<std::pair<std::string, int>>& ticks,
               long start = 0) {
    for (const auto& [loc, n] : ticks)
        for (int k = 0; k < n; ++k) apps.push_back({trend, loc, start + 10L * k});
}

}  // namespace

TEST_CASE("spread histogram") {
    SUBCASE("one trend in one city") {
        const auto cat = make_catalog({"A", "B", "C"});
        const auto hist = spread_histogram(make_episodes(cat, {{"#x", "B", 0}}));
        REQUIRE(hist.size() == 4);
        CHECK(hist[1] == 1);
        CHECK(std::accumulate(hist.begin(), hist.end(), std::size_t{0}) == 1);
    }
    SUBCASE("every trend in all 63 cities") {
        const auto names = city_names(63);
        const auto cat = make_catalog(names);
        std::vector<Appearance> apps;
        for (int t = 0; t < 5; ++t)
            for (const auto& n : names) apps.push_back({"#t" + std::to_string(t), n, 10L * t});
        const auto hist = spread_histogram(make_episodes(cat, apps));
        REQUIRE(hist.size() == 64);
        CHECK(hist[63] == 5);
        CHECK(std::accumulate(hist.begin(), hist.end(), std::size_t{0}) == 5);
    }
    SUBCASE("empty table gives an empty histogram") {
        CHECK(spread_histogram(TrendEpisodeTable{}).empty());
    }
    SUBCASE("mass is conserved on random logs") {
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto ep = build_episodes(random_log(seed, 7, 10, 50));
            const auto hist = spread_histogram(ep);
            CHECK(hist[0] == 0);
            CHECK(std::accumulate(hist.begin(), hist.end(), std::size_t{0}) == ep.city_trends().size());
        }
    }
}

TEST_CASE("trend entropy examples") {
    const auto cat = make_catalog({"A", "B", "C", "D"});
    std::vector<Appearance> apps;
    add_trend(apps, "#single", {{"A", 3}});
    add_trend(apps, "#even", {{"A", 2}, {"B", 2}, {"C", 2}, {"D", 2}});
    add_trend(apps, "#skew", {{"A", 3}, {"B", 1}});
    const auto ep = make_episodes(cat, apps);

    CHECK(trend_entropy(ep, ep.find_trend("#single").value()) == 0.0);
    CHECK(trend_entropy(ep, ep.find_trend("#even").value()) == Approx(std::log(4.0)).epsilon(1e-12));
    CHECK(trend_entropy(ep, ep.find_trend("#even").value()) == Approx(1.3863).epsilon(1e-4));
    const double skew = trend_entropy(ep, ep.find_trend("#skew").value());
    CHECK(skew == Approx(entropy_oracle({30, 10})).epsilon(1e-12));
    CHECK(skew == Approx(0.5623).epsilon(1e-4));
}

TEST_CASE("trend entropy of an unknown trend is an error") {
    const auto cat = make_catalog({"A"});
    const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#c", "us", 0}});
    CHECK_THROWS_AS(trend_entropy(ep, 999), std::out_of_range);
    CHECK_THROWS_AS(trend_entropy(ep, ep.find_trend("#c").value()), std::out_of_range);
}

TEST_CASE("entropy properties on random duration vectors") {
    Rng rng(2024);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t n = 1 + static_cast<std::size_t>(uniform01(rng) * 12);
        std::vector<double> t(n);
        for (auto& v : t) v = 1 + std::floor(uniform01(rng) * 50);
        const double s = entropy_of(t);

        CHECK(s >= 0.0);
        CHECK(s <= std::log(static_cast<double>(n)) + 1e-12);
        CHECK(s == Approx(entropy_oracle(t)).epsilon(1e-12));

        auto perm = t;
        std::reverse(perm.begin(), perm.end());
        std::rotate(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n / 2), perm.end());
        CHECK(entropy_of(perm) == Approx(s).epsilon(1e-12));

        auto scaled = t;
        for (auto& v : scaled) v *= 7.25;
        CHECK(entropy_of(scaled) == Approx(s).epsilon(1e-12));

        const bool all_equal = std::all_of(t.begin(), t.end(), [&](double v) { return v == t[0]; });
        CHECK((std::abs(s - std::log(static_cast<double>(n))) < 1e-12) == all_equal);
        CHECK((s == 0.0) == (n == 1));
    }
    CHECK(entropy_of({0.0, 5.0, 0.0}) == 0.0);
    CHECK(entropy_of({2.0, 0.0, 2.0}) == Approx(std::log(2.0)));
}

TEST_CASE("spread stats use the per-location average lifetime") {
    const auto cat = make_catalog({"A", "B"});
    std::vector<Appearance> apps;
    add_trend(apps, "#x", {{"A", 3}, {"B", 1}});
    const auto spreads = spread_stats(make_episodes(cat, apps));
    REQUIRE(spreads.size() == 1);
    CHECK(spreads[0].n_locations == 2);
    CHECK(spreads[0].lifetime_minutes == Approx(20.0));
}

TEST_CASE("lifetime curves") {
    SUBCASE("identical lifetimes give a flat curve with zero error") {
        const auto names = city_names(6);
        const auto cat = make_catalog(names);
        std::vector<Appearance> apps;
        for (int t = 0; t < 12; ++t) {
            std::vector<std::pair<std::string, int>> ticks;
            for (int c = 0; c <= t % 6; ++c) ticks.push_back({names[static_cast<std::size_t>(c)], 2});
            add_trend(apps, "#t" + std::to_string(t), ticks, 100L * t);
        }
        const auto ep = make_episodes(cat, apps);
        for (auto axis : {CurveAxis::n_locations, CurveAxis::entropy}) {
            const auto curve = lifetime_vs(axis, ep);
            REQUIRE(curve.size() >= 1);
            std::size_t total = 0;
            for (std::size_t i = 0; i < curve.size(); ++i) {
                CHECK(curve.mean[i] == Approx(20.0));
                CHECK(curve.std_error[i] == 0.0);
                CHECK(curve.count[i] >= 1);
                total += curve.count[i];
            }
            CHECK(total == 12);
        }
        CHECK(lifetime_vs(CurveAxis::n_locations, ep).size() == 6);
    }
    SUBCASE("a single trend gives one bin with zero error") {
        const auto cat = make_catalog({"A", "B"});
        const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#x", "B", 0}});
        for (auto axis : {CurveAxis::n_locations, CurveAxis::entropy}) {
            const auto curve = lifetime_vs(axis, ep);
            REQUIRE(curve.size() == 1);
            CHECK(curve.std_error[0] == 0.0);
            CHECK(curve.count[0] == 1);
        }
    }
    SUBCASE("entropy bins are equal width over the observed range") {
        // two trends at every bin centre plus one at each end of the range
        std::vector<TrendSpread> spreads;
        for (int i = 0; i < 20; ++i) {
            spreads.push_back({0, 2, 10.0, 0.1 * i + 0.05});
            spreads.push_back({0, 2, 11.0, 0.1 * i + 0.05});
        }
        spreads.push_back({0, 2, 10.5, 0.0});
        spreads.push_back({0, 2, 10.5, 2.0});
        const auto curve = lifetime_vs(CurveAxis::entropy, spreads);
        REQUIRE(curve.size() == 20);
        CHECK(curve.x.front() == Approx(0.05));
        CHECK(curve.x.back() == Approx(1.95));
        CHECK(curve.count.front() == 3);
        CHECK(curve.count.back() == 3);  // top edge joins the last bin
        CHECK(curve.count[7] == 2);
        CHECK(curve.mean[7] == Approx(10.5));
        CHECK(curve.std_error[7] == Approx(0.5));
        CHECK(curve.std_error[0] == Approx(0.5 / std::sqrt(3.0)));
    }
}

TEST_CASE("lifetime CDF") {
    using namespace std::chrono_literals;
    const auto cat = make_catalog({"A", "B", "C"});
    SUBCASE("one ten-minute trend") {
        const auto cdf = lifetime_cdf(make_episodes(cat, {{"#x", "A", 0}}));
        CHECK(cdf.at(20min) == 1.0);
        CHECK(cdf(9.99) == 0.0);
    }
    SUBCASE("ten, ten and four hundred minutes") {
        std::vector<Appearance> apps;
        add_trend(apps, "#a", {{"A", 1}});
        add_trend(apps, "#b", {{"B", 1}});
        add_trend(apps, "#c", {{"C", 40}});
        const auto ep = make_episodes(cat, apps);
        const auto cdf = lifetime_cdf(ep);
        CHECK(cdf.at(20min) == Approx(2.0 / 3.0));
        CHECK(cdf.at(400min) == 1.0);
        CHECK(cdf.at(399min) == Approx(2.0 / 3.0));
    }
    SUBCASE("run-length view splits re-entries") {
        const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#x", "A", 10}, {"#x", "A", 30}});
        const auto runs = run_length_cdf(ep);
        CHECK(runs.sorted() == std::vector<double>{10.0, 20.0});
        CHECK(lifetime_cdf(ep).sorted() == std::vector<double>{30.0});
    }
}
