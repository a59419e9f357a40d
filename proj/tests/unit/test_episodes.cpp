#include <doctest.h>

#include <map>

#include "support.hpp"

using namespace tft;
using namespace std::chrono_literals;

TEST_CASE("trend seen at 0, 10 and 20 minutes lasts 30 minutes from 0") {
    const auto cat = make_catalog({"A", "B"});
    const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#x", "A", 10}, {"#x", "A", 20}});
    REQUIRE(ep.rows().size() == 1);
    const auto& row = ep.rows()[0];
    CHECK(row.first_seen == at_min(0));
    CHECK(ep.duration(row) == 30min);
    CHECK(row.runs == std::vector<std::int64_t>{3});
}

TEST_CASE("a single appearance counts one tick") {
    const auto cat = make_catalog({"A"});
    const auto ep = make_episodes(cat, {{"#x", "A", 40}});
    CHECK(ep.duration(ep.rows()[0]) == 10min);
    CHECK(ep.rows()[0].first_seen == at_min(40));
}

TEST_CASE("trend absent from every city has no city row") {
    const auto cat = make_catalog({"A"});
    const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#only_country", "us", 0}});
    const auto id = ep.find_trend("#only_country").value();
    CHECK(ep.rows_for(id).empty());
    CHECK(ep.country_row(id) != nullptr);
    CHECK(ep.city_trends() == std::vector<TrendId>{ep.find_trend("#x").value()});
}

TEST_CASE("gaps split runs but duration counts total presence") {
    const auto cat = make_catalog({"A"});
    const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#x", "A", 10}, {"#x", "A", 40}, {"#x", "A", 60}, {"#x", "A", 70}});
    const auto& row = ep.rows()[0];
    CHECK(row.ticks == 5);
    CHECK(row.runs == std::vector<std::int64_t>{2, 1, 2});
}

TEST_CASE("country rows are kept apart") {
    const auto cat = make_catalog({"A", "B"});
    const auto ep = make_episodes(cat, {{"#x", "A", 0}, {"#x", "us", 10}, {"#x", "us", 20}, {"#x", "B", 30}});
    CHECK(ep.rows().size() == 2);
    REQUIRE(ep.country_rows().size() == 1);
    CHECK(ep.country_rows()[0].first_seen == at_min(10));
    CHECK(ep.country_rows()[0].ticks == 2);
}

TEST_CASE("build_episodes refuses unfiltered promoted entries") {
    const auto log = random_log(5, 3, 30, 20, true);
    CHECK_THROWS_AS(build_episodes(log), std::invalid_argument);
    CHECK_NOTHROW(build_episodes(filter_promoted(log)));
}

TEST_CASE("episode table does not depend on snapshot arrival order") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto log = random_log(seed, 5, 20, 30);
        const auto base = build_episodes(log);

        auto snaps = log.snapshots();
        Rng rng(seed * 77);
        for (std::size_t i = snaps.size(); i > 1; --i) std::swap(snaps[i - 1], snaps[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i))]);
        LogBuilder b(log.catalog());
        for (const auto& name : log.trends()) b.intern(name.text);
        for (auto& s : snaps) b.add_snapshot(s);
        const auto shuffled = build_episodes(std::move(b).build());

        REQUIRE(shuffled.rows().size() == base.rows().size());
        for (std::size_t i = 0; i < base.rows().size(); ++i) CHECK(shuffled.rows()[i] == base.rows()[i]);
        REQUIRE(shuffled.country_rows().size() == base.country_rows().size());
        for (std::size_t i = 0; i < base.country_rows().size(); ++i) CHECK(shuffled.country_rows()[i] == base.country_rows()[i]);
    }
}

TEST_CASE("summed durations equal tick times total appearances") {
    for (std::uint64_t seed = 11; seed <= 20; ++seed) {
        const auto log = random_log(seed, 6, 25, 40);
        std::map<TrendId, std::int64_t> appearances;
        for (const auto& s : log.snapshots())
            for (const auto& e : s.entries) ++appearances[e.trend];
        const auto ep = build_episodes(log);
        std::map<TrendId, Duration> summed;
        for (const auto& r : ep.rows()) summed[r.trend] += ep.duration(r);
        for (const auto& r : ep.country_rows()) summed[r.trend] += ep.duration(r);
        REQUIRE(summed.size() == appearances.size());
        for (const auto& [id, n] : appearances) CHECK(summed[id] == kDefaultTickInterval * n);
    }
}
