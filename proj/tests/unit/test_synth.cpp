#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "support.hpp"
#include "trendflow/backbone.hpp"
#include "trendflow/depnet.hpp"
#include "trendflow/log_io.hpp"
#include "trendflow/setters.hpp"
#include "trendflow/stats.hpp"
#include "trendflow/synth.hpp"

using namespace tft;

namespace {

std::int64_t tick_of(const GeneratorConfig& cfg, Timestamp ts) { return (ts - cfg.start) / cfg.tick_interval; }

const SyntheticData& default_data() {
    static const SyntheticData data = [] {
        GeneratorConfig cfg;
        cfg.seed = 7;
        return generate(cfg);
    }();
    return data;
}

}  // namespace

TEST_CASE("presets and validation") {
    CHECK_NOTHROW(GeneratorConfig{}.validate());
    const auto small = generator_preset("small");
    CHECK(small.n_locations == 12);
    CHECK(small.n_hubs == 3);
    CHECK_THROWS_AS(generator_preset("huge"), std::invalid_argument);

    GeneratorConfig bad;
    bad.n_hubs = 64;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.p_local = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.n_clusters = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = {};
    bad.lifetime_sigma = -1;
    CHECK_THROWS_AS(generate(bad), std::invalid_argument);
}

TEST_CASE("overloaded configs are infeasible") {
    auto cfg = generator_preset("small");
    cfg.n_trends = 20000;
    CHECK_THROWS_AS(generate(cfg), std::invalid_argument);
}

TEST_CASE("config JSON round trip") {
    auto cfg = generator_preset("small");
    cfg.seed = 99;
    cfg.p_local = 0.5;
    const auto back = config_from_json(nlohmann::json::parse(config_to_json(cfg).dump()));
    CHECK(config_to_json(back) == config_to_json(cfg));
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"colour", 3}}), std::invalid_argument);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), std::invalid_argument);
    const auto partial = config_from_json(nlohmann::json{{"seed", 5}}, generator_preset("small"));
    CHECK(partial.seed == 5);
    CHECK(partial.n_locations == 12);
}

TEST_CASE("generation is deterministic per seed") {
    auto cfg = generator_preset("small");
    cfg.seed = 3;
    const auto a = generate(cfg), b = generate(cfg);
    CHECK(a.log == b.log);
    std::ostringstream sa, sb;
    write_log(sa, a.log, LogFormat::jsonl);
    write_log(sb, b.log, LogFormat::jsonl);
    CHECK(sa.str() == sb.str());
    CHECK(truth_to_json(a.truth, a.log, cfg) == truth_to_json(b.truth, b.log, cfg));
    cfg.seed = 4;
    CHECK_FALSE(generate(cfg).log == a.log);
}

TEST_CASE("layout and capacity") {
    auto cfg = generator_preset("small");
    const auto d = generate(cfg);
    const auto& cat = d.log.catalog();
    REQUIRE(cat.size() == 13);
    CHECK(cat[12].is_country_level);
    CHECK(d.truth.hubs().size() == 3);
    std::map<std::size_t, int> per_cluster;
    for (auto loc : cat.city_indices()) ++per_cluster[d.truth.locations[loc].cluster];
    CHECK(per_cluster.size() == 3);
    for (auto [c, n] : per_cluster) CHECK(n == 4);
    for (const auto& s : d.log.snapshots()) {
        CHECK(s.entries.size() <= 10);
        CHECK_FALSE(s.entries.empty());
        for (std::size_t r = 0; r < s.entries.size(); ++r) CHECK(s.entries[r].rank == static_cast<int>(r) + 1);
        for (std::size_t r = 1; r < s.entries.size(); ++r) CHECK_FALSE(s.entries[r].promoted);
    }
}

TEST_CASE("ground truth matches the emitted log") {
    auto cfg = generator_preset("small");
    cfg.seed = 11;
    const auto d = generate(cfg);
    // every realized tick is in the log
    std::set<std::tuple<TrendId, LocationIndex, std::int64_t>> emitted;
    for (const auto& s : d.log.snapshots())
        for (const auto& e : s.entries)
            if (!e.promoted) emitted.insert({e.trend, s.location, tick_of(cfg, s.timestamp)});
    std::size_t realized = 0;
    for (const auto& t : d.truth.trends) {
        for (const auto& p : t.presence)
            for (const auto& iv : p.realized)
                for (auto k = iv.begin; k < iv.end; ++k) {
                    ++realized;
                    CHECK(emitted.count({t.id, p.location, k}) == 1);
                }
        if (t.country_trending()) {
            const auto country = *d.log.catalog().country_index();
            bool found = false;
            for (const auto& p : t.presence)
                if (p.location == country && !p.realized.empty()) found = p.realized.front().begin == *t.country_onset;
            CHECK(found);
        }
    }
    // and nothing else is
    CHECK(realized == emitted.size());
}

TEST_CASE("a single local trend stays inside its cluster") {
    auto cfg = generator_preset("small");
    cfg.n_trends = 1;
    cfg.p_local = 1.0;
    cfg.promoted_rate = 0.0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        cfg.seed = seed;
        const auto d = generate(cfg);
        REQUIRE(d.truth.trends.size() == 1);
        const auto& t = d.truth.trends[0];
        CHECK(t.cls == TrendClass::local);
        CHECK_FALSE(t.country_trending());
        const auto cluster = d.truth.locations[t.origin].cluster;
        for (auto loc : t.spread()) CHECK(d.truth.locations[loc].cluster == cluster);
        for (const auto& s : d.log.snapshots()) CHECK_FALSE(d.log.catalog()[s.location].is_country_level);
    }
}

TEST_CASE("default configuration plants the expected structure") {
    const auto& d = default_data();
    const auto ep = build_episodes(filter_promoted(d.log));

    SUBCASE("spread is bimodal") {
        const auto hist = spread_histogram(ep);
        double total = 0, low = 0, high = 0;
        for (std::size_t k = 0; k < hist.size(); ++k) {
            total += static_cast<double>(hist[k]);
            if (k <= 3) low += static_cast<double>(hist[k]);
            if (k >= 60) high += static_cast<double>(hist[k]);
        }
        CHECK(low / total > 0.25);
        CHECK(high / total > 0.15);
        double middle = 0;
        for (std::size_t k = 20; k < 40; ++k) middle += static_cast<double>(hist[k]);
        CHECK(middle / total < 0.05);
    }
    SUBCASE("hubs lead the country") {
        const auto counts = count_before_after(ep, WeightingMode::uniform);
        const auto hubs = d.truth.hubs();
        REQUIRE(hubs.size() == 11);
        double weakest_hub = 1e300, strongest_other = -1;
        for (const auto& c : counts.cities) {
            const bool hub = std::find(hubs.begin(), hubs.end(), c.location) != hubs.end();
            if (hub) weakest_hub = std::min(weakest_hub, c.n_before);
            else strongest_other = std::max(strongest_other, c.n_before);
        }
        CHECK(weakest_hub > strongest_other);
    }
    SUBCASE("dependence backbone is connected at a moderate alpha") {
        const auto net = build_dependence_network(ep, WeightingMode::uniform);
        CHECK(net.node_count() == 63);
        const auto tuned = tune_alpha(net);
        CHECK(tuned.alpha >= 0.1);
        CHECK(tuned.alpha <= 0.5);
        CHECK(tuned.backbone.connected());
    }
}

TEST_CASE("truth JSON layout") {
    auto cfg = generator_preset("small");
    const auto d = generate(cfg);
    const auto j = truth_to_json(d.truth, d.log, cfg);
    CHECK(j.contains("config"));
    CHECK(j["locations"].size() == 13);
    CHECK(j["locations"].back()["country_level"] == true);
    CHECK(j["trends"].size() == d.truth.trends.size());
    const auto& t0 = j["trends"][0];
    for (const char* key : {"trend", "class", "origin", "onset", "lifetime_ticks", "country_onset", "presence"})
        CHECK(t0.contains(key));
}
