#include <doctest.h>

#include <cmath>
#include <map>

#include "support.hpp"
#include "trendflow/depnet.hpp"

using namespace tft;
using namespace std::chrono_literals;
using doctest::Approx;

namespace {

struct Fixture {
    LocationCatalog cat = make_catalog({"A", "B", "C", "D"});
    TrendEpisodeTable ep;
    explicit Fixture(const std::vector<Appearance>& apps) : ep(make_episodes(cat, apps)) {}

    std::size_t node(const std::string& id) const { return *cat.find(id); }
};

// First-seen minute per (trend, city), gathered straight from the appearances.
std::map<std::string, std::map<std::string, long>> first_seen(const std::vector<Appearance>& apps) {
    std::map<std::string, std::map<std::string, long>> out;
    for (const auto& a : apps) {
        if (a.loc == "us") continue;
        auto [it, inserted] = out[a.trend].try_emplace(a.loc, a.minute);
        if (!inserted) it->second = std::min(it->second, a.minute);
    }
    return out;
}

std::vector<Appearance> random_appearances(std::uint64_t seed, const std::vector<std::string>& cities, int trends) {
    Rng rng(seed);
    std::vector<Appearance> apps;
    for (int t = 0; t < trends; ++t) {
        for (const auto& c : cities) {
            if (uniform01(rng) < 0.4) continue;
            const long m = 10L * static_cast<long>(uniform01(rng) * 8) + 100L * t;
            apps.push_back({"#r" + std::to_string(t), c, m});
        }
    }
    return apps;
}

}  // namespace

TEST_CASE("precedence pairs for A@0, B@10, C@20") {
    const Fixture f({{"#x", "A", 0}, {"#x", "B", 10}, {"#x", "C", 20}});
    const auto A = f.node("A"), B = f.node("B"), C = f.node("C");

    SUBCASE("uniform counts every ordered pair") {
        const auto net = build_dependence_network(f.ep, WeightingMode::uniform);
        CHECK(net.weight(A, B) == 1.0);
        CHECK(net.weight(A, C) == 1.0);
        CHECK(net.weight(B, C) == 1.0);
        CHECK(net.arc_count() == 3);
        CHECK(net.weight(B, A) == 0.0);
    }
    SUBCASE("initiator_only credits the unique earliest city") {
        const auto net = build_dependence_network(f.ep, WeightingMode::initiator_only);
        CHECK(net.weight(A, B) == 1.0);
        CHECK(net.weight(A, C) == 1.0);
        CHECK(net.weight(B, C) == 0.0);
        CHECK(net.arc_count() == 2);
    }
    SUBCASE("lag_discounted halves per half-life of lag") {
        const auto net = build_dependence_network(f.ep, WeightingMode::lag_discounted, 3600s);
        CHECK(net.weight(A, B) == Approx(std::pow(2.0, -600.0 / 3600.0)));
        CHECK(net.weight(A, C) == Approx(std::pow(2.0, -1200.0 / 3600.0)));
        CHECK(net.weight(B, C) == Approx(std::pow(2.0, -600.0 / 3600.0)));
        const auto fast = build_dependence_network(f.ep, WeightingMode::lag_discounted, 600s);
        CHECK(fast.weight(A, C) == Approx(0.25));
    }
}

TEST_CASE("ties give no credit") {
    const Fixture f({{"#x", "A", 0}, {"#x", "B", 0}, {"#x", "C", 10}});
    const auto uni = build_dependence_network(f.ep, WeightingMode::uniform);
    CHECK(uni.weight(f.node("A"), f.node("B")) == 0.0);
    CHECK(uni.weight(f.node("B"), f.node("A")) == 0.0);
    CHECK(uni.weight(f.node("A"), f.node("C")) == 1.0);
    CHECK(uni.weight(f.node("B"), f.node("C")) == 1.0);
    SUBCASE("shared earliest first-seen voids the trend for initiator_only") {
        CHECK(build_dependence_network(f.ep, WeightingMode::initiator_only).arc_count() == 0);
    }
}

TEST_CASE("only first appearances count and the country is not a node") {
    const Fixture f({{"#x", "B", 0}, {"#x", "A", 10}, {"#x", "B", 20}, {"#x", "us", 10}});
    const auto net = build_dependence_network(f.ep, WeightingMode::uniform);
    CHECK(net.node_count() == 4);
    CHECK(net.weight(f.node("B"), f.node("A")) == 1.0);
    CHECK(net.weight(f.node("A"), f.node("B")) == 0.0);
}

TEST_CASE("network invariants on random episode tables") {
    const auto cities = std::vector<std::string>{"A", "B", "C", "D"};
    for (std::uint64_t seed = 1; seed <= 25; ++seed) {
        const auto apps = random_appearances(seed, cities, 20);
        const Fixture f(apps);
        const auto uni = build_dependence_network(f.ep, WeightingMode::uniform);
        const auto lag = build_dependence_network(f.ep, WeightingMode::lag_discounted);
        const auto ini = build_dependence_network(f.ep, WeightingMode::initiator_only);

        // oracle: strictly ordered pairs per trend
        std::map<std::pair<std::string, std::string>, double> expected;
        double pairs = 0;
        for (const auto& [trend, seen] : first_seen(apps)) {
            for (const auto& [a, ta] : seen)
                for (const auto& [b, tb] : seen)
                    if (ta < tb) {
                        expected[{a, b}] += 1;
                        pairs += 1;
                    }
        }
        CHECK(uni.total_weight() == pairs);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(uni.weight(i, i) == 0.0);
            for (std::size_t j = 0; j < 4; ++j) {
                const double w = uni.weight(i, j);
                CHECK(w == std::floor(w));
                CHECK(w == expected[{cities[i], cities[j]}]);
                CHECK(lag.weight(i, j) <= w);
                if (w > 0) CHECK(lag.weight(i, j) < w);
                CHECK(ini.weight(i, j) <= w);
            }
        }
        for (const auto& a : uni.arcs()) CHECK(a.weight > 0);
    }
}

TEST_CASE("a single trend never credits both directions") {
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        auto apps = random_appearances(seed, {"A", "B", "C", "D"}, 1);
        const Fixture f(apps);
        const auto net = build_dependence_network(f.ep, WeightingMode::uniform);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) CHECK((net.weight(i, j) == 0.0 || net.weight(j, i) == 0.0));
    }
}

TEST_CASE("relabeling cities permutes the weight matrix") {
    const auto apps = random_appearances(9, {"A", "B", "C", "D"}, 30);
    const Fixture f(apps);
    const auto net = build_dependence_network(f.ep, WeightingMode::uniform);

    // same data under a catalog listing the cities in reverse
    const auto rev = make_catalog({"D", "C", "B", "A"});
    const auto net2 = build_dependence_network(make_episodes(rev, apps), WeightingMode::uniform);
    for (const std::string a : {"A", "B", "C", "D"})
        for (const std::string b : {"A", "B", "C", "D"})
            CHECK(net.weight(*f.cat.find(a), *f.cat.find(b)) == net2.weight(*rev.find(a), *rev.find(b)));
}

TEST_CASE("network container") {
    auto net = DependenceNetwork::from_arcs(3, {{0, 1, 2.0}, {2, 1, 1.5}});
    CHECK(net.out_strength(0) == 2.0);
    CHECK(net.in_strength(1) == 3.5);
    CHECK(net.in_degree(1) == 2);
    CHECK(net.out_degree(1) == 0);
    CHECK(net.arcs() == std::vector<Arc>{{0, 1, 2.0}, {2, 1, 1.5}});
    CHECK_THROWS_AS(net.add(1, 1, 1.0), std::invalid_argument);
    CHECK(weighting_mode_from_string("lag") == WeightingMode::lag_discounted);
    CHECK(weighting_mode_from_string("initiator") == WeightingMode::initiator_only);
    CHECK(weighting_mode_from_string("uniform") == WeightingMode::uniform);
    CHECK_THROWS_AS(weighting_mode_from_string("sometimes"), std::invalid_argument);
    CHECK(lag_discount(0s, 3600s) == 1.0);
    CHECK(lag_discount(3600s, 3600s) == Approx(0.5));
}
