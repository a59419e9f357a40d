#include "trendflow/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "trendflow/log_io.hpp"
#include "trendflow/random.hpp"

namespace trendflow {

namespace {

// Failures before the first success, with the given mean.
std::int64_t geometric(Rng& rng, double mean) {
    if (mean <= 0.0) return 0;
    const double p = 1.0 / (1.0 + mean);
    return static_cast<std::int64_t>(std::floor(std::log1p(-uniform01(rng)) / std::log1p(-p)));
}

double standard_normal(Rng& rng) {
    const double u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log1p(-u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

void check(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("generator config: ") + what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

struct Layout {
    LocationCatalog catalog;
    std::vector<PlantedLocation> planted;           // per catalog index
    std::vector<std::vector<LocationIndex>> members;  // per cluster
    std::vector<LocationIndex> hubs, others;
    LocationIndex country = 0;
};

Layout make_layout(const GeneratorConfig& cfg) {
    Rng rng(derive_seed(cfg.seed, {1}));
    Layout out;
    const std::size_t n = cfg.n_locations;

    std::vector<std::size_t> cluster_of(n);
    for (std::size_t i = 0; i < n; ++i) cluster_of[i] = i % cfg.n_clusters;
    shuffle(cluster_of, rng);

    out.planted.resize(n + 1);
    out.members.resize(cfg.n_clusters);
    const int width = n > 100 ? 3 : 2;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t c = cluster_of[i];
        const double centre_lon =
            cfg.n_clusters == 1 ? -98.0 : -118.0 + 42.0 * static_cast<double>(c) / static_cast<double>(cfg.n_clusters - 1);
        char id[32], name[32];
        std::snprintf(id, sizeof id, "loc_%0*zu", width, i);
        std::snprintf(name, sizeof name, "City %0*zu", width, i);
        Location loc{id, name, 31.0 + 14.0 * uniform01(rng), centre_lon - 4.0 + 8.0 * uniform01(rng), false};
        const auto idx = out.catalog.add(std::move(loc));
        out.planted[idx].cluster = c;
        out.members[c].push_back(idx);
    }
    out.country = out.catalog.add({"united_states", "United States", 39.8, -98.6, true});

    // spread hubs over clusters round-robin
    auto pool = out.members;
    for (std::size_t h = 0, c = 0; h < cfg.n_hubs; ++c) {
        auto& candidates = pool[c % cfg.n_clusters];
        if (candidates.empty()) continue;
        const std::size_t k = uniform_index(rng, candidates.size());
        out.planted[candidates[k]].is_hub = true;
        candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(k));
        ++h;
    }
    for (std::size_t i = 0; i < n; ++i) {
        (out.planted[i].is_hub ? out.hubs : out.others).push_back(static_cast<LocationIndex>(i));
    }
    return out;
}

struct Planned {
    LocationIndex location;
    std::int64_t start;
};

// Picks `size` cities of a cluster, `first` among them, and staggers their starts.
void spread_in_cluster(const std::vector<LocationIndex>& members, LocationIndex first, std::int64_t start,
                       double spread_mean, double delay_mean, Rng& rng, std::vector<Planned>& out) {
    const auto size = std::min<std::int64_t>(static_cast<std::int64_t>(members.size()),
                                             1 + geometric(rng, std::max(0.0, spread_mean - 1.0)));
    std::vector<LocationIndex> rest;
    for (auto m : members)
        if (m != first) rest.push_back(m);
    shuffle(rest, rng);
    out.push_back({first, start});
    for (std::int64_t i = 0; i + 1 < size; ++i) {
        out.push_back({rest[static_cast<std::size_t>(i)], start + 1 + geometric(rng, std::max(0.0, delay_mean - 1.0))});
    }
}

struct Slot {
    std::int64_t start, end;
    std::size_t trend, presence;
};

}  // namespace

void GeneratorConfig::validate() const {
    check(n_locations >= 2, "n_locations must be at least 2");
    check(n_clusters >= 1 && n_clusters <= n_locations, "n_clusters must lie in [1, n_locations]");
    check(n_hubs <= n_locations, "n_hubs must not exceed n_locations");
    check(ticks > 0, "ticks must be positive");
    check(tick_interval.count() > 0, "tick interval must be positive");
    check(on_tick_grid(start, tick_interval), "start must lie on the tick grid");
    check(n_trends >= 1, "n_trends must be positive");
    check(is_probability(p_local) && is_probability(global_trend_fraction) && is_probability(hashtag_fraction) &&
              is_probability(hub_origin_probability) && is_probability(promoted_rate),
          "probabilities must lie in [0, 1]");
    check(local_spread_mean >= 1.0, "local_spread_mean must be at least 1");
    check(hub_delay_mean >= 1.0 && adoption_delay_mean >= 1.0 && local_delay_mean >= 1.0,
          "delay means must be at least one tick");
    check(hub_lead >= 0, "hub_lead must be non-negative");
    check(country_threshold > 0.0 && country_threshold <= 1.0, "country_threshold must lie in (0, 1]");
    check(lifetime_median > 0.0 && lifetime_sigma >= 0.0 && global_lifetime_factor > 0.0,
          "lifetime parameters must be positive");
}

GeneratorConfig generator_preset(std::string_view name) {
    GeneratorConfig cfg;
    if (name == "paper-like" || name == "default") return cfg;
    if (name == "small") {
        cfg.n_locations = 12;
        cfg.n_hubs = 3;
        cfg.ticks = 288;
        cfg.n_trends = 200;
        return cfg;
    }
    throw std::invalid_argument("unknown generator preset '" + std::string(name) + "'");
}

std::string_view to_string(TrendClass c) {
    switch (c) {
        case TrendClass::local: return "local";
        case TrendClass::regional: return "regional";
        case TrendClass::global: return "global";
    }
    return "local";
}

std::vector<LocationIndex> PlantedTrend::spread() const {
    std::vector<LocationIndex> out;
    for (const auto& p : presence) {
        if (!p.realized.empty()) out.push_back(p.location);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<int> GroundTruth::cluster_labels(const std::vector<LocationIndex>& cities) const {
    std::vector<int> out;
    out.reserve(cities.size());
    for (auto c : cities) out.push_back(static_cast<int>(locations.at(c).cluster));
    return out;
}

std::vector<LocationIndex> GroundTruth::hubs() const {
    std::vector<LocationIndex> out;
    for (std::size_t i = 0; i < locations.size(); ++i) {
        if (locations[i].is_hub) out.push_back(static_cast<LocationIndex>(i));
    }
    return out;
}

SyntheticData generate(const GeneratorConfig& cfg) {
    cfg.validate();
    Layout layout = make_layout(cfg);
    const std::size_t n_cities = cfg.n_locations;
    const auto threshold = static_cast<std::size_t>(std::ceil(cfg.country_threshold * static_cast<double>(n_cities)));

    LogBuilder builder(layout.catalog, cfg.tick_interval);
    GroundTruth truth;
    truth.locations = layout.planted;
    truth.trends.resize(cfg.n_trends);

    std::vector<std::vector<Slot>> slots(layout.catalog.size());
    for (std::size_t t = 0; t < cfg.n_trends; ++t) {
        Rng rng(derive_seed(cfg.seed, {2, t}));
        auto& trend = truth.trends[t];

        const bool local = uniform01(rng) < cfg.p_local;
        trend.cls = local ? TrendClass::local
                          : (uniform01(rng) < cfg.global_trend_fraction ? TrendClass::global : TrendClass::regional);
        const bool hashtag = uniform01(rng) < cfg.hashtag_fraction;
        char name[48];
        if (hashtag) std::snprintf(name, sizeof name, "#topic%05zu", t);
        else std::snprintf(name, sizeof name, "topic phrase %05zu", t);
        trend.id = builder.intern(name);

        trend.onset = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(cfg.ticks)));
        const double factor = trend.cls == TrendClass::global ? cfg.global_lifetime_factor : 1.0;
        const double life = cfg.lifetime_median * factor * std::exp(cfg.lifetime_sigma * standard_normal(rng));
        trend.lifetime = std::max<std::int64_t>(1, std::llround(life));

        std::vector<Planned> plan;
        if (trend.cls == TrendClass::global) {
            const bool from_hub = !layout.hubs.empty() && (layout.others.empty() || uniform01(rng) < cfg.hub_origin_probability);
            const auto& pool = from_hub ? layout.hubs : layout.others;
            trend.origin = pool[uniform_index(rng, pool.size())];
            for (LocationIndex c = 0; c < n_cities; ++c) {
                if (c == trend.origin) {
                    plan.push_back({c, trend.onset});
                    continue;
                }
                const double mean = layout.planted[c].is_hub ? cfg.hub_delay_mean : cfg.adoption_delay_mean;
                plan.push_back({c, trend.onset + 1 + geometric(rng, mean - 1.0)});
            }
            std::vector<std::int64_t> starts;
            for (const auto& p : plan) starts.push_back(p.start);
            std::nth_element(starts.begin(), starts.begin() + static_cast<std::ptrdiff_t>(threshold - 1), starts.end());
            const std::int64_t country_start = std::max(starts[threshold - 1], trend.onset + cfg.hub_lead);
            plan.push_back({layout.country, country_start});
        } else {
            trend.origin = static_cast<LocationIndex>(uniform_index(rng, n_cities));
            const std::size_t home = layout.planted[trend.origin].cluster;
            spread_in_cluster(layout.members[home], trend.origin, trend.onset, cfg.local_spread_mean,
                              cfg.local_delay_mean, rng, plan);
            if (trend.cls == TrendClass::regional && cfg.n_clusters > 1) {
                std::size_t other = uniform_index(rng, cfg.n_clusters - 1);
                if (other >= home) ++other;
                const auto& members = layout.members[other];
                const LocationIndex entry = members[uniform_index(rng, members.size())];
                const std::int64_t start = trend.onset + 1 + geometric(rng, cfg.local_delay_mean - 1.0);
                spread_in_cluster(members, entry, start, cfg.local_spread_mean, cfg.local_delay_mean, rng, plan);
            }
        }

        for (const auto& p : plan) {
            trend.presence.push_back({p.location, p.start, {}});
            const std::int64_t begin = p.start;
            const std::int64_t end = std::min(cfg.ticks, p.start + trend.lifetime);
            if (begin < end) slots[p.location].push_back({begin, end, t, trend.presence.size() - 1});
        }
    }

    const double capacity = static_cast<double>(kMaxRank) - cfg.promoted_rate;
    std::size_t planted_ticks = 0;
    for (std::size_t loc = 0; loc < slots.size(); ++loc) {
        auto& s = slots[loc];
        std::sort(s.begin(), s.end(), [](const Slot& a, const Slot& b) {
            return a.start != b.start ? a.start < b.start : a.trend < b.trend;
        });
        std::size_t load = 0;
        for (const auto& x : s) load += static_cast<std::size_t>(x.end - x.start);
        planted_ticks += load;
        if (static_cast<double>(load) / static_cast<double>(cfg.ticks) > capacity) {
            throw std::invalid_argument("infeasible generator config: mean planted load at " + layout.catalog[static_cast<LocationIndex>(loc)].id +
                                        " exceeds top-10 capacity");
        }
    }

    std::vector<TrendId> promoted_pool;
    for (int k = 0; k < 20; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "#sponsored%02d", k);
        promoted_pool.push_back(builder.intern(name));
    }

    std::vector<Rng> promo_rng;
    for (std::size_t loc = 0; loc < slots.size(); ++loc) promo_rng.emplace_back(derive_seed(cfg.seed, {3, loc}));
    std::vector<std::size_t> next(slots.size(), 0);
    std::vector<std::vector<const Slot*>> active(slots.size());

    for (std::int64_t tick = 0; tick < cfg.ticks; ++tick) {
        const Timestamp ts = cfg.start + tick * cfg.tick_interval;
        for (std::size_t loc = 0; loc < slots.size(); ++loc) {
            auto& act = active[loc];
            std::erase_if(act, [tick](const Slot* s) { return s->end <= tick; });
            while (next[loc] < slots[loc].size() && slots[loc][next[loc]].start == tick) act.push_back(&slots[loc][next[loc]++]);

            Rng& pr = promo_rng[loc];
            const bool promoted = uniform01(pr) < cfg.promoted_rate;
            const TrendId promo = promoted_pool[uniform_index(pr, promoted_pool.size())];
            if (act.empty() && !promoted) continue;

            // longest remaining first, then lower trend id
            std::sort(act.begin(), act.end(), [](const Slot* a, const Slot* b) {
                return a->end != b->end ? a->end > b->end : a->trend < b->trend;
            });
            const std::size_t cap = promoted ? kMaxRank - 1 : kMaxRank;
            TrendSnapshot snap{static_cast<LocationIndex>(loc), ts, {}};
            int rank = 1;
            if (promoted) snap.entries.push_back({promo, rank++, true});
            for (std::size_t i = 0; i < act.size(); ++i) {
                if (i >= cap) {
                    ++truth.evicted;
                    continue;
                }
                const Slot& s = *act[i];
                auto& trend = truth.trends[s.trend];
                snap.entries.push_back({trend.id, rank++, false});
                auto& realized = trend.presence[s.presence].realized;
                if (!realized.empty() && realized.back().end == tick) ++realized.back().end;
                else realized.push_back({tick, tick + 1});
                if (static_cast<LocationIndex>(loc) == layout.country && !trend.country_onset) trend.country_onset = tick;
            }
            builder.add_snapshot(std::move(snap));
        }
    }

    if (planted_ticks > 0 && static_cast<double>(truth.evicted) > 0.25 * static_cast<double>(planted_ticks)) {
        throw std::invalid_argument("infeasible generator config: capacity evicted more than 25% of planted trend ticks");
    }
    return {std::move(builder).build(), std::move(truth)};
}

nlohmann::ordered_json config_to_json(const GeneratorConfig& c) {
    return {
        {"seed", c.seed},
        {"n_locations", c.n_locations},
        {"n_clusters", c.n_clusters},
        {"n_hubs", c.n_hubs},
        {"ticks", c.ticks},
        {"tick_seconds", c.tick_interval.count()},
        {"start", format_timestamp(c.start)},
        {"n_trends", c.n_trends},
        {"p_local", c.p_local},
        {"global_trend_fraction", c.global_trend_fraction},
        {"hashtag_fraction", c.hashtag_fraction},
        {"local_spread_mean", c.local_spread_mean},
        {"hub_origin_probability", c.hub_origin_probability},
        {"hub_delay_mean", c.hub_delay_mean},
        {"adoption_delay_mean", c.adoption_delay_mean},
        {"local_delay_mean", c.local_delay_mean},
        {"hub_lead", c.hub_lead},
        {"country_threshold", c.country_threshold},
        {"lifetime_median", c.lifetime_median},
        {"lifetime_sigma", c.lifetime_sigma},
        {"global_lifetime_factor", c.global_lifetime_factor},
        {"promoted_rate", c.promoted_rate},
    };
}

GeneratorConfig config_from_json(const nlohmann::json& doc, GeneratorConfig c) {
    if (!doc.is_object()) throw std::invalid_argument("generator config must be a JSON object");
    auto get = [&](const char* key, auto& field) {
        if (auto it = doc.find(key); it != doc.end()) it->get_to(field);
    };
    for (const auto& [key, value] : doc.items()) {
        if (!config_to_json(c).contains(key)) throw std::invalid_argument("unknown generator config key '" + key + "'");
    }
    get("seed", c.seed);
    get("n_locations", c.n_locations);
    get("n_clusters", c.n_clusters);
    get("n_hubs", c.n_hubs);
    get("ticks", c.ticks);
    if (auto it = doc.find("tick_seconds"); it != doc.end()) c.tick_interval = Duration{it->get<std::int64_t>()};
    if (auto it = doc.find("start"); it != doc.end()) c.start = parse_timestamp(it->get<std::string>());
    get("n_trends", c.n_trends);
    get("p_local", c.p_local);
    get("global_trend_fraction", c.global_trend_fraction);
    get("hashtag_fraction", c.hashtag_fraction);
    get("local_spread_mean", c.local_spread_mean);
    get("hub_origin_probability", c.hub_origin_probability);
    get("hub_delay_mean", c.hub_delay_mean);
    get("adoption_delay_mean", c.adoption_delay_mean);
    get("local_delay_mean", c.local_delay_mean);
    get("hub_lead", c.hub_lead);
    get("country_threshold", c.country_threshold);
    get("lifetime_median", c.lifetime_median);
    get("lifetime_sigma", c.lifetime_sigma);
    get("global_lifetime_factor", c.global_lifetime_factor);
    get("promoted_rate", c.promoted_rate);
    return c;
}

nlohmann::ordered_json truth_to_json(const GroundTruth& truth, const ObservationLog& log, const GeneratorConfig& cfg) {
    const auto& catalog = log.catalog();
    auto at = [&](std::int64_t tick) { return format_timestamp(cfg.start + tick * cfg.tick_interval); };

    nlohmann::ordered_json locations = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < truth.locations.size(); ++i) {
        const auto& loc = catalog[static_cast<LocationIndex>(i)];
        nlohmann::ordered_json row{{"id", loc.id}};
        if (loc.is_country_level) row["country_level"] = true;
        else row.update({{"cluster", truth.locations[i].cluster}, {"hub", truth.locations[i].is_hub}});
        locations.push_back(std::move(row));
    }

    nlohmann::ordered_json trends = nlohmann::ordered_json::array();
    for (const auto& t : truth.trends) {
        nlohmann::ordered_json presence = nlohmann::ordered_json::array();
        for (const auto& p : t.presence) {
            nlohmann::ordered_json runs = nlohmann::ordered_json::array();
            for (const auto& r : p.realized) runs.push_back({at(r.begin), at(r.end)});
            presence.push_back({{"loc", catalog[p.location].id}, {"planted_start", at(p.planted_start)}, {"runs", std::move(runs)}});
        }
        trends.push_back({
            {"trend", log.trend(t.id).text},
            {"class", to_string(t.cls)},
            {"origin", catalog[t.origin].id},
            {"onset", at(t.onset)},
            {"lifetime_ticks", t.lifetime},
            {"country_onset", t.country_onset ? nlohmann::ordered_json(at(*t.country_onset)) : nlohmann::ordered_json()},
            {"presence", std::move(presence)},
        });
    }
    return {{"config", config_to_json(cfg)}, {"evicted", truth.evicted}, {"locations", std::move(locations)},
            {"trends", std::move(trends)}};
}

}  // namespace trendflow
