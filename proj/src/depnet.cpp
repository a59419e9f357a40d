#include "trendflow/depnet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace trendflow {

std::string_view to_string(WeightingMode mode) {
    switch (mode) {
        case WeightingMode::uniform: return "uniform";
        case WeightingMode::lag_discounted: return "lag_discounted";
        case WeightingMode::initiator_only: return "initiator_only";
    }
    return "uniform";
}

WeightingMode weighting_mode_from_string(std::string_view name) {
    if (name == "uniform") return WeightingMode::uniform;
    if (name == "lag" || name == "lag_discounted") return WeightingMode::lag_discounted;
    if (name == "initiator" || name == "initiator_only") return WeightingMode::initiator_only;
    throw std::invalid_argument("unknown weighting mode '" + std::string(name) + "'");
}

double lag_discount(Duration lag, Duration halflife) {
    if (halflife.count() <= 0) throw std::invalid_argument("lag half-life must be positive");
    return std::exp2(-static_cast<double>(lag.count()) / static_cast<double>(halflife.count()));
}

DependenceNetwork::DependenceNetwork(std::vector<LocationIndex> nodes, WeightingMode mode)
    : nodes_(std::move(nodes)), mode_(mode), w_(nodes_.size() * nodes_.size(), 0.0) {}

DependenceNetwork DependenceNetwork::from_arcs(std::size_t n, const std::vector<Arc>& arcs, WeightingMode mode) {
    std::vector<LocationIndex> nodes(n);
    for (std::size_t i = 0; i < n; ++i) nodes[i] = static_cast<LocationIndex>(i);
    DependenceNetwork net(std::move(nodes), mode);
    for (const auto& a : arcs) {
        if (!(a.weight > 0.0)) throw std::invalid_argument("arc weights must be positive");
        net.add(a.source, a.target, a.weight);
    }
    return net;
}

std::optional<std::size_t> DependenceNetwork::node_of(LocationIndex location) const {
    auto it = std::find(nodes_.begin(), nodes_.end(), location);
    if (it == nodes_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

void DependenceNetwork::add(std::size_t i, std::size_t j, double w) {
    const auto n = nodes_.size();
    if (i >= n || j >= n) throw std::out_of_range("node index out of range");
    if (i == j) throw std::invalid_argument("self loops are not allowed");
    if (w < 0.0) throw std::invalid_argument("negative weight");
    w_[i * n + j] += w;
}

std::vector<Arc> DependenceNetwork::arcs() const {
    std::vector<Arc> out;
    const auto n = nodes_.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double w = w_[i * n + j];
            if (w > 0.0) out.push_back({i, j, w});
        }
    }
    return out;
}

std::size_t DependenceNetwork::arc_count() const {
    return static_cast<std::size_t>(std::count_if(w_.begin(), w_.end(), [](double w) { return w > 0.0; }));
}

double DependenceNetwork::out_strength(std::size_t i) const {
    double s = 0.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) s += weight(i, j);
    return s;
}

double DependenceNetwork::in_strength(std::size_t j) const {
    double s = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) s += weight(i, j);
    return s;
}

std::size_t DependenceNetwork::out_degree(std::size_t i) const {
    std::size_t k = 0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) k += weight(i, j) > 0.0;
    return k;
}

std::size_t DependenceNetwork::in_degree(std::size_t j) const {
    std::size_t k = 0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) k += weight(i, j) > 0.0;
    return k;
}

double DependenceNetwork::total_weight() const {
    double s = 0.0;
    for (double w : w_) s += w;
    return s;
}

DependenceNetwork build_dependence_network(const TrendEpisodeTable& episodes, WeightingMode mode,
                                           Duration lag_halflife) {
    if (mode == WeightingMode::lag_discounted && lag_halflife.count() <= 0)
        throw std::invalid_argument("lag half-life must be positive");

    const auto cities = episodes.catalog().city_indices();
    std::vector<std::size_t> node_of(episodes.catalog().size(), SIZE_MAX);
    for (std::size_t k = 0; k < cities.size(); ++k) node_of[cities[k]] = k;
    DependenceNetwork net(cities, mode);

    struct Adoption {
        Timestamp first_seen;
        std::size_t node;
    };
    std::vector<Adoption> order;
    for (TrendId trend : episodes.city_trends()) {
        order.clear();
        for (const auto& row : episodes.rows_for(trend)) order.push_back({row.first_seen, node_of[row.location]});
        if (order.size() < 2) continue;
        std::sort(order.begin(), order.end(), [](const Adoption& a, const Adoption& b) {
            return a.first_seen != b.first_seen ? a.first_seen < b.first_seen : a.node < b.node;
        });

        if (mode == WeightingMode::initiator_only) {
            if (order[0].first_seen == order[1].first_seen) continue;  // shared minimum, no initiator
            for (std::size_t b = 1; b < order.size(); ++b) net.add(order[0].node, order[b].node, 1.0);
            continue;
        }
        for (std::size_t a = 0; a < order.size(); ++a) {
            for (std::size_t b = a + 1; b < order.size(); ++b) {
                if (order[b].first_seen == order[a].first_seen) continue;
                const double w = mode == WeightingMode::uniform
                                     ? 1.0
                                     : lag_discount(order[b].first_seen - order[a].first_seen, lag_halflife);
                net.add(order[a].node, order[b].node, w);
            }
        }
    }
    return net;
}

}  // namespace trendflow
