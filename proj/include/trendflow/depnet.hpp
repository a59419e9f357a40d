#pragma once

// Temporal dependence network: arc i -> j accumulates credit every time city i
// shows a trend strictly before city j.

#include <optional>
#include <string_view>
#include <vector>

#include "trendflow/episodes.hpp"

namespace trendflow {

enum class WeightingMode { uniform, lag_discounted, initiator_only };

std::string_view to_string(WeightingMode mode);
// Accepts uniform | lag | lag_discounted | initiator | initiator_only.
WeightingMode weighting_mode_from_string(std::string_view name);

inline constexpr Duration kDefaultLagHalflife{3600};

// Reward for an adoption that lags the reference by `lag`: 2^(-lag / halflife).
double lag_discount(Duration lag, Duration halflife);

struct Arc {
    std::size_t source = 0;
    std::size_t target = 0;
    double weight = 0.0;

    bool operator==(const Arc&) const = default;
};

// Dense weighted digraph over city nodes. Node k stands for catalog location nodes()[k].
class DependenceNetwork {
public:
    DependenceNetwork() = default;
    explicit DependenceNetwork(std::vector<LocationIndex> nodes, WeightingMode mode = WeightingMode::uniform);
    // Nodes 0..n-1, arcs added as given (weights must be positive, no self loops).
    static DependenceNetwork from_arcs(std::size_t n, const std::vector<Arc>& arcs,
                                       WeightingMode mode = WeightingMode::uniform);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    const std::vector<LocationIndex>& nodes() const noexcept { return nodes_; }
    WeightingMode mode() const noexcept { return mode_; }
    std::optional<std::size_t> node_of(LocationIndex location) const;

    double weight(std::size_t i, std::size_t j) const { return w_[i * nodes_.size() + j]; }
    void add(std::size_t i, std::size_t j, double w);

    // Stored arcs (weight > 0) in row-major order.
    std::vector<Arc> arcs() const;
    std::size_t arc_count() const;

    double out_strength(std::size_t i) const;
    double in_strength(std::size_t j) const;
    std::size_t out_degree(std::size_t i) const;
    std::size_t in_degree(std::size_t j) const;
    double total_weight() const;

private:
    std::vector<LocationIndex> nodes_;
    WeightingMode mode_ = WeightingMode::uniform;
    std::vector<double> w_;
};

DependenceNetwork build_dependence_network(const TrendEpisodeTable& episodes, WeightingMode mode,
                                           Duration lag_halflife = kDefaultLagHalflife);

}  // namespace trendflow
