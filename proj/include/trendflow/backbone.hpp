#pragma once

// Disparity-filter backbone of a dependence network, alpha tuning to the
// sparsest weakly connected backbone, and source-sink ranking.

#include <optional>
#include <string>
#include <vector>

#include "trendflow/depnet.hpp"

namespace trendflow {

enum class Orientation { out, in };

// Which endpoints an arc is tested against. `both` keeps an arc when either
// the source's out-distribution or the target's in-distribution finds it
// significant.
enum class SignificanceSides { both, out_only };

// Probability under the uniform stick-breaking null that the arc's share of
// the node's strength is at least the observed one: (1 - p)^(k - 1).
// Degree-1 nodes give 0. Throws std::invalid_argument for a missing arc or a
// zero-strength node.
double disparity_significance(const DependenceNetwork& net, std::size_t i, std::size_t j, Orientation orientation);

// Significance used for retention, one value per net.arcs() entry.
std::vector<double> arc_significance(const DependenceNetwork& net, SignificanceSides sides = SignificanceSides::both);

class BackboneNetwork {
public:
    BackboneNetwork() = default;
    BackboneNetwork(std::vector<LocationIndex> nodes, std::vector<Arc> arcs, double alpha);

    std::size_t node_count() const noexcept { return nodes_.size(); }
    const std::vector<LocationIndex>& nodes() const noexcept { return nodes_; }
    const std::vector<Arc>& arcs() const noexcept { return arcs_; }
    double alpha() const noexcept { return alpha_; }
    bool connected() const noexcept { return connected_; }

private:
    std::vector<LocationIndex> nodes_;
    std::vector<Arc> arcs_;
    double alpha_ = 1.0;
    bool connected_ = false;
};

// Weak connectivity over all n nodes (isolated nodes break it).
bool weakly_connected(std::size_t n, const std::vector<Arc>& arcs);

// Keeps arcs whose significance is strictly below alpha. alpha must be in (0, 1].
BackboneNetwork extract_backbone(const DependenceNetwork& net, double alpha,
                                 SignificanceSides sides = SignificanceSides::both);

struct TuneOptions {
    double step = 0.01;        // coarse descending grid
    double tolerance = 1e-4;   // bisection stops below this bracket width
    SignificanceSides sides = SignificanceSides::both;
};

struct TunedBackbone {
    double alpha = 1.0;
    BackboneNetwork backbone;
};

// Smallest alpha (to within tolerance) whose backbone stays weakly connected.
// Throws std::runtime_error when the network is disconnected even at alpha = 1.
TunedBackbone tune_alpha(const DependenceNetwork& net, const TuneOptions& options = {});

struct NodeRank {
    std::size_t node = 0;
    std::optional<double> omega;  // s_out / (s_in + s_out); empty for isolated nodes
    double s_in = 0.0;
    double s_out = 0.0;
    std::size_t rank = 0;         // 1 = strongest source
};

struct SourceSinkRanking {
    std::vector<NodeRank> nodes;     // indexed by node
    std::vector<std::size_t> order;  // nodes by rank
    std::vector<std::string> warnings;
};

// Sources first; ties by node index; isolated nodes ranked last.
SourceSinkRanking source_sink_ranking(const BackboneNetwork& backbone);

}  // namespace trendflow
