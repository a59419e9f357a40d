#include "trendflow/backbone.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace trendflow {

namespace {

struct NodeSums {
    std::vector<double> out_strength, in_strength;
    std::vector<std::size_t> out_degree, in_degree;

    explicit NodeSums(const DependenceNetwork& net)
        : out_strength(net.node_count(), 0.0),
          in_strength(net.node_count(), 0.0),
          out_degree(net.node_count(), 0),
          in_degree(net.node_count(), 0) {
        for (const auto& a : net.arcs()) {
            out_strength[a.source] += a.weight;
            in_strength[a.target] += a.weight;
            ++out_degree[a.source];
            ++in_degree[a.target];
        }
    }
};

double closed_form(double weight, double strength, std::size_t degree) {
    if (!(strength > 0.0)) throw std::invalid_argument("zero-strength node");
    if (degree <= 1) return 0.0;
    const double p = weight / strength;
    return std::pow(1.0 - p, static_cast<double>(degree - 1));
}

double combined(const NodeSums& sums, const Arc& a, SignificanceSides sides) {
    const double out = closed_form(a.weight, sums.out_strength[a.source], sums.out_degree[a.source]);
    if (sides == SignificanceSides::out_only) return out;
    const double in = closed_form(a.weight, sums.in_strength[a.target], sums.in_degree[a.target]);
    return std::min(out, in);
}

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), components_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        parent_[std::max(a, b)] = std::min(a, b);
        --components_;
    }
    std::size_t components() const { return components_; }

private:
    std::vector<std::size_t> parent_;
    std::size_t components_;
};

bool connected_below(std::size_t n, const std::vector<Arc>& arcs, const std::vector<double>& sig, double alpha) {
    DisjointSets sets(n);
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        if (sig[k] < alpha) sets.unite(arcs[k].source, arcs[k].target);
    }
    return n > 0 && sets.components() == 1;
}

BackboneNetwork filter(const DependenceNetwork& net, const std::vector<Arc>& arcs, const std::vector<double>& sig,
                       double alpha) {
    std::vector<Arc> kept;
    for (std::size_t k = 0; k < arcs.size(); ++k) {
        if (sig[k] < alpha) kept.push_back(arcs[k]);
    }
    return BackboneNetwork(net.nodes(), std::move(kept), alpha);
}

}  // namespace

double disparity_significance(const DependenceNetwork& net, std::size_t i, std::size_t j, Orientation orientation) {
    if (i >= net.node_count() || j >= net.node_count()) throw std::out_of_range("node index out of range");
    const double w = net.weight(i, j);
    if (!(w > 0.0)) throw std::invalid_argument("arc does not exist");
    if (orientation == Orientation::out) return closed_form(w, net.out_strength(i), net.out_degree(i));
    return closed_form(w, net.in_strength(j), net.in_degree(j));
}

std::vector<double> arc_significance(const DependenceNetwork& net, SignificanceSides sides) {
    const NodeSums sums(net);
    std::vector<double> out;
    for (const auto& a : net.arcs()) out.push_back(combined(sums, a, sides));
    return out;
}

BackboneNetwork::BackboneNetwork(std::vector<LocationIndex> nodes, std::vector<Arc> arcs, double alpha)
    : nodes_(std::move(nodes)), arcs_(std::move(arcs)), alpha_(alpha) {
    connected_ = weakly_connected(nodes_.size(), arcs_);
}

bool weakly_connected(std::size_t n, const std::vector<Arc>& arcs) {
    DisjointSets sets(n);
    for (const auto& a : arcs) sets.unite(a.source, a.target);
    return n > 0 && sets.components() == 1;
}

BackboneNetwork extract_backbone(const DependenceNetwork& net, double alpha, SignificanceSides sides) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0, 1]");
    const auto arcs = net.arcs();
    return filter(net, arcs, arc_significance(net, sides), alpha);
}

TunedBackbone tune_alpha(const DependenceNetwork& net, const TuneOptions& options) {
    if (!(options.step > 0.0 && options.step <= 1.0)) throw std::invalid_argument("alpha step must be in (0, 1]");
    if (!(options.tolerance > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const auto arcs = net.arcs();
    const auto sig = arc_significance(net, options.sides);
    const auto n = net.node_count();
    if (!connected_below(n, arcs, sig, 1.0)) throw std::runtime_error("network is disconnected even at alpha = 1");

    // Coarse descending scan; grid points are computed from integers to avoid drift.
    const auto steps = static_cast<long>(std::floor(1.0 / options.step + 1e-9));
    double hi = 1.0;
    double lo = 0.0;
    for (long k = steps - 1; k >= 1; --k) {
        const double a = static_cast<double>(k) * options.step;
        if (connected_below(n, arcs, sig, a)) {
            hi = a;
        } else {
            lo = a;
            break;
        }
    }
    // Retention is monotone in alpha, so the connectivity threshold is bracketed by (lo, hi].
    while (hi - lo > options.tolerance) {
        const double mid = 0.5 * (lo + hi);
        if (connected_below(n, arcs, sig, mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return {hi, filter(net, arcs, sig, hi)};
}

SourceSinkRanking source_sink_ranking(const BackboneNetwork& backbone) {
    SourceSinkRanking out;
    const auto n = backbone.node_count();
    out.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.nodes[i].node = i;
    for (const auto& a : backbone.arcs()) {
        out.nodes[a.source].s_out += a.weight;
        out.nodes[a.target].s_in += a.weight;
    }
    for (auto& r : out.nodes) {
        const double total = r.s_in + r.s_out;
        if (total > 0.0) {
            r.omega = r.s_out / total;
        } else {
            out.warnings.push_back("node " + std::to_string(r.node) + " is isolated in the backbone; omega undefined");
        }
    }
    out.order.resize(n);
    std::iota(out.order.begin(), out.order.end(), 0);
    std::stable_sort(out.order.begin(), out.order.end(), [&](std::size_t a, std::size_t b) {
        const auto& x = out.nodes[a];
        const auto& y = out.nodes[b];
        if (x.omega.has_value() != y.omega.has_value()) return x.omega.has_value();
        if (x.omega && *x.omega != *y.omega) return *x.omega > *y.omega;
        return a < b;
    });
    for (std::size_t r = 0; r < n; ++r) out.nodes[out.order[r]].rank = r + 1;
    return out;
}

}  // namespace trendflow
