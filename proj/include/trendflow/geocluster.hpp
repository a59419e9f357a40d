#pragma once

// Trend-sharing similarity between cities, complete-linkage clustering,
// kernel density summaries and cluster significance tests.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trendflow/episodes.hpp"
#include "trendflow/statistics.hpp"

namespace trendflow {

class SimilarityMatrix {
public:
    SimilarityMatrix() = default;
    // Row-major n x n values. Throws std::invalid_argument unless symmetric
    // with unit diagonal and entries in [0, 1].
    SimilarityMatrix(std::vector<LocationIndex> locations, std::vector<double> values);

    std::size_t size() const noexcept { return locations_.size(); }
    const std::vector<LocationIndex>& locations() const noexcept { return locations_; }
    double operator()(std::size_t i, std::size_t j) const { return values_[i * locations_.size() + j]; }
    double distance(std::size_t i, std::size_t j) const { return 1.0 - (*this)(i, j); }
    const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<LocationIndex> locations_;
    std::vector<double> values_;
};

// |A ∩ B| / |A ∪ B| over sorted, duplicate-free id lists; two empty sets give 1.
double jaccard(std::span<const TrendId> a, std::span<const TrendId> b);

// Cities without any trend are left out (with a warning). Throws
// std::invalid_argument when no city has trends.
SimilarityMatrix jaccard_matrix(const TrendEpisodeTable& episodes, std::vector<std::string>* warnings = nullptr);

// Leaves are 0..n-1; merge k creates node n + k.
struct Merge {
    std::size_t left = 0;
    std::size_t right = 0;
    double distance = 0.0;
    std::size_t size = 0;
};

class Dendrogram {
public:
    Dendrogram() = default;
    Dendrogram(std::size_t leaves, std::vector<Merge> merges);

    std::size_t leaf_count() const noexcept { return leaves_; }
    const std::vector<Merge>& merges() const noexcept { return merges_; }

    // Flat clusters formed by merges with distance strictly below `distance`.
    // Labels are 0.. in order of each cluster's first leaf.
    std::vector<int> cut(double distance) const;
    // Flat clusters after stopping at k clusters (1 <= k <= leaf count).
    std::vector<int> cut_clusters(std::size_t k) const;
    // Merge distance that produces exactly k clusters when used as a cut,
    // i.e. midway between the (n-k)-th and (n-k+1)-th merge distances.
    double cut_distance_for(std::size_t k) const;

    // Newick tree with branch lengths measured in merge distance.
    std::string newick(const std::vector<std::string>& leaf_names) const;

private:
    std::size_t leaves_ = 0;
    std::vector<Merge> merges_;
};

// Complete linkage on d = 1 - S. Equal-distance candidates are resolved by
// the lexicographically smallest pair of cluster leaders, a leader being the
// smallest id among the cluster's members.
Dendrogram complete_linkage(const SimilarityMatrix& similarity, const std::vector<std::string>& leaf_ids);

struct ClusterModel {
    double cut = 0.0;
    std::vector<int> labels;  // per matrix row
    std::size_t cluster_count = 0;
    std::vector<std::vector<double>> intra;  // similarities within each cluster
    std::vector<double> inter;               // similarities across clusters, pooled

    std::vector<std::size_t> members(int cluster) const;
};

ClusterModel make_cluster_model(const SimilarityMatrix& similarity, std::vector<int> labels, double cut);

struct Clustering {
    Dendrogram dendrogram;
    std::vector<ClusterModel> models;  // one per requested cut
};

Clustering cluster(const SimilarityMatrix& similarity, const std::vector<std::string>& leaf_ids,
                   const std::vector<double>& cuts);

double silverman_bandwidth(std::span<const double> samples);

// Gaussian kernel density estimate.
class GaussianKde {
public:
    // Throws std::invalid_argument for fewer than two samples, zero variance or
    // a non-positive explicit bandwidth.
    explicit GaussianKde(std::vector<double> samples, std::optional<double> bandwidth = std::nullopt);

    double bandwidth() const noexcept { return h_; }
    double operator()(double x) const;
    double min_sample() const noexcept { return lo_; }
    double max_sample() const noexcept { return hi_; }

    // Evenly spaced evaluation, `points` >= 2.
    std::vector<std::pair<double, double>> grid(double from, double to, std::size_t points) const;
    // Trapezoid integral over [sample min - 4h, sample max + 4h].
    double integral(std::size_t points = 4001) const;

private:
    std::vector<double> samples_;
    double h_ = 0.0;
    double lo_ = 0.0;
    double hi_ = 0.0;
};

enum class TestKind { intra_vs_inter, intra_vs_cross, intra_vs_intra };

std::string_view to_string(TestKind kind);

struct ClusterTest {
    TestKind kind = TestKind::intra_vs_inter;
    int cluster = 0;
    int other = -1;  // other cluster for cross and intra comparisons, -1 for pooled
    WelchResult result;
    bool rejects = false;
};

struct ClusterVerdict {
    int cluster = 0;
    std::size_t members = 0;
    bool significant = false;
};

struct SignificanceReport {
    double level = 0.01;
    std::vector<ClusterTest> tests;
    std::vector<ClusterVerdict> clusters;
    std::vector<std::string> warnings;

    bool all_significant() const;
};

// Welch tests of each cluster's intra similarities against the pooled
// inter-cluster similarities and against its cross similarities with every
// other cluster. A cluster is significant when all of those reject at `level`.
// Intra-vs-intra comparisons are reported but do not affect the verdict.
SignificanceReport cluster_significance(const SimilarityMatrix& similarity, const ClusterModel& model,
                                        double level = 0.01);

// Chance-corrected agreement between two labelings of the same items.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

}  // namespace trendflow
