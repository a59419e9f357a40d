#include "trendflow/geocluster.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace trendflow {

SimilarityMatrix::SimilarityMatrix(std::vector<LocationIndex> locations, std::vector<double> values)
    : locations_(std::move(locations)), values_(std::move(values)) {
    const auto n = locations_.size();
    if (values_.size() != n * n) throw std::invalid_argument("similarity matrix has wrong size");
    for (std::size_t i = 0; i < n; ++i) {
        if ((*this)(i, i) != 1.0) throw std::invalid_argument("similarity diagonal must be 1");
        for (std::size_t j = 0; j < n; ++j) {
            const double s = (*this)(i, j);
            if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("similarity outside [0, 1]");
            if (s != (*this)(j, i)) throw std::invalid_argument("similarity matrix not symmetric");
        }
    }
}

double jaccard(std::span<const TrendId> a, std::span<const TrendId> b) {
    std::size_t shared = 0;
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() && j != b.end()) {
        if (*i < *j) {
            ++i;
        } else if (*j < *i) {
            ++j;
        } else {
            ++shared;
            ++i;
            ++j;
        }
    }
    const std::size_t united = a.size() + b.size() - shared;
    return united == 0 ? 1.0 : static_cast<double>(shared) / static_cast<double>(united);
}

SimilarityMatrix jaccard_matrix(const TrendEpisodeTable& episodes, std::vector<std::string>* warnings) {
    const auto& catalog = episodes.catalog();
    std::map<LocationIndex, std::vector<TrendId>> sets;
    for (auto loc : catalog.city_indices()) sets[loc];
    for (const auto& row : episodes.rows()) sets[row.location].push_back(row.trend);

    std::vector<LocationIndex> locations;
    std::vector<std::vector<TrendId>> trend_sets;
    for (auto& [loc, ids] : sets) {
        if (ids.empty()) {
            if (warnings) warnings->push_back("location '" + catalog[loc].id + "' has no trends; excluded");
            continue;
        }
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        locations.push_back(loc);
        trend_sets.push_back(std::move(ids));
    }
    if (locations.empty()) throw std::invalid_argument("no location has any trend");

    const auto n = locations.size();
    std::vector<double> values(n * n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double s = jaccard(trend_sets[i], trend_sets[j]);
            values[i * n + j] = s;
            values[j * n + i] = s;
        }
    }
    return SimilarityMatrix(std::move(locations), std::move(values));
}

Dendrogram::Dendrogram(std::size_t leaves, std::vector<Merge> merges) : leaves_(leaves), merges_(std::move(merges)) {
    if (leaves_ > 0 && merges_.size() != leaves_ - 1) throw std::invalid_argument("dendrogram needs n - 1 merges");
}

namespace {

std::vector<int> relabel_by_first_leaf(std::vector<std::size_t> roots) {
    std::map<std::size_t, int> label_of;
    std::vector<int> labels(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        auto [it, inserted] = label_of.try_emplace(roots[i], static_cast<int>(label_of.size()));
        labels[i] = it->second;
    }
    return labels;
}

std::vector<int> apply_merges(std::size_t leaves, const std::vector<Merge>& merges, std::size_t count) {
    std::vector<std::size_t> parent(leaves + merges.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t node = leaves + k;
        parent[find(merges[k].left)] = node;
        parent[find(merges[k].right)] = node;
    }
    std::vector<std::size_t> roots(leaves);
    for (std::size_t i = 0; i < leaves; ++i) roots[i] = find(i);
    return relabel_by_first_leaf(std::move(roots));
}

std::string newick_label(const std::string& name) {
    std::string out = name;
    for (char& c : out) {
        if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == ' ' || c == '\'' || c == '[' || c == ']')
            c = '_';
    }
    return out;
}

}  // namespace

std::vector<int> Dendrogram::cut(double distance) const {
    std::size_t count = 0;
    while (count < merges_.size() && merges_[count].distance < distance) ++count;
    return apply_merges(leaves_, merges_, count);
}

std::vector<int> Dendrogram::cut_clusters(std::size_t k) const {
    if (k < 1 || k > leaves_) throw std::invalid_argument("cluster count out of range");
    return apply_merges(leaves_, merges_, leaves_ - k);
}

double Dendrogram::cut_distance_for(std::size_t k) const {
    if (k < 1 || k > leaves_) throw std::invalid_argument("cluster count out of range");
    const std::size_t applied = leaves_ - k;
    if (merges_.empty()) return 0.0;
    if (applied == 0) return merges_.front().distance / 2.0;
    if (applied == merges_.size()) return std::nextafter(merges_.back().distance, INFINITY);
    return 0.5 * (merges_[applied - 1].distance + merges_[applied].distance);
}

std::string Dendrogram::newick(const std::vector<std::string>& leaf_names) const {
    if (leaf_names.size() != leaves_) throw std::invalid_argument("leaf name count mismatch");
    if (leaves_ == 0) return ";";
    auto height = [&](std::size_t node) { return node < leaves_ ? 0.0 : merges_[node - leaves_].distance; };
    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    auto emit = [&](auto&& self, std::size_t node) -> void {
        if (node < leaves_) {
            os << newick_label(leaf_names[node]);
            return;
        }
        const auto& m = merges_[node - leaves_];
        os << '(';
        self(self, m.left);
        os << ':' << (m.distance - height(m.left)) << ',';
        self(self, m.right);
        os << ':' << (m.distance - height(m.right)) << ')';
    };
    emit(emit, merges_.empty() ? 0 : leaves_ + merges_.size() - 1);
    os << ';';
    return os.str();
}

Dendrogram complete_linkage(const SimilarityMatrix& similarity, const std::vector<std::string>& leaf_ids) {
    const auto n = similarity.size();
    if (leaf_ids.size() != n) throw std::invalid_argument("leaf id count mismatch");
    if (n == 0) return Dendrogram(0, {});

    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i * n + j] = similarity.distance(i, j);
    }
    std::vector<bool> active(n, true);
    std::vector<std::size_t> node_id(n);  // slot -> dendrogram node
    std::iota(node_id.begin(), node_id.end(), 0);
    std::vector<std::string> leader(leaf_ids);
    std::vector<std::size_t> size(n, 1);

    std::vector<Merge> merges;
    merges.reserve(n - 1);
    for (std::size_t step = 0; step + 1 < n; ++step) {
        std::size_t best_a = 0, best_b = 0;
        bool found = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                if (!found) {
                    best_a = a;
                    best_b = b;
                    found = true;
                    continue;
                }
                const double cand = d[a * n + b];
                const double best = d[best_a * n + best_b];
                if (cand < best) {
                    best_a = a;
                    best_b = b;
                } else if (cand == best) {
                    const auto& c1 = std::min(leader[a], leader[b]);
                    const auto& c2 = std::max(leader[a], leader[b]);
                    const auto& b1 = std::min(leader[best_a], leader[best_b]);
                    const auto& b2 = std::max(leader[best_a], leader[best_b]);
                    if (std::tie(c1, c2) < std::tie(b1, b2)) {
                        best_a = a;
                        best_b = b;
                    }
                }
            }
        }
        const double dist = d[best_a * n + best_b];
        merges.push_back({node_id[best_a], node_id[best_b], dist, size[best_a] + size[best_b]});
        // Merged cluster keeps slot best_a.
        for (std::size_t k = 0; k < n; ++k) {
            if (!active[k] || k == best_a || k == best_b) continue;
            const double m = std::max(d[best_a * n + k], d[best_b * n + k]);
            d[best_a * n + k] = m;
            d[k * n + best_a] = m;
        }
        active[best_b] = false;
        node_id[best_a] = n + step;
        size[best_a] += size[best_b];
        leader[best_a] = std::min(leader[best_a], leader[best_b]);
    }
    return Dendrogram(n, std::move(merges));
}

std::vector<std::size_t> ClusterModel::members(int c) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == c) out.push_back(i);
    }
    return out;
}

ClusterModel make_cluster_model(const SimilarityMatrix& similarity, std::vector<int> labels, double cut) {
    const auto n = similarity.size();
    if (labels.size() != n) throw std::invalid_argument("label count mismatch");
    ClusterModel model;
    model.cut = cut;
    model.cluster_count = labels.empty() ? 0 : static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);
    model.intra.resize(model.cluster_count);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (labels[i] == labels[j]) {
                model.intra[static_cast<std::size_t>(labels[i])].push_back(similarity(i, j));
            } else {
                model.inter.push_back(similarity(i, j));
            }
        }
    }
    model.labels = std::move(labels);
    return model;
}

Clustering cluster(const SimilarityMatrix& similarity, const std::vector<std::string>& leaf_ids,
                   const std::vector<double>& cuts) {
    Clustering out;
    out.dendrogram = complete_linkage(similarity, leaf_ids);
    for (double c : cuts) out.models.push_back(make_cluster_model(similarity, out.dendrogram.cut(c), c));
    return out;
}

double silverman_bandwidth(std::span<const double> samples) {
    if (samples.size() < 2) throw std::invalid_argument("bandwidth needs at least two samples");
    const double sigma = std::sqrt(sample_variance(samples));
    if (!(sigma > 0.0)) throw std::invalid_argument("bandwidth undefined for zero-variance samples");
    const double iqr = quantile(samples, 0.75) - quantile(samples, 0.25);
    const double spread = iqr > 0.0 ? std::min(sigma, iqr / 1.34) : sigma;
    return 0.9 * spread * std::pow(static_cast<double>(samples.size()), -0.2);
}

GaussianKde::GaussianKde(std::vector<double> samples, std::optional<double> bandwidth) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw std::invalid_argument("KDE needs at least two samples");
    if (!(sample_variance(samples_) > 0.0)) throw std::invalid_argument("KDE undefined for zero-variance samples");
    if (bandwidth && !(*bandwidth > 0.0)) throw std::invalid_argument("KDE bandwidth must be positive");
    h_ = bandwidth ? *bandwidth : silverman_bandwidth(samples_);
    std::sort(samples_.begin(), samples_.end());
    lo_ = samples_.front();
    hi_ = samples_.back();
}

double GaussianKde::operator()(double x) const {
    const double norm = 1.0 / (static_cast<double>(samples_.size()) * h_ * std::sqrt(2.0 * std::numbers::pi));
    // Kernels beyond 40 bandwidths underflow; skip them.
    const auto first = std::lower_bound(samples_.begin(), samples_.end(), x - 40.0 * h_);
    const auto last = std::upper_bound(samples_.begin(), samples_.end(), x + 40.0 * h_);
    double s = 0.0;
    for (auto it = first; it != last; ++it) {
        const double z = (x - *it) / h_;
        s += std::exp(-0.5 * z * z);
    }
    return s * norm;
}

std::vector<std::pair<double, double>> GaussianKde::grid(double from, double to, std::size_t points) const {
    if (points < 2) throw std::invalid_argument("grid needs at least two points");
    std::vector<std::pair<double, double>> out;
    out.reserve(points);
    const double step = (to - from) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double x = from + step * static_cast<double>(i);
        out.emplace_back(x, (*this)(x));
    }
    return out;
}

double GaussianKde::integral(std::size_t points) const {
    const auto g = grid(lo_ - 4.0 * h_, hi_ + 4.0 * h_, points);
    double s = 0.0;
    for (std::size_t i = 1; i < g.size(); ++i) s += 0.5 * (g[i].second + g[i - 1].second) * (g[i].first - g[i - 1].first);
    return s;
}

std::string_view to_string(TestKind kind) {
    switch (kind) {
        case TestKind::intra_vs_inter: return "intra_vs_inter";
        case TestKind::intra_vs_cross: return "intra_vs_cross";
        case TestKind::intra_vs_intra: return "intra_vs_intra";
    }
    return "intra_vs_inter";
}

bool SignificanceReport::all_significant() const {
    return !clusters.empty() && std::all_of(clusters.begin(), clusters.end(), [](const ClusterVerdict& v) { return v.significant; });
}

SignificanceReport cluster_significance(const SimilarityMatrix& similarity, const ClusterModel& model, double level) {
    SignificanceReport report;
    report.level = level;

    std::vector<int> eligible;
    for (int c = 0; c < static_cast<int>(model.cluster_count); ++c) {
        const auto size = model.members(c).size();
        if (size < 2) {
            report.warnings.push_back("cluster " + std::to_string(c) + " has fewer than 2 members; excluded");
        } else {
            eligible.push_back(c);
        }
    }
    if (eligible.size() < 2 || model.inter.size() < 2) {
        report.warnings.emplace_back("fewer than two testable clusters; no tests run");
        return report;
    }

    auto cross = [&](int a, int b) {
        std::vector<double> out;
        for (auto i : model.members(a)) {
            for (auto j : model.members(b)) out.push_back(similarity(i, j));
        }
        return out;
    };

    for (int c : eligible) {
        const auto& intra = model.intra[static_cast<std::size_t>(c)];
        ClusterVerdict verdict{c, model.members(c).size(), true};
        if (intra.size() < 2) {
            report.warnings.push_back("cluster " + std::to_string(c) + " has a single intra pair; excluded");
            continue;
        }
        auto run = [&](TestKind kind, int other, std::span<const double> rhs, bool decisive) {
            ClusterTest t;
            t.kind = kind;
            t.cluster = c;
            t.other = other;
            t.result = welch_t_test(intra, rhs);
            t.rejects = t.result.p_value < level;
            if (decisive && !t.rejects) verdict.significant = false;
            report.tests.push_back(t);
        };
        run(TestKind::intra_vs_inter, -1, model.inter, true);
        for (int d = 0; d < static_cast<int>(model.cluster_count); ++d) {
            if (d == c) continue;
            const auto xs = cross(c, d);
            if (xs.size() >= 2) run(TestKind::intra_vs_cross, d, xs, true);
        }
        for (int d : eligible) {
            if (d <= c) continue;
            const auto& other = model.intra[static_cast<std::size_t>(d)];
            if (other.size() >= 2) run(TestKind::intra_vs_intra, d, other, false);
        }
        report.clusters.push_back(verdict);
    }
    return report;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
    if (a.size() != b.size()) throw std::invalid_argument("labelings differ in length");
    const auto n = a.size();
    if (n < 2) return 1.0;
    std::map<std::pair<int, int>, double> table;
    std::map<int, double> rows, cols;
    for (std::size_t i = 0; i < n; ++i) {
        table[{a[i], b[i]}] += 1.0;
        rows[a[i]] += 1.0;
        cols[b[i]] += 1.0;
    }
    auto pairs = [](double x) { return x * (x - 1.0) / 2.0; };
    double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (const auto& [k, v] : table) index += pairs(v);
    for (const auto& [k, v] : rows) sum_rows += pairs(v);
    for (const auto& [k, v] : cols) sum_cols += pairs(v);
    const double expected = sum_rows * sum_cols / pairs(static_cast<double>(n));
    const double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;
    return (index - expected) / (max_index - expected);
}

}  // namespace trendflow
