#include "trendflow/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "trendflow/parallel.hpp"
#include "trendflow/random.hpp"

namespace trendflow {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;  // ln(2π)
constexpr double kRidge = 1e-6;

double log_normal(Point2 p, const GaussianComponent& c) {
    const double det = c.cov.det();
    const double dx = p.x - c.mean.x;
    const double dy = p.y - c.mean.y;
    const double q = (c.cov.yy * dx * dx - 2.0 * c.cov.xy * dx * dy + c.cov.xx * dy * dy) / det;
    return -kLog2Pi - 0.5 * std::log(det) - 0.5 * q;
}

double log_sum_exp(std::span<const double> v) {
    const double m = *std::max_element(v.begin(), v.end());
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

Covariance2 data_covariance(std::span<const Point2> points) {
    const double n = static_cast<double>(points.size());
    Point2 m;
    for (auto p : points) {
        m.x += p.x;
        m.y += p.y;
    }
    m.x /= n;
    m.y /= n;
    Covariance2 c{0.0, 0.0, 0.0};
    for (auto p : points) {
        c.xx += (p.x - m.x) * (p.x - m.x);
        c.xy += (p.x - m.x) * (p.y - m.y);
        c.yy += (p.y - m.y) * (p.y - m.y);
    }
    c.xx /= n;
    c.xy /= n;
    c.yy /= n;
    return c;
}

// Adds a ridge when the covariance is numerically singular. `fallback_scale`
// (the data's own scale) stands in for the trace when the covariance has
// collapsed to a point, including collapse down to rounding noise.
bool regularize(Covariance2& c, double fallback_scale, int& count) {
    const double tr = c.trace();
    const bool collapsed = !(tr / 2.0 > kRidge * fallback_scale);
    const bool singular = collapsed || !(c.det() > 1e-12 * (tr / 2.0) * (tr / 2.0)) || !(c.xx > 0.0);
    if (!singular) return true;
    const double scale = collapsed ? fallback_scale : tr / 2.0;
    const double ridge = std::max(kRidge * scale, std::numeric_limits<double>::min());
    c.xx += ridge;
    c.yy += ridge;
    ++count;
    return c.positive_definite();
}

double squared_distance(Point2 a, Point2 b) {
    return (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
}

std::vector<Point2> kmeanspp_centers(std::span<const Point2> points, std::size_t k, Rng& rng) {
    const auto n = points.size();
    std::vector<Point2> centers;
    centers.push_back(points[static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n]);
    std::vector<double> d2(n);
    while (centers.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (auto c : centers) best = std::min(best, squared_distance(points[i], c));
            d2[i] = best;
            total += best;
        }
        std::size_t pick = n - 1;
        if (total > 0.0) {
            const double target = uniform01(rng) * total;
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc > target) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)) % n;
        }
        centers.push_back(points[pick]);
    }
    return centers;
}

std::optional<EmResult> em_once(std::span<const Point2> points, std::size_t k, const EmOptions& options, Rng& rng) {
    const auto n = points.size();
    int regs = 0;
    const Covariance2 overall = data_covariance(points);
    const double fallback = overall.trace() > 0.0 ? overall.trace() / 2.0 : 1.0;

    std::vector<GaussianComponent> comps(k);
    const auto centers = kmeanspp_centers(points, k, rng);
    for (std::size_t c = 0; c < k; ++c) {
        comps[c].weight = 1.0 / static_cast<double>(k);
        comps[c].mean = centers[c];
        comps[c].cov = overall;
        if (!regularize(comps[c].cov, fallback, regs)) return std::nullopt;
    }

    EmResult result;
    std::vector<double> resp(n * k);
    std::vector<double> row(k);
    double prev_mean = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        // E-step
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t c = 0; c < k; ++c) row[c] = std::log(comps[c].weight) + log_normal(points[i], comps[c]);
            const double lse = log_sum_exp(row);
            if (!std::isfinite(lse)) return std::nullopt;
            ll += lse;
            for (std::size_t c = 0; c < k; ++c) resp[i * k + c] = std::exp(row[c] - lse);
        }
        result.trace.push_back(ll);
        result.iterations = iter + 1;
        const double mean_ll = ll / static_cast<double>(n);
        if (std::fabs(mean_ll - prev_mean) < options.tolerance) {
            result.converged = true;
            break;
        }
        prev_mean = mean_ll;

        // M-step
        for (std::size_t c = 0; c < k; ++c) {
            double nk = 0.0;
            Point2 mu;
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                nk += r;
                mu.x += r * points[i].x;
                mu.y += r * points[i].y;
            }
            if (!(nk > 1e-8)) return std::nullopt;  // component collapsed
            mu.x /= nk;
            mu.y /= nk;
            Covariance2 cov{0.0, 0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                const double r = resp[i * k + c];
                const double dx = points[i].x - mu.x;
                const double dy = points[i].y - mu.y;
                cov.xx += r * dx * dx;
                cov.xy += r * dx * dy;
                cov.yy += r * dy * dy;
            }
            cov.xx /= nk;
            cov.xy /= nk;
            cov.yy /= nk;
            if (!regularize(cov, fallback, regs)) return std::nullopt;
            comps[c] = {nk / static_cast<double>(n), mu, cov};
        }
        // Renormalize away rounding in the weights.
        double wsum = 0.0;
        for (const auto& c : comps) wsum += c.weight;
        for (auto& c : comps) c.weight /= wsum;
    }
    result.mixture = GaussianMixture(std::move(comps));
    if (!result.converged) {
        // Loop ended on an M-step; score the parameters actually returned.
        const double ll = result.mixture.log_likelihood(points);
        if (!std::isfinite(ll)) return std::nullopt;
        result.trace.push_back(ll);
    }
    result.log_likelihood = result.trace.back();
    result.regularizations = regs;
    return result;
}

void check_points(std::span<const Point2> points) {
    for (auto p : points) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("non-finite point");
    }
}

}  // namespace

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components) : components_(std::move(components)) {
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight >= 0.0)) throw std::invalid_argument("negative mixture weight");
        if (!c.cov.positive_definite()) throw std::invalid_argument("covariance not positive definite");
        total += c.weight;
    }
    if (!components_.empty() && std::fabs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
}

double GaussianMixture::log_density(Point2 p) const {
    std::vector<double> terms;
    terms.reserve(components_.size());
    for (const auto& c : components_) terms.push_back(std::log(c.weight) + log_normal(p, c));
    return log_sum_exp(terms);
}

std::vector<double> GaussianMixture::responsibilities(Point2 p) const {
    std::vector<double> terms;
    terms.reserve(components_.size());
    for (const auto& c : components_) terms.push_back(std::log(c.weight) + log_normal(p, c));
    const double lse = log_sum_exp(terms);
    for (auto& t : terms) t = std::exp(t - lse);
    return terms;
}

std::size_t GaussianMixture::argmax(Point2 p) const {
    const auto r = responsibilities(p);
    return static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
}

double GaussianMixture::log_likelihood(std::span<const Point2> points) const {
    double s = 0.0;
    for (auto p : points) s += log_density(p);
    return s;
}

EmResult fit_em(std::span<const Point2> points, std::size_t k, const EmOptions& options, std::uint64_t seed) {
    if (k == 0) throw std::invalid_argument("need at least one component");
    if (points.size() < k) throw std::invalid_argument("fewer points than components");
    if (options.restarts < 1 || options.max_iterations < 1) throw std::invalid_argument("bad EM options");
    check_points(points);

    std::optional<EmResult> best;
    for (int r = 0; r < options.restarts; ++r) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(r)}));
        auto fit = em_once(points, k, options, rng);
        if (fit && (!best || fit->log_likelihood > best->log_likelihood)) best = std::move(fit);
    }
    if (!best) throw GmmError("EM failed in every restart for K = " + std::to_string(k));
    return std::move(*best);
}

std::size_t GmmModel::aic_k() const {
    std::size_t best = 0;
    double score = std::numeric_limits<double>::infinity();
    for (const auto& row : cv) {
        if (!row.failed && row.mean_aic < score) {
            score = row.mean_aic;
            best = row.k;
        }
    }
    return best;
}

GmmModel fit_gmm(std::span<const Point2> points, const GmmOptions& options) {
    if (options.k_min < 1 || options.k_max < options.k_min) throw std::invalid_argument("bad component range");
    if (options.folds < 2) throw std::invalid_argument("need at least two folds");
    if (points.size() < 2 * options.k_max) throw std::invalid_argument("need at least 2 * k_max points");
    check_points(points);

    const auto n = points.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    {
        Rng rng(derive_seed(options.seed, {0xF01D}));
        for (std::size_t i = n - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
            std::swap(perm[i], perm[std::min(j, i)]);
        }
    }
    std::vector<std::size_t> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold_of[perm[pos]] = pos % options.folds;

    const std::size_t ks = options.k_max - options.k_min + 1;
    struct Score {
        double bic = 0.0;
        double aic = 0.0;
        bool ok = false;
    };
    std::vector<Score> scores(ks * options.folds);
    parallel_for(scores.size(), [&](std::size_t task) {
        const std::size_t k = options.k_min + task / options.folds;
        const std::size_t fold = task % options.folds;
        std::vector<Point2> train, test;
        for (std::size_t i = 0; i < n; ++i) (fold_of[i] == fold ? test : train).push_back(points[i]);
        if (train.size() < k || test.empty()) return;
        try {
            const auto fit = fit_em(train, k, options.em, derive_seed(options.seed, {k, fold}));
            const double ll = fit.mixture.log_likelihood(test);
            if (!std::isfinite(ll)) return;
            const double p = static_cast<double>(fit.mixture.free_parameters());
            scores[task] = {-2.0 * ll + p * std::log(static_cast<double>(test.size())), -2.0 * ll + 2.0 * p, true};
        } catch (const GmmError&) {
        }
    });

    GmmModel model;
    double best_bic = std::numeric_limits<double>::infinity();
    for (std::size_t ki = 0; ki < ks; ++ki) {
        CvRow row;
        row.k = options.k_min + ki;
        for (std::size_t f = 0; f < options.folds; ++f) {
            const auto& s = scores[ki * options.folds + f];
            if (!s.ok) row.failed = true;
            row.bic.push_back(s.ok ? s.bic : std::numeric_limits<double>::infinity());
            row.aic.push_back(s.ok ? s.aic : std::numeric_limits<double>::infinity());
        }
        const double folds = static_cast<double>(options.folds);
        row.mean_bic = std::accumulate(row.bic.begin(), row.bic.end(), 0.0) / folds;
        row.mean_aic = std::accumulate(row.aic.begin(), row.aic.end(), 0.0) / folds;
        if (row.failed) {
            model.warnings.push_back("K = " + std::to_string(row.k) + " failed in at least one fold; not selectable");
        } else if (row.mean_bic < best_bic) {
            best_bic = row.mean_bic;
            model.selected_k = row.k;
        }
        model.cv.push_back(std::move(row));
    }
    if (model.selected_k == 0) throw GmmError("no component count could be fitted");
    if (model.aic_k() != model.selected_k) {
        model.warnings.push_back("AIC prefers K = " + std::to_string(model.aic_k()) + ", BIC prefers K = " +
                                 std::to_string(model.selected_k));
    }

    auto fit = fit_em(points, model.selected_k, options.em, derive_seed(options.seed, {0xA11, model.selected_k}));
    model.mixture = std::move(fit.mixture);
    model.log_likelihood = fit.log_likelihood;
    for (auto p : points) {
        model.responsibilities.push_back(model.mixture.responsibilities(p));
        const auto& r = model.responsibilities.back();
        model.assignment.push_back(static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin()));
    }
    return model;
}

}  // namespace trendflow
