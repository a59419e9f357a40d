#pragma once

// Two-dimensional Gaussian mixtures fitted by expectation maximization, with
// the number of components chosen by cross-validated information criteria.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trendflow {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

struct Covariance2 {
    double xx = 1.0;
    double xy = 0.0;
    double yy = 1.0;

    double det() const { return xx * yy - xy * xy; }
    double trace() const { return xx + yy; }
    bool positive_definite() const { return xx > 0.0 && det() > 0.0; }
};

struct GaussianComponent {
    double weight = 1.0;
    Point2 mean;
    Covariance2 cov;
};

class GmmError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GaussianMixture {
public:
    GaussianMixture() = default;
    // Weights must sum to 1 and covariances be positive definite.
    explicit GaussianMixture(std::vector<GaussianComponent> components);

    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<GaussianComponent>& components() const noexcept { return components_; }

    double log_density(Point2 p) const;
    std::vector<double> responsibilities(Point2 p) const;
    // Most responsible component; ties go to the lower index.
    std::size_t argmax(Point2 p) const;
    double log_likelihood(std::span<const Point2> points) const;
    // Mixing weights plus means and full covariances: 6K - 1.
    std::size_t free_parameters() const noexcept { return components_.empty() ? 0 : 6 * components_.size() - 1; }

private:
    std::vector<GaussianComponent> components_;
};

struct EmOptions {
    int max_iterations = 500;
    double tolerance = 1e-6;  // on the per-point mean log-likelihood
    int restarts = 10;
};

struct EmResult {
    GaussianMixture mixture;
    double log_likelihood = 0.0;       // total, at the returned parameters
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;         // total log-likelihood after each E-step
    int regularizations = 0;           // covariance ridge applications
};

// Best of `options.restarts` seeded EM runs (k-means++ seeding). Throws
// GmmError when every restart degenerates.
EmResult fit_em(std::span<const Point2> points, std::size_t k, const EmOptions& options, std::uint64_t seed);

struct CvRow {
    std::size_t k = 0;
    double mean_bic = 0.0;
    double mean_aic = 0.0;
    std::vector<double> bic;  // per fold
    std::vector<double> aic;
    bool failed = false;
};

struct GmmOptions {
    std::size_t k_min = 1;
    std::size_t k_max = 10;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    EmOptions em;
};

struct GmmModel {
    GaussianMixture mixture;
    std::size_t selected_k = 0;
    std::vector<CvRow> cv;
    std::vector<std::vector<double>> responsibilities;  // per point
    std::vector<std::size_t> assignment;                // argmax responsibility
    double log_likelihood = 0.0;
    std::vector<std::string> warnings;

    // K minimizing mean held-out AIC; reported alongside the BIC choice.
    std::size_t aic_k() const;
};

// Held-out BIC and AIC over `folds` folds for each K, selection by mean BIC,
// refit on every point at the selected K. Needs at least 2 * k_max points.
GmmModel fit_gmm(std::span<const Point2> points, const GmmOptions& options = {});

}  // namespace trendflow
