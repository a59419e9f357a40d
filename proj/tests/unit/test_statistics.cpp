#include <doctest.h>

#include <cmath>
#include <vector>

#include "support.hpp"
#include "trendflow/statistics.hpp"

using namespace tft;
using doctest::Approx;

// Reference values below come from scipy.stats (ttest_ind with equal_var=False,
// t.sf, linregress) and numpy.quantile.

TEST_CASE("moments and quantiles") {
    const std::vector<double> xs{3, 1, 4, 1, 5, 9, 2, 6};
    CHECK(mean(xs) == Approx(31.0 / 8));
    double ss = 0;
    for (double x : xs) ss += (x - 31.0 / 8) * (x - 31.0 / 8);
    CHECK(sample_variance(xs) == Approx(ss / 7));
    CHECK(sample_variance(std::vector<double>{4.0}) == 0.0);
    CHECK(quantile(xs, 0.3) == Approx(2.1));
    CHECK(quantile(xs, 0.0) == 1.0);
    CHECK(quantile(xs, 1.0) == 9.0);
    CHECK(quantile(xs, 0.5) == Approx(3.5));
}

TEST_CASE("student t tail") {
    CHECK(student_t_two_sided_p(2.0, 10) == Approx(0.07338803477074039).epsilon(1e-9));
    CHECK(student_t_two_sided_p(-2.0, 10) == Approx(0.07338803477074039).epsilon(1e-9));
    CHECK(student_t_two_sided_p(3.5, 4.5) == Approx(0.02054168996938556).epsilon(1e-9));
    CHECK(student_t_two_sided_p(0.0, 7) == Approx(1.0));
}

TEST_CASE("welch t-test against reference") {
    const std::vector<double> a{1.2, 2.4, 3.1, 4.8, 5.0, 2.2};
    const std::vector<double> b{7.1, 6.3, 8.8, 5.9, 9.4, 7.7, 6.6, 8.0};
    const auto r = welch_t_test(a, b);
    CHECK(r.t == Approx(-5.779043325004635).epsilon(1e-9));
    CHECK(r.dof == Approx(9.515100792984676).epsilon(1e-9));
    CHECK(r.p_value == Approx(0.00021542269428067462).epsilon(1e-7));
    CHECK(r.mean_a == Approx(mean(a)));
    CHECK(r.mean_b == Approx(mean(b)));

    SUBCASE("swapping the samples flips t only") {
        const auto s = welch_t_test(b, a);
        CHECK(s.t == Approx(-r.t));
        CHECK(s.p_value == Approx(r.p_value));
    }
    SUBCASE("zero variance on both sides") {
        const std::vector<double> c{1, 1, 1}, d{2, 2}, e{1, 1};
        CHECK(welch_t_test(c, d).p_value == 0.0);
        CHECK(welch_t_test(c, e).p_value == 1.0);
    }
    SUBCASE("too few samples") {
        const std::vector<double> one{1.0};
        CHECK_THROWS_AS(welch_t_test(one, b), std::invalid_argument);
    }
}

TEST_CASE("welch test is calibrated under the null") {
    Rng rng(99);
    int rejections = 0;
    const int reps = 1000;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> a(50), b(50);
        for (auto& v : a) v = normal(rng);
        for (auto& v : b) v = normal(rng, 0.0, 2.0);
        if (welch_t_test(a, b).p_value < 0.01) ++rejections;
    }
    CHECK(static_cast<double>(rejections) / reps <= 0.02);
}

TEST_CASE("ordinary least squares") {
    SUBCASE("exact line") {
        const std::vector<double> x{1, 2, 3, 4, 5}, y{2, 4, 6, 8, 10};
        const auto f = ordinary_least_squares(x, y);
        CHECK(f.slope == Approx(2.0));
        CHECK(f.intercept == Approx(0.0).epsilon(1e-12));
        CHECK(f.r_squared == Approx(1.0));
        CHECK(f.slope_p_value < 1e-6);
        CHECK(f.n == 5);
    }
    SUBCASE("reference fit") {
        const std::vector<double> x{1, 2, 3, 4, 5, 6, 7}, y{2.1, 3.9, 6.2, 7.8, 10.1, 12.2, 13.8};
        const auto f = ordinary_least_squares(x, y);
        CHECK(f.slope == Approx(1.9857142857142858).epsilon(1e-12));
        CHECK(f.intercept == Approx(0.07142857142857117).epsilon(1e-9));
        CHECK(f.r_squared == Approx(0.9983465095850772).epsilon(1e-12));
        CHECK(f.slope_p_value == Approx(3.7769365748825075e-08).epsilon(1e-6));
    }
    SUBCASE("three points closed form") {
        const std::vector<double> x{0, 1, 3}, y{1, 2, 2};
        const double xbar = 4.0 / 3, ybar = 5.0 / 3;
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < 3; ++i) {
            sxy += (x[i] - xbar) * (y[i] - ybar);
            sxx += (x[i] - xbar) * (x[i] - xbar);
        }
        const auto f = ordinary_least_squares(x, y);
        CHECK(f.slope == Approx(sxy / sxx));
        CHECK(f.slope == Approx(2.0 / 7));
        CHECK(f.intercept == Approx(ybar - sxy / sxx * xbar));
    }
    SUBCASE("noise without trend") {
        Rng rng(5);
        std::vector<double> x, y;
        for (int i = 0; i < 200; ++i) {
            x.push_back(i);
            y.push_back(normal(rng));
        }
        const auto f = ordinary_least_squares(x, y);
        CHECK(f.slope_p_value > 0.05);
    }
    SUBCASE("degenerate inputs") {
        const std::vector<double> two{1, 2}, flat{3, 3, 3}, y3{1, 2, 3};
        CHECK_THROWS_AS(ordinary_least_squares(two, two), std::invalid_argument);
        CHECK_THROWS_AS(ordinary_least_squares(flat, y3), std::invalid_argument);
    }
}
