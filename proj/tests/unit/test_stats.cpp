#include <doctest.h>

#include <cmath>
#include <random>

#include "gibbsflow/stats.hpp"

using namespace gibbsflow;

TEST_CASE("mean estimate and running statistics agree") {
    const std::vector<double> xs = {1.0, 2.0, 4.0, 7.0};
    const Estimate e = mean_estimate(xs);
    CHECK(e.value == 3.5);
    CHECK(e.se == doctest::Approx(std::sqrt(7.0 / 4.0)));
    RunningStats rs;
    for (double x : xs) rs.push(x);
    CHECK(rs.estimate().value == doctest::Approx(e.value));
    CHECK(rs.estimate().se == doctest::Approx(e.se));
    CHECK(within_se(Estimate{1.0, 0.1, 10}, 1.29));
    CHECK_FALSE(within_se(Estimate{1.0, 0.1, 10}, 1.31));
}

TEST_CASE("Poisson pmf and cdf") {
    CHECK(poisson_pmf(0, 2.0) == doctest::Approx(std::exp(-2.0)));
    CHECK(poisson_pmf(3, 2.0) == doctest::Approx(std::exp(-2.0) * 8.0 / 6.0));
    CHECK(poisson_cdf(1, 2.0) == doctest::Approx(3.0 * std::exp(-2.0)));
}

TEST_CASE("goodness-of-fit tests accept the truth and reject a shift") {
    std::mt19937_64 gen(1);
    std::poisson_distribution<std::uint64_t> p(3.0);
    std::vector<std::uint64_t> xs(20000);
    for (auto& x : xs) x = p(gen);
    const auto pmf3 = [](std::uint64_t k) { return poisson_pmf(k, 3.0); };
    const auto pmf35 = [](std::uint64_t k) { return poisson_pmf(k, 3.5); };
    CHECK(chi_square_gof(xs, pmf3).p_value > 0.001);
    CHECK(chi_square_gof(xs, pmf35).p_value < 1e-6);
    CHECK(ks_test_discrete(xs, [](std::uint64_t k) { return poisson_cdf(k, 3.0); }).p_value > 0.001);

    std::exponential_distribution<double> ex(1.0);
    std::vector<double> ys(5000);
    for (auto& y : ys) y = ex(gen);
    CHECK(ks_test_continuous(ys, [](double y) { return 1.0 - std::exp(-y); }).p_value > 0.001);
    CHECK(ks_test_continuous(ys, [](double y) { return 1.0 - std::exp(-1.2 * y); }).p_value < 1e-6);

    std::map<std::vector<int>, std::uint64_t> a, b;
    for (int i = 0; i < 5000; ++i) {
        ++a[{static_cast<int>(p(gen))}];
        ++b[{static_cast<int>(p(gen))}];
    }
    CHECK(chi_square_two_sample(a, b).p_value > 0.001);
}

TEST_CASE("Kolmogorov tail, slope, autocorrelation") {
    CHECK(kolmogorov_tail(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    const std::vector<double> x = {1, 2, 3, 4}, y = {3, 5, 7, 9};
    CHECK(ols_slope(x, y) == doctest::Approx(2.0));
    const std::vector<double> alt = {1, -1, 1, -1, 1, -1, 1, -1};
    CHECK(autocorrelation(alt, 1) < -0.8);
}
