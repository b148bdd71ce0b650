#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

namespace gibbsflow {

/// A mean-type Monte Carlo estimate.
struct Estimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

Estimate mean_estimate(std::span<const double> xs);

/// |a - b| <= k * sqrt(se_a^2 + se_b^2)
bool within_se(const Estimate& a, const Estimate& b, double k = 3.0);
bool within_se(const Estimate& a, double target, double k = 3.0);

/// Running mean / variance (Welford).
class RunningStats {
public:
    void push(double x);
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    Estimate estimate() const;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct TestResult {
    double statistic = 0.0;
    double dof = 0.0;
    double p_value = 1.0;
};

double poisson_pmf(std::uint64_t k, double mean);
double poisson_cdf(std::uint64_t k, double mean);

/// Pearson goodness-of-fit of integer counts against a pmf on {0, 1, ...}.
/// Bins with expected count < 5 are merged (tail bins into their neighbours).
TestResult chi_square_gof(std::span<const std::uint64_t> samples,
                          const std::function<double(std::uint64_t)>& pmf);

/// Two-sample chi-square homogeneity test on categorical keys. Cells whose
/// pooled expected count is < 5 are lumped together.
TestResult chi_square_two_sample(const std::map<std::vector<int>, std::uint64_t>& a,
                                 const std::map<std::vector<int>, std::uint64_t>& b);

/// Asymptotic Kolmogorov tail P(sqrt(n) D > lambda).
double kolmogorov_tail(double lambda);

/// One-sample KS test against a continuous cdf.
TestResult ks_test_continuous(std::vector<double> samples, const std::function<double(double)>& cdf);

/// One-sample KS on integer data against a discrete cdf (conservative p-value).
TestResult ks_test_discrete(std::span<const std::uint64_t> samples,
                            const std::function<double(std::uint64_t)>& cdf);

/// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

/// Sample autocorrelation at the given lag.
double autocorrelation(std::span<const double> xs, std::size_t lag);

}  // namespace gibbsflow
