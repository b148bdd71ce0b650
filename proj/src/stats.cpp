#include "gibbsflow/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/poisson.hpp>

namespace gibbsflow {

Estimate mean_estimate(std::span<const double> xs) {
    RunningStats rs;
    for (double x : xs) rs.push(x);
    return rs.estimate();
}

bool within_se(const Estimate& a, const Estimate& b, double k) {
    return std::abs(a.value - b.value) <= k * std::sqrt(a.se * a.se + b.se * b.se);
}

bool within_se(const Estimate& a, double target, double k) {
    return std::abs(a.value - target) <= k * a.se;
}

void RunningStats::push(double x) {
    ++n_;
    const double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

Estimate RunningStats::estimate() const {
    return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
}

double poisson_pmf(std::uint64_t k, double mean) {
    if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

double poisson_cdf(std::uint64_t k, double mean) {
    if (mean == 0.0) return 1.0;
    return boost::math::cdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(k));
}

namespace {

double chi2_sf(double stat, double dof) {
    if (dof < 1.0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(dof), stat));
}

}  // namespace

TestResult chi_square_gof(std::span<const std::uint64_t> samples,
                          const std::function<double(std::uint64_t)>& pmf) {
    if (samples.empty()) throw std::invalid_argument("chi_square_gof: no samples");
    const double n = static_cast<double>(samples.size());
    std::uint64_t kmax = *std::max_element(samples.begin(), samples.end());
    // Extend the support until the expected tail is negligible.
    double mass = 0.0;
    std::uint64_t k = 0;
    std::vector<double> expected;
    while (k <= kmax || n * (1.0 - mass) >= 5.0) {
        const double p = pmf(k);
        expected.push_back(n * p);
        mass += p;
        ++k;
        if (k > kmax && k > 100000) break;
    }
    std::vector<double> observed(expected.size(), 0.0);
    for (auto s : samples) observed[s] += 1.0;
    // The last bin absorbs the whole upper tail.
    expected.back() += n * std::max(0.0, 1.0 - mass);

    // Merge from the left and then the right until each bin has expected >= 5.
    std::vector<double> eb, ob;
    double ea = 0.0, oa = 0.0;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        ea += expected[i];
        oa += observed[i];
        if (ea >= 5.0) {
            eb.push_back(ea);
            ob.push_back(oa);
            ea = oa = 0.0;
        }
    }
    if (ea > 0.0 || oa > 0.0) {
        if (eb.empty()) {
            eb.push_back(ea);
            ob.push_back(oa);
        } else {
            eb.back() += ea;
            ob.back() += oa;
        }
    }
    TestResult res;
    for (std::size_t i = 0; i < eb.size(); ++i) {
        const double d = ob[i] - eb[i];
        res.statistic += d * d / eb[i];
    }
    res.dof = static_cast<double>(eb.size()) - 1.0;
    res.p_value = chi2_sf(res.statistic, res.dof);
    return res;
}

TestResult chi_square_two_sample(const std::map<std::vector<int>, std::uint64_t>& a,
                                 const std::map<std::vector<int>, std::uint64_t>& b) {
    double na = 0.0, nb = 0.0;
    std::map<std::vector<int>, std::pair<double, double>> cells;
    for (const auto& [k, v] : a) {
        cells[k].first += static_cast<double>(v);
        na += static_cast<double>(v);
    }
    for (const auto& [k, v] : b) {
        cells[k].second += static_cast<double>(v);
        nb += static_cast<double>(v);
    }
    if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi_square_two_sample: empty sample");
    const double n = na + nb;
    std::vector<std::pair<double, double>> bins;
    std::pair<double, double> lump{0.0, 0.0};
    for (const auto& [k, c] : cells) {
        const double tot = c.first + c.second;
        if (std::min(na, nb) * tot / n >= 5.0) {
            bins.push_back(c);
        } else {
            lump.first += c.first;
            lump.second += c.second;
        }
    }
    if (lump.first + lump.second > 0.0) {
        if (std::min(na, nb) * (lump.first + lump.second) / n >= 5.0 || bins.empty()) {
            bins.push_back(lump);
        } else {
            // Too small even when lumped: fold into the smallest regular bin.
            auto it = std::min_element(bins.begin(), bins.end(), [](auto& x, auto& y) {
                return x.first + x.second < y.first + y.second;
            });
            it->first += lump.first;
            it->second += lump.second;
        }
    }
    TestResult res;
    for (const auto& [ca, cb] : bins) {
        const double tot = ca + cb;
        const double ea = na * tot / n, eb = nb * tot / n;
        res.statistic += (ca - ea) * (ca - ea) / ea + (cb - eb) * (cb - eb) / eb;
    }
    res.dof = static_cast<double>(bins.size()) - 1.0;
    res.p_value = chi2_sf(res.statistic, res.dof);
    return res;
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? 1.0 : -1.0) * term;
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n) {
    // Stephens' small-sample correction of the asymptotic statistic.
    const double sn = std::sqrt(n);
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

TestResult ks_test_continuous(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, n, ks_p_value(d, n)};
}

TestResult ks_test_discrete(std::span<const std::uint64_t> samples,
                            const std::function<double(std::uint64_t)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_test: no samples");
    const std::uint64_t kmax = *std::max_element(samples.begin(), samples.end());
    std::vector<double> hist(kmax + 1, 0.0);
    for (auto s : samples) hist[s] += 1.0;
    const double n = static_cast<double>(samples.size());
    double acc = 0.0, d = 0.0;
    for (std::uint64_t k = 0; k <= kmax; ++k) {
        acc += hist[k];
        d = std::max(d, std::abs(acc / n - cdf(k)));
    }
    return {d, n, ks_p_value(d, n)};
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("ols_slope: need >= 2 pairs");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

double autocorrelation(std::span<const double> xs, std::size_t lag) {
    if (xs.size() <= lag + 1) return 0.0;
    const double n = static_cast<double>(xs.size());
    const double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) den += (xs[i] - m) * (xs[i] - m);
    for (std::size_t i = 0; i + lag < xs.size(); ++i) num += (xs[i] - m) * (xs[i + lag] - m);
    return den > 0.0 ? num / den : 0.0;
}

}  // namespace gibbsflow
