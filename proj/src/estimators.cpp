#include "gibbsflow/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace gibbsflow {

namespace {

double falling(double n, int k) {
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= (n - j);
    return r;
}

double factorial(int k) { return std::tgamma(k + 1.0); }

void finish_terms(JanossyReport& rep) {
    if (rep.terms.empty()) return;
    rep.truncation_bound = std::abs(rep.terms.back());
    for (std::size_t k = 1; k < rep.terms.size(); ++k) {
        if (std::abs(rep.terms[k]) > std::abs(rep.terms[k - 1])) rep.nondecreasing_flag = true;
    }
}

}  // namespace

Window box_around(const Point& x, double ell, int dim) {
    Point lo = x, hi = x;
    for (int a = 0; a < dim; ++a) {
        lo[a] -= ell / 2.0;
        hi[a] += ell / 2.0;
    }
    return Window(dim, lo, hi);
}

namespace {

std::vector<Window> checked_boxes(std::span<const Point> centres, double ell, const Window& ambient) {
    if (!(ell > 0.0)) throw std::invalid_argument("box side must be positive");
    std::vector<Window> boxes;
    for (const auto& c : centres) {
        boxes.push_back(box_around(c, ell, ambient.dim()));
        if (!ambient.contains(boxes.back())) throw std::invalid_argument("box leaves the sample window");
    }
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        for (std::size_t j = i + 1; j < boxes.size(); ++j) {
            if (boxes[i].intersects(boxes[j])) throw std::invalid_argument("boxes overlap");
        }
    }
    return boxes;
}

}  // namespace

EstimatorReport correlation_estimate(std::span<const Configuration> samples, std::span<const Point> centres,
                                     double ell) {
    if (samples.empty()) throw std::invalid_argument("correlation_estimate: no samples");
    const Window& amb = samples.front().ambient();
    const auto boxes = checked_boxes(centres, ell, amb);
    const double qn = std::pow(std::pow(ell, amb.dim()), static_cast<double>(centres.size()));
    RunningStats rs;
    for (const auto& s : samples) {
        double prod = 1.0;
        for (const auto& b : boxes) {
            prod *= static_cast<double>(count(s, b));
            if (prod == 0.0) break;
        }
        rs.push(prod / qn);
    }
    const Estimate e = rs.estimate();
    return {e.value, e.se, e.n, "box-product"};
}

JanossyReport janossy_from_correlations(const std::function<double(std::span<const Point>)>& rho,
                                        std::span<const Point> xs, const Window& window, int K, int grid) {
    if (K < 0 || K > 3) throw std::invalid_argument("janossy_from_correlations: K must be in [0, 3]");
    if (grid < 1) throw std::invalid_argument("janossy_from_correlations: grid must be positive");
    const int d = window.dim();
    std::vector<double> nodes[2];
    double cell = 1.0;
    for (int a = 0; a < d; ++a) {
        const double h = window.side(a) / grid;
        cell *= h;
        for (int i = 0; i < grid; ++i) nodes[a].push_back(window.lo()[a] + (i + 0.5) * h);
    }
    const std::size_t per_point = nodes[0].size() * (d == 2 ? nodes[1].size() : 1);
    auto node = [&](std::size_t idx) {
        return d == 2 ? Point(nodes[0][idx % grid], nodes[1][idx / grid]) : Point(nodes[0][idx]);
    };

    JanossyReport rep;
    std::vector<Point> args(xs.begin(), xs.end());
    for (int k = 0; k <= K; ++k) {
        double integral = 0.0;
        std::size_t total = 1;
        for (int j = 0; j < k; ++j) total *= per_point;
        for (std::size_t flat = 0; flat < total; ++flat) {
            args.resize(xs.size());
            std::size_t rem = flat;
            for (int j = 0; j < k; ++j) {
                args.push_back(node(rem % per_point));
                rem /= per_point;
            }
            integral += rho(args);
        }
        integral *= std::pow(cell, k);
        rep.terms.push_back((k % 2 ? -1.0 : 1.0) / factorial(k) * integral);
    }
    for (double t : rep.terms) rep.value += t;
    finish_terms(rep);
    return rep;
}

JanossyReport janossy_estimate(std::span<const Configuration> samples, std::span<const Point> xs,
                               const Window& window, double ell, int K) {
    if (K < 0 || K > 3) throw std::invalid_argument("janossy_estimate: K must be in [0, 3]");
    if (samples.empty()) throw std::invalid_argument("janossy_estimate: no samples");
    const auto boxes = checked_boxes(xs, ell, window);
    const double n = static_cast<double>(xs.size());
    const double qn = std::pow(std::pow(ell, window.dim()), n);
    RunningStats total;
    std::vector<RunningStats> per(K + 1);
    for (const auto& s : samples) {
        double prod = 1.0;
        for (const auto& b : boxes) prod *= static_cast<double>(count(s, b));
        const double rest = static_cast<double>(count(s, window)) - n;
        double v = 0.0;
        for (int k = 0; k <= K; ++k) {
            const double term = prod == 0.0 ? 0.0 : (k % 2 ? -1.0 : 1.0) / factorial(k) * prod * falling(rest, k) / qn;
            per[k].push(term);
            v += term;
        }
        total.push(v);
    }
    JanossyReport rep;
    const Estimate e = total.estimate();
    rep.value = e.value;
    rep.std_error = e.se;
    rep.n_samples = e.n;
    for (const auto& p : per) rep.terms.push_back(p.mean());
    finish_terms(rep);
    return rep;
}

namespace {

JanossyReport integrated_janossy(std::span<const Configuration> samples, const Window& window, int K, int n_min,
                                 int n_max) {
    if (K < 0 || K > 3) throw std::invalid_argument("integrated Janossy: K must be in [0, 3]");
    if (samples.empty()) throw std::invalid_argument("integrated Janossy: no samples");
    RunningStats total;
    std::vector<RunningStats> per(K + 1);
    for (const auto& s : samples) {
        const double N = static_cast<double>(count(s, window));
        double v = 0.0;
        for (int k = 0; k <= K; ++k) {
            double term = 0.0;
            for (int n = n_min; n <= n_max; ++n) term += falling(N, n + k) / factorial(n);
            term *= (k % 2 ? -1.0 : 1.0) / factorial(k);
            per[k].push(term);
            v += term;
        }
        total.push(v);
    }
    JanossyReport rep;
    const Estimate e = total.estimate();
    rep.value = e.value;
    rep.std_error = e.se;
    rep.n_samples = e.n;
    for (const auto& p : per) rep.terms.push_back(p.mean());
    finish_terms(rep);
    return rep;
}

}  // namespace

JanossyReport janossy_normalisation(std::span<const Configuration> samples, const Window& window, int K,
                                    int n_max) {
    return integrated_janossy(samples, window, K, 0, n_max);
}

JanossyReport psi_density(std::span<const Point> zeta, std::span<const Configuration> samples, const Window& window,
                          double ell, int K, int n_max) {
    const double scale = std::exp(window.volume());
    JanossyReport rep;
    if (zeta.empty()) {
        rep = integrated_janossy(samples, window, K, 1, n_max);
        rep.value = 1.0 - rep.value;
        for (auto& t : rep.terms) t = -t;
    } else {
        if (static_cast<int>(zeta.size()) > n_max) throw std::invalid_argument("psi_density: order unavailable");
        rep = janossy_estimate(samples, zeta, window, ell, K);
    }
    rep.value *= scale;
    rep.std_error *= scale;
    rep.truncation_bound *= scale;
    for (auto& t : rep.terms) t *= scale;
    return rep;
}

std::vector<int> occupancy(const Configuration& cfg, const Window& window, int m, int cap) {
    if (m < 1 || cap < 0) throw std::invalid_argument("occupancy: m >= 1 and cap >= 0 required");
    int per_axis[2] = {m, 1};
    if (window.dim() == 2) {
        const int k = static_cast<int>(std::lround(std::sqrt(m)));
        if (k * k != m) throw std::invalid_argument("occupancy: m must be a perfect square in d = 2");
        per_axis[0] = per_axis[1] = k;
    }
    std::vector<int> occ(m, 0);
    for (const auto& p : cfg.points()) {
        if (!window.contains(p)) continue;
        int idx[2] = {0, 0};
        for (int a = 0; a < window.dim(); ++a) {
            idx[a] = std::clamp(static_cast<int>((p[a] - window.lo()[a]) / window.side(a) * per_axis[a]), 0,
                                per_axis[a] - 1);
        }
        ++occ[idx[1] * per_axis[0] + idx[0]];
    }
    for (auto& c : occ) c = std::min(c, cap + 1);
    return occ;
}

KlReport rel_entropy_discretized(std::span<const Configuration> mu, std::span<const Configuration> nu,
                                 const Window& window, int m, int cap) {
    if (mu.empty() || nu.empty()) throw std::invalid_argument("rel_entropy_discretized: empty sample set");
    std::map<std::vector<int>, std::pair<double, double>> table;
    KlReport r;
    r.n_mu = mu.size();
    r.n_nu = nu.size();
    auto tally = [&](std::span<const Configuration> s, bool first, double& overflow) {
        for (const auto& c : s) {
            auto o = occupancy(c, window, m, cap);
            if (std::any_of(o.begin(), o.end(), [cap](int x) { return x > cap; })) overflow += 1.0;
            auto& cell = table[std::move(o)];
            (first ? cell.first : cell.second) += 1.0;
        }
        overflow /= static_cast<double>(s.size());
    };
    tally(mu, true, r.overflow_mu);
    tally(nu, false, r.overflow_nu);

    const double nm = static_cast<double>(r.n_mu), nn = static_cast<double>(r.n_nu);
    double plug = 0.0, second_mu = 0.0, ratio_sq = 0.0, cross_bias = 0.0;
    std::size_t support = 0;
    for (const auto& [key, c] : table) {
        if (c.first == 0.0) continue;
        ++support;
        if (c.second == 0.0) {
            ++r.unmatched;
            continue;
        }
        const double p = c.first / nm, q = c.second / nn, l = std::log(p / q);
        plug += p * l;
        second_mu += p * l * l;
        ratio_sq += p * p / q;
        cross_bias += p * (1.0 - q) / q;
    }
    if (r.unmatched > 0) {
        r.infinite = true;
        r.value = r.plug_in = std::numeric_limits<double>::infinity();
        r.std_error = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    r.plug_in = plug;
    const double bias = (static_cast<double>(support) - 1.0) / (2.0 * nm) + cross_bias / (2.0 * nn);
    r.value = std::max(0.0, plug - bias);
    const double var_mu = std::max(0.0, second_mu - plug * plug);
    const double var_nu = std::max(0.0, ratio_sq - 1.0);
    r.std_error = std::sqrt(var_mu / nm + var_nu / nn);
    return r;
}

double moment_bound(int k, double volume, const MomentConstants& c) {
    return c.c3 * std::pow(c.c2, volume / k) * k / std::log1p(k / (c.c1 * volume));
}

std::vector<MomentRow> moment_check(std::span<const Configuration> samples, const Window& delta, int k_max,
                                    MomentConstants c, double t) {
    if (k_max < 1 || k_max > 6) throw std::invalid_argument("moment_check: k_max must be in [1, 6]");
    if (samples.empty()) throw std::invalid_argument("moment_check: no samples");
    c.c3 *= std::exp(t);
    std::vector<double> counts;
    for (const auto& s : samples) counts.push_back(static_cast<double>(count(s, delta)));
    std::vector<MomentRow> rows;
    for (int k = 1; k <= k_max; ++k) {
        RunningStats rs;
        for (double n : counts) rs.push(std::pow(n, k));
        const Estimate e = rs.estimate();
        const double emp = std::pow(e.value, 1.0 / k);
        const double se = e.value > 0.0 ? e.se * std::pow(e.value, 1.0 / k - 1.0) / k : 0.0;
        const double bound = moment_bound(k, delta.volume(), c);
        rows.push_back({k, emp, se, bound, emp - 3.0 * se > bound});
    }
    return rows;
}

std::vector<double> ergodic_average(const Configuration& eta, const RootedObservable& h,
                                    std::span<const Window> windows) {
    std::vector<double> out;
    std::vector<Point> offsets;
    for (const auto& w : windows) {
        if (!eta.ambient().contains(dilate(w, h.radius))) {
            throw std::invalid_argument("ergodic_average: configuration window too small for the averaging window");
        }
        double sum = 0.0;
        for (const auto& x : eta.points()) {
            if (!w.contains(x)) continue;
            offsets.clear();
            if (h.radius > 0.0) {
                eta.for_each_within(x, h.radius, [&](const Point& y) {
                    if (y == x) return;
                    offsets.emplace_back(y[0] - x[0], y[1] - x[1]);
                });
            }
            sum += h.fn(offsets);
        }
        out.push_back(sum / w.volume());
    }
    return out;
}

VariableChangeResult variable_change_test(double volume, double t, std::size_t n_reps, const SeedSpec& seed,
                                          int cap) {
    if (!(volume > 0.0) || !(t >= 0.0) || n_reps == 0) throw std::invalid_argument("variable_change_test: bad input");
    const double pt = std::exp(-t);
    CounterRng left(seed.with_tag(seed.stream_tag + "/left"));
    CounterRng right(seed.with_tag(seed.stream_tag + "/right"));
    std::map<std::vector<int>, std::uint64_t> joint_l, joint_r;
    std::vector<std::uint64_t> union_l, union_r;
    std::vector<double> marks;
    constexpr std::size_t kMaxMarks = 200000;
    auto key = [cap](std::uint64_t a, std::uint64_t b, std::uint64_t c) {
        const auto cl = [cap](std::uint64_t x) { return static_cast<int>(std::min<std::uint64_t>(x, cap + 1)); };
        return std::vector<int>{cl(a), cl(b), cl(c)};
    };
    for (std::size_t r = 0; r < n_reps; ++r) {
        // Left: marked unit Poisson initial points, independent unit Poisson fresh points.
        const std::uint64_t n_omega = left.poisson(volume);
        std::uint64_t alive = 0;
        for (std::uint64_t i = 0; i < n_omega; ++i) alive += left.exponential() > t ? 1 : 0;
        const std::uint64_t n_zeta = left.poisson(volume);
        ++joint_l[key(alive, n_omega - alive, n_zeta)];
        union_l.push_back(alive + n_zeta);

        // Right: thin a Poisson((1 + p_t)) union, mark the removed part beyond t,
        // add a Poisson((1 - p_t)) part marked before t.
        const std::uint64_t n_chi = right.poisson((1.0 + pt) * volume);
        std::uint64_t fresh = 0;
        for (std::uint64_t i = 0; i < n_chi; ++i) fresh += right.uniform() <= 1.0 / (1.0 + pt) ? 1 : 0;
        const std::uint64_t kept = n_chi - fresh;
        const std::uint64_t dead = 1.0 - pt > 0.0 ? right.poisson((1.0 - pt) * volume) : 0;
        for (std::uint64_t i = 0; i < kept; ++i) {
            const double s = t + right.exponential();
            if (marks.size() < kMaxMarks) marks.push_back(s);
        }
        for (std::uint64_t i = 0; i < dead; ++i) {
            // Exp(1) conditioned on <= t by inversion.
            const double s = -std::log1p(-right.uniform() * (1.0 - pt));
            if (marks.size() < kMaxMarks) marks.push_back(s);
        }
        ++joint_r[key(kept, dead, fresh)];
        union_r.push_back(n_chi);
    }
    VariableChangeResult res;
    res.n = n_reps;
    res.joint = chi_square_two_sample(joint_l, joint_r);
    const double mean = (1.0 + pt) * volume;
    const auto cdf = [mean](std::uint64_t k) { return poisson_cdf(k, mean); };
    res.union_left = ks_test_discrete(union_l, cdf);
    res.union_right = ks_test_discrete(union_r, cdf);
    if (!marks.empty()) {
        res.marks_right = ks_test_continuous(marks, [](double s) { return -std::expm1(-s); });
    }
    return res;
}

}  // namespace gibbsflow
