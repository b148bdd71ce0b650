#include "gibbsflow/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace gibbsflow {

namespace {

std::vector<Point> occupied(std::span<const Point> centres, std::uint32_t eta) {
    std::vector<Point> out;
    for (std::size_t i = 0; i < centres.size(); ++i) {
        if (eta >> i & 1u) out.push_back(centres[i]);
    }
    return out;
}

int top_bit(std::uint32_t eta) { return 31 - __builtin_clz(eta); }

}  // namespace

LatticeModel::LatticeModel(InteractionSpec spec, std::vector<Point> centres, double cell_volume)
    : spec_(std::move(spec)), m_(static_cast<int>(centres.size())), v_(cell_volume), centres_(std::move(centres)) {
    spec_.validate();
    if (m_ < 1 || m_ > kLatticeMaxCells) {
        throw std::invalid_argument("LatticeModel: cell count must be in [1, " + std::to_string(kLatticeMaxCells) + "]");
    }
    if (!(v_ > 0.0)) throw std::invalid_argument("LatticeModel: cell volume must be positive");
    const std::size_t n = states();
    birth_.assign(n * m_, 0.0);
    for (std::uint32_t eta = 0; eta < n; ++eta) {
        const auto occ = occupied(centres_, eta);
        for (int i = 0; i < m_; ++i) {
            if (eta >> i & 1u) continue;
            birth_[eta * m_ + i] = v_ * birth_rate(spec_, centres_[i], std::span<const Point>(occ));
        }
    }
    logw_.assign(n, 0.0);
    for (std::uint32_t eta = 1; eta < n; ++eta) {
        const int k = top_bit(eta);
        const std::uint32_t rest = eta & ~(1u << k);
        logw_[eta] = logw_[rest] + std::log(birth_[rest * m_ + k]);
    }
}

LatticeModel LatticeModel::line(const InteractionSpec& spec, int m, double cell_width, double origin) {
    if (spec.dim != 1) throw std::invalid_argument("LatticeModel::line: needs a one-dimensional interaction");
    std::vector<Point> c;
    for (int i = 0; i < m; ++i) c.emplace_back(origin + (i + 0.5) * cell_width);
    return LatticeModel(spec, std::move(c), cell_width);
}

double LatticeModel::energy_at(int i, std::uint32_t eta) const {
    const auto occ = occupied(centres_, eta & ~(1u << i));
    return conditional_energy(spec_, centres_[i], std::span<const Point>(occ));
}

double LatticeModel::energy(std::uint32_t eta) const {
    double e = 0.0;
    std::uint32_t built = 0;
    for (int i = 0; i < m_; ++i) {
        if (!(eta >> i & 1u)) continue;
        e += energy_at(i, built);
        built |= 1u << i;
    }
    return e;
}

// ---------------------------------------------------------------------------

GeneratorMatrix::GeneratorMatrix(const LatticeModel& model) : m_(model.cells()) {
    const std::size_t n = states();
    rate_.assign(n * m_, 0.0);
    exit_.assign(n, 0.0);
    for (std::uint32_t eta = 0; eta < n; ++eta) {
        double total = 0.0;
        for (int i = 0; i < m_; ++i) {
            const double r = (eta >> i & 1u) ? 1.0 : model.birth(eta, i);
            rate_[eta * m_ + i] = r;
            total += r;
        }
        exit_[eta] = total;
        lambda_ = std::max(lambda_, total);
    }
}

std::vector<double> GeneratorMatrix::left(std::span<const double> x) const {
    const std::size_t n = states();
    std::vector<double> out(n, 0.0);
    for (std::uint32_t eta = 0; eta < n; ++eta) {
        const double xe = x[eta];
        if (xe == 0.0) continue;
        out[eta] -= xe * exit_[eta];
        const double* r = &rate_[eta * m_];
        for (int i = 0; i < m_; ++i) out[eta ^ (1u << i)] += xe * r[i];
    }
    return out;
}

std::vector<double> GeneratorMatrix::right(std::span<const double> f) const {
    const std::size_t n = states();
    std::vector<double> out(n, 0.0);
    for (std::uint32_t eta = 0; eta < n; ++eta) {
        const double* r = &rate_[eta * m_];
        double acc = 0.0;
        for (int i = 0; i < m_; ++i) acc += r[i] * (f[eta ^ (1u << i)] - f[eta]);
        out[eta] = acc;
    }
    return out;
}

Eigen::MatrixXd GeneratorMatrix::dense() const {
    if (m_ > kLatticeMaxDense) {
        throw std::invalid_argument("GeneratorMatrix::dense: m exceeds " + std::to_string(kLatticeMaxDense));
    }
    const auto n = static_cast<Eigen::Index>(states());
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (std::uint32_t eta = 0; eta < states(); ++eta) {
        Q(eta, eta) = -exit_[eta];
        for (int i = 0; i < m_; ++i) Q(eta, eta ^ (1u << i)) = rate(eta, i);
    }
    return Q;
}

GeneratorMatrix build_generator(const LatticeModel& model) { return GeneratorMatrix(model); }

StateDist stationary(const LatticeModel& model) {
    const std::size_t n = model.states();
    double mx = -std::numeric_limits<double>::infinity();
    for (std::uint32_t eta = 0; eta < n; ++eta) mx = std::max(mx, model.log_weight(eta));
    StateDist nu(n);
    double z = 0.0;
    for (std::uint32_t eta = 0; eta < n; ++eta) z += nu[eta] = std::exp(model.log_weight(eta) - mx);
    for (auto& p : nu) p /= z;
    return nu;
}

double detailed_balance_residual(const StateDist& nu, const GeneratorMatrix& Q) {
    double worst = 0.0;
    for (std::uint32_t eta = 0; eta < Q.states(); ++eta) {
        for (int i = 0; i < Q.cells(); ++i) {
            const std::uint32_t other = eta ^ (1u << i);
            worst = std::max(worst, std::abs(nu[eta] * Q.rate(eta, i) - nu[other] * Q.rate(other, i)));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------

namespace {

// Poisson-weighted sum of P^k applied by `step`, P = I + Q / lambda.
template <class Step>
std::vector<double> uniformize(std::vector<double> x, double lambda, double t, Step&& step) {
    if (t == 0.0) return x;
    if (t < 0.0) throw std::invalid_argument("evolve: t must be >= 0");
    constexpr double kChunk = 30.0;
    const int chunks = std::max(1, static_cast<int>(std::ceil(lambda * t / kChunk)));
    const double a = lambda * t / chunks;
    for (int c = 0; c < chunks; ++c) {
        std::vector<double> term = x;
        double w = std::exp(-a);
        std::vector<double> acc(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) acc[j] = w * term[j];
        for (int k = 1;; ++k) {
            const std::vector<double> qx = step(term);
            for (std::size_t j = 0; j < x.size(); ++j) term[j] += qx[j] / lambda;
            w *= a / k;
            for (std::size_t j = 0; j < x.size(); ++j) acc[j] += w * term[j];
            // Tail after k is below w * (k + 1) / (k + 1 - a) once k + 1 > a.
            if (k + 1 > a && w * (k + 1) / (k + 1 - a) < 1e-17) break;
        }
        x = std::move(acc);
    }
    return x;
}

}  // namespace

std::vector<double> evolve(std::span<const double> x, const GeneratorMatrix& Q, double t) {
    return uniformize(std::vector<double>(x.begin(), x.end()), Q.max_exit_rate(), t,
                      [&](const std::vector<double>& v) { return Q.left(v); });
}

std::vector<double> evolve_right(std::span<const double> f, const GeneratorMatrix& Q, double t) {
    return uniformize(std::vector<double>(f.begin(), f.end()), Q.max_exit_rate(), t,
                      [&](const std::vector<double>& v) { return Q.right(v); });
}

std::vector<std::vector<double>> evolve_grid(std::span<const double> x, const GeneratorMatrix& Q,
                                             std::span<const double> times) {
    std::vector<std::vector<double>> out;
    std::vector<double> cur(x.begin(), x.end());
    double now = 0.0;
    for (double t : times) {
        if (t < now) throw std::invalid_argument("evolve_grid: times must be nondecreasing");
        cur = evolve(cur, Q, t - now);
        now = t;
        out.push_back(cur);
    }
    return out;
}

namespace {

// (1 + d) log(1 + d) - d, accurate near 0.
double entropy_kernel(double d) {
    if (std::abs(d) < 1e-3) {
        const double d2 = d * d;
        return d2 * (0.5 - d / 6.0 + d2 / 12.0 - d2 * d / 20.0 + d2 * d2 / 30.0);
    }
    if (d <= -1.0) return 1.0;
    return (1.0 + d) * std::log1p(d) - d;
}

}  // namespace

double rel_entropy(std::span<const double> mu, std::span<const double> nu) {
    if (mu.size() != nu.size()) throw std::invalid_argument("rel_entropy: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] > 0.0) s += mu[i] * std::log(mu[i] / nu[i]);
    }
    return std::max(s, 0.0);
}

double rel_entropy_from_difference(std::span<const double> d, std::span<const double> nu) {
    if (d.size() != nu.size()) throw std::invalid_argument("rel_entropy: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += nu[i] * entropy_kernel(std::max(d[i] / nu[i], -1.0));
    return s;
}

double fisher_from_difference(std::span<const double> d, std::span<const double> nu, const GeneratorMatrix& Q) {
    const std::size_t n = Q.states();
    std::vector<double> rel(n), lg(n);
    for (std::size_t i = 0; i < n; ++i) {
        rel[i] = d[i] / nu[i];
        if (rel[i] <= -1.0) return std::numeric_limits<double>::infinity();
        lg[i] = std::log1p(rel[i]);
    }
    double s = 0.0;
    for (std::uint32_t eta = 0; eta < n; ++eta) {
        for (int i = 0; i < Q.cells(); ++i) {
            if (eta >> i & 1u) continue;
            const std::uint32_t up = eta | (1u << i);
            s += Q.rate(eta, i) * nu[eta] * (rel[up] - rel[eta]) * (lg[up] - lg[eta]);
        }
    }
    return s;
}

double fisher(std::span<const double> mu, std::span<const double> nu, const GeneratorMatrix& Q) {
    std::vector<double> d(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) d[i] = mu[i] - nu[i];
    return fisher_from_difference(d, nu, Q);
}

double entropy_production(std::span<const double> mu, std::span<const double> nu, const GeneratorMatrix& Q) {
    const std::size_t n = Q.states();
    std::vector<double> lg(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(mu[i] > 0.0)) return std::numeric_limits<double>::infinity();
        lg[i] = std::log(mu[i] / nu[i]);
    }
    const std::vector<double> qlg = Q.right(lg);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s -= mu[i] * qlg[i];
    return s;
}

Regularised regularise(std::span<const double> mu, std::span<const double> nu) {
    Regularised r{std::vector<double>(mu.begin(), mu.end()), false};
    if (std::any_of(mu.begin(), mu.end(), [](double p) { return !(p > 0.0); })) {
        constexpr double eps = 1e-9;
        for (std::size_t i = 0; i < mu.size(); ++i) r.mu[i] = (1.0 - eps) * mu[i] + eps * nu[i];
        r.mixed = true;
    }
    return r;
}

DeBruijnCurve de_bruijn_check(std::span<const double> mu0, const LatticeModel& model, const GeneratorMatrix& Q,
                              double T, int n_grid, double grading) {
    if (n_grid < 3 || n_grid % 2 == 0) throw std::invalid_argument("de_bruijn_check: n_grid must be odd and >= 3");
    const StateDist nu = stationary(model);
    const Regularised reg = regularise(mu0, nu);
    std::vector<double> d(nu.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = reg.mu[i] - nu[i];

    DeBruijnCurve c;
    c.regularised = reg.mixed;
    // Nodes t(s) = T s^q on a uniform s-grid, so that early transients get
    // short steps; Simpson runs in s on J(t(s)) t'(s).
    const double q = grading;
    if (!(q >= 1.0)) throw std::invalid_argument("de_bruijn_check: grading must be >= 1");
    const double hs = 1.0 / (n_grid - 1);
    std::vector<double> jac;
    for (int j = 0; j < n_grid; ++j) {
        const double s = j * hs;
        c.t.push_back(T * std::pow(s, q));
        jac.push_back(q == 1.0 ? T : q * T * std::pow(s, q - 1.0));
    }
    c.t.back() = T;
    const auto path = evolve_grid(d, Q, c.t);
    for (const auto& dj : path) {
        c.entropy.push_back(rel_entropy_from_difference(dj, nu));
        c.fisher.push_back(fisher_from_difference(dj, nu, Q));
    }
    c.residual.assign(n_grid, std::numeric_limits<double>::quiet_NaN());
    c.residual[0] = 0.0;
    double integral = 0.0;
    for (int j = 2; j < n_grid; j += 2) {
        integral += hs / 3.0 *
                    (c.fisher[j - 2] * jac[j - 2] + 4.0 * c.fisher[j - 1] * jac[j - 1] + c.fisher[j] * jac[j]);
        c.residual[j] = c.entropy[0] - c.entropy[j] - integral;
        c.max_residual = std::max(c.max_residual, std::abs(c.residual[j]));
    }
    return c;
}

SeriesCheck series_expansion_check(std::span<const double> mu, std::span<const double> f, const GeneratorMatrix& Q,
                                   double t, int K) {
    if (K < 0) throw std::invalid_argument("series_expansion_check: K must be >= 0");
    SeriesCheck s;
    double fmax = 0.0;
    for (double v : f) fmax = std::max(fmax, std::abs(v));
    std::vector<double> qkf(f.begin(), f.end());
    double sum = 0.0, coef = 1.0, bound = fmax;
    const double two_lambda_t = 2.0 * Q.max_exit_rate() * t;
    for (int k = 0; k <= K; ++k) {
        if (k > 0) {
            qkf = Q.right(qkf);
            coef *= t / k;
            bound *= two_lambda_t / k;
        }
        sum += coef * std::inner_product(mu.begin(), mu.end(), qkf.begin(), 0.0);
        s.partial.push_back(sum);
        s.term_bounds.push_back(bound);
    }
    // Tail of the exponential series beyond K.
    double tail = 0.0, b = bound;
    for (int k = K + 1; k < K + 400; ++k) {
        b *= two_lambda_t / k;
        tail += b;
        if (b < 1e-300 || (k > two_lambda_t && b < 1e-18 * tail)) break;
    }
    s.remainder_bound = tail;
    const std::vector<double> mut = evolve(mu, Q, t);
    s.truth = std::inner_product(mut.begin(), mut.end(), f.begin(), 0.0);
    return s;
}

KappaBound kappa_bound(const LatticeModel& model, double beta) {
    const int m = model.cells();
    const double R = model.spec().range;
    const double norm = unit_temperature_rate_sup(model.spec());
    const double lognorm = std::max(0.0, std::log(norm));
    const auto centres = model.centres();
    double sup = -std::numeric_limits<double>::infinity();
    for (int x = 0; x < m; ++x) {
        std::vector<int> near;
        for (int y = 0; y < m; ++y) {
            if (y != x && distance(centres[x], centres[y]) <= R) near.push_back(y);
        }
        for (std::uint32_t eta = 0; eta < model.states(); ++eta) {
            if (eta >> x & 1u) continue;
            double sum = 0.0;
            for (int y : near) {
                if (eta >> y & 1u) continue;
                const double dd = model.energy_at(y, eta | (1u << x)) - model.energy_at(y, eta);
                sum += model.cell_volume() * (1.0 - std::exp(-beta * dd - 2.0 * beta * lognorm));
            }
            sup = std::max(sup, sum);
        }
    }
    KappaBound k;
    k.rate_norm = norm;
    k.sup_sum = sup;
    k.epsilon = std::exp(beta * lognorm) * sup;
    k.kappa = 1.0 - k.epsilon;
    return k;
}

KappaBound kappa_bound(const LatticeModel& model) { return kappa_bound(model, model.spec().beta); }

double spectral_gap(const GeneratorMatrix& Q, std::span<const double> nu) {
    const Eigen::MatrixXd A = Q.dense();
    const auto n = A.rows();
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = std::sqrt(nu[i]);
    Eigen::MatrixXd S = -(s.asDiagonal() * A * s.cwiseInverse().asDiagonal());
    S = 0.5 * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    if (n < 2) return 0.0;
    return es.eigenvalues()(1);
}

double reversibility_residual(std::span<const double> nu, const GeneratorMatrix& Q, std::span<const double> f,
                              std::span<const double> g, double t) {
    if (t == 0.0) return 0.0;
    const std::vector<double> tf = evolve_right(f, Q, t);
    const std::vector<double> tg = evolve_right(g, Q, t);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < nu.size(); ++i) {
        a += nu[i] * tf[i] * g[i];
        b += nu[i] * f[i] * tg[i];
    }
    return a - b;
}

std::vector<std::pair<std::vector<double>, std::vector<double>>> probe_battery(int m) {
    const std::size_t n = std::size_t{1} << m;
    auto make = [n](auto fn) {
        std::vector<double> v(n);
        for (std::uint32_t eta = 0; eta < n; ++eta) v[eta] = fn(eta);
        return v;
    };
    auto bit = [](std::uint32_t eta, int i) { return static_cast<double>(eta >> i & 1u); };
    const int last = m - 1, mid = m / 2;
    const auto count = make([](std::uint32_t e) { return static_cast<double>(__builtin_popcount(e)); });
    const auto first = make([&](std::uint32_t e) { return bit(e, 0); });
    const auto lastb = make([&](std::uint32_t e) { return bit(e, last); });
    const auto midb = make([&](std::uint32_t e) { return bit(e, mid); });
    const auto empty = make([](std::uint32_t e) { return e == 0 ? 1.0 : 0.0; });
    const auto pairs = make([&](std::uint32_t e) {
        double s = 0.0;
        for (int i = 0; i + 1 < m; ++i) s += bit(e, i) * bit(e, i + 1);
        return s;
    });
    const auto parity = make([](std::uint32_t e) { return __builtin_popcount(e) % 2 ? -1.0 : 1.0; });
    const auto weighted = make([&](std::uint32_t e) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += (i + 1) * bit(e, i);
        return s;
    });
    const auto square = make([](std::uint32_t e) {
        const double c = __builtin_popcount(e);
        return c * c;
    });
    return {{count, first},  {first, lastb},  {midb, empty},    {count, pairs},  {parity, first},
            {weighted, midb}, {square, empty}, {pairs, lastb},  {empty, count},  {weighted, parity}};
}

FiniteTimeCheck finite_time_gibbs_check(std::span<const double> mu0, std::span<const double> nu,
                                        const GeneratorMatrix& Q, double T, int n_grid) {
    if (n_grid < 1) throw std::invalid_argument("finite_time_gibbs_check: n_grid must be >= 1");
    FiniteTimeCheck c;
    for (int j = 1; j <= n_grid; ++j) c.t.push_back(T * j / n_grid);
    std::vector<double> d(nu.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = mu0[i] - nu[i];
    const auto path = evolve_grid(d, Q, c.t);
    c.min_tv = std::numeric_limits<double>::infinity();
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& dj : path) {
        double tv = 0.0;
        for (double x : dj) tv += std::abs(x);
        tv *= 0.5;
        c.tv.push_back(tv);
        c.min_tv = std::min(c.min_tv, tv);
        if (tv > prev * (1.0 + 1e-12)) c.nonincreasing = false;
        prev = tv;
    }
    return c;
}

BoundaryFisher fisher_bc_variants(const InteractionSpec& spec, int interior, int collar, double cell_width,
                                  double p) {
    if (interior < 1 || collar < 0) throw std::invalid_argument("fisher_bc_variants: bad cell counts");
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("fisher_bc_variants: p must be in (0, 1)");
    const LatticeModel free_model = LatticeModel::line(spec, interior, cell_width);
    const LatticeModel full = LatticeModel::line(spec, interior + 2 * collar, cell_width, -collar * cell_width);
    const std::size_t n = free_model.states();

    std::vector<double> mu(n);
    for (std::uint32_t eta = 0; eta < n; ++eta) {
        const int k = __builtin_popcount(eta);
        mu[eta] = std::pow(p, k) * std::pow(1.0 - p, interior - k);
    }

    auto fisher_with = [&](const std::vector<double>& nu, auto&& rate) {
        double s = 0.0;
        for (std::uint32_t eta = 0; eta < n; ++eta) {
            for (int i = 0; i < interior; ++i) {
                if (eta >> i & 1u) continue;
                const std::uint32_t up = eta | (1u << i);
                const double g0 = mu[eta] / nu[eta], g1 = mu[up] / nu[up];
                s += rate(eta, i) * nu[eta] * (g1 - g0) * (std::log(g1) - std::log(g0));
            }
        }
        return s;
    };

    BoundaryFisher out;
    const StateDist nu_free = stationary(free_model);
    out.free_bc = fisher_with(nu_free, [&](std::uint32_t eta, int i) { return free_model.birth(eta, i); });

    // Without interaction the collar decouples and the averaged rates are the free ones.
    const bool decoupled = spec.kind == InteractionKind::ideal || spec.beta == 0.0 ||
                           (spec.kind == InteractionKind::area && spec.alpha == 0.0);
    if (decoupled || collar == 0) {
        out.averaged_bc = out.free_bc;
        return out;
    }

    // Interior marginal of the full model and the collar-averaged rates.
    const StateDist nu_full = stationary(full);
    const std::uint32_t interior_mask = ((1u << interior) - 1u) << collar;
    std::vector<double> nu_int(n, 0.0), rate_num(n * interior, 0.0);
    for (std::uint32_t xi = 0; xi < full.states(); ++xi) {
        const std::uint32_t eta = (xi & interior_mask) >> collar;
        nu_int[eta] += nu_full[xi];
        for (int i = 0; i < interior; ++i) {
            if (eta >> i & 1u) continue;
            rate_num[eta * interior + i] += nu_full[xi] * full.birth(xi, i + collar);
        }
    }
    out.averaged_bc =
        fisher_with(nu_int, [&](std::uint32_t eta, int i) { return rate_num[eta * interior + i] / nu_int[eta]; });
    return out;
}

}  // namespace gibbsflow
