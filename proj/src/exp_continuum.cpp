// Experiments driven by the continuum simulator and estimators, plus the
// oracle halves of the series and reversibility checks.
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "exp_internal.hpp"
#include "gibbsflow/dynamics.hpp"
#include "gibbsflow/equilibrium.hpp"
#include "gibbsflow/estimators.hpp"
#include "gibbsflow/parallel.hpp"
#include "gibbsflow/stats.hpp"

namespace gibbsflow::detail {

namespace {

std::string z_detail(double value, double target, double se) {
    return "value " + fmt(value) + " target " + fmt(target) + " se " + fmt(se);
}

bool within(double value, double target, double slack) { return std::abs(value - target) <= slack; }

Observable capped_count(const Window& w, int cap) {
    return Observable{[w, cap](const Configuration& eta) {
                          return std::min<double>(static_cast<double>(count(eta, w)), cap) / cap;
                      },
                      w};
}

std::vector<Point> points_of(const Configuration& c) { return {c.points().begin(), c.points().end()}; }

/// Born part Y_t on `w` for the ideal gas started empty.
Configuration ideal_gas_state(const Window& w, double z, double t, const SeedSpec& seed) {
    const InteractionSpec spec = InteractionSpec::ideal(w.dim(), z);
    const SimOptions opts{w, w, 0.0, t, std::nullopt};
    const EventStream stream = propose_events(w, t, z, seed);
    return simulate(InitialCondition::empty(), spec, opts, stream).full_at(t);
}

InteractionSpec pair_step_spec(double value, double beta, double range, int max_neighbors) {
    return InteractionSpec::pair(1, PairPotential::step(value, range), beta, range, max_neighbors);
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentOutput run_series(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    // Oracle: K-term partial sums against the exact exponential.
    {
        const double width = p["cell_width"], R = p["range"], tol = p["oracle_tolerance"];
        const int K = p["oracle_terms"];
        for (int m : ints(p["oracle_cells"])) {
            for (double alpha : doubles(p["oracle_alphas"])) {
                const LatticeModel model = area_line(m, width, alpha, 1.0, R);
                const GeneratorMatrix Q = build_generator(model);
                CounterRng rng(seed_for(ctx, "series/oracle-mu"));
                const std::vector<double> mu = random_distribution(model.states(), rng);
                const auto battery = probe_battery(m);
                for (double t : doubles(p["oracle_times"])) {
                    double worst = 0.0, worst_bound_gap = -1.0;
                    for (const auto& [f, g] : battery) {
                        const SeriesCheck s = series_expansion_check(mu, f, Q, t, K);
                        const double err = std::abs(s.partial.back() - s.truth);
                        worst = std::max(worst, err);
                        worst_bound_gap = std::max(worst_bound_gap, err - s.remainder_bound - 1e-12);
                    }
                    const std::string label = model_label(m, alpha, 1.0) + ";t=" + fmt(t);
                    out.add(label, "max_partial_sum_error", worst);
                    out.check("oracle series K=" + std::to_string(K) + " " + label, worst <= tol,
                              "max |partial - exact| " + fmt(worst) + " vs " + fmt(tol));
                    out.check("oracle series error below remainder bound " + label, worst_bound_gap <= 0.0,
                              "excess " + fmt(worst_bound_gap));
                }
            }
        }
    }
    // Continuum: mu[f] + t mu[Lf] + t^2/2 mu[L^2 f] against (mu T_t)[f].
    const double t = p["time"], len = p["window_length"], buffer = p["buffer"], intensity = p["initial_intensity"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    const std::size_t qn = p["quadrature_n"].get<std::size_t>();
    const double k_se = p["se_multiplier"];
    const double R = p["range"];
    const Window lambda_w = Window::interval(0.0, len);
    const Window sim = dilate(lambda_w, buffer * R);
    const Observable f = capped_count(lambda_w, 3);
    const std::vector<std::pair<std::string, InteractionSpec>> specs = {
        {"ideal", InteractionSpec::ideal(1, p["ideal_z"].get<double>(), R)},
        {"area", InteractionSpec::area(1, p["area_alpha"].get<double>(), p["area_beta"].get<double>(), R)}};
    for (const auto& [name, spec] : specs) {
        std::vector<double> stat(reps), l1v(reps), l2v(reps);
        parallel_for(
            reps,
            [&](std::size_t i) {
                CounterRng rng(SeedSpec{ctx.seed, i, "series/" + name + "/expansion"});
                const Configuration eta = sample_poisson(intensity, sim, rng, R);
                const double f0 = f.eval(eta);
                l1v[i] = generator_power_draw(f, eta, spec, 1, qn, rng);
                l2v[i] = generator_power_draw(f, eta, spec, 2, qn, rng);
                stat[i] = f0 + t * l1v[i] + 0.5 * t * t * l2v[i];
            },
            ctx.threads);
        const Estimate series = mean_estimate(stat);
        const InitialSampler sampler = [&](const SeedSpec& s) {
            const Configuration c = sample_poisson(intensity, sim, s, R);
            return InitialCondition::exponential(points_of(c), s.with_tag(s.stream_tag + "/lifespans"));
        };
        const SimOptions opts{sim, lambda_w, buffer * R, t, std::nullopt};
        const Estimate direct = semigroup_expectation(f, sampler, spec, opts, t, reps,
                                                      SeedSpec{ctx.seed, 0, "series/" + name + "/dynamics"},
                                                      ctx.threads);
        out.add(name, "series_K2", series.value, series.se, series.n);
        out.add(name, "generator_term", mean_estimate(l1v).value, mean_estimate(l1v).se, reps);
        out.add(name, "second_generator_term", mean_estimate(l2v).value, mean_estimate(l2v).se, reps);
        out.add(name, "semigroup", direct.value, direct.se, direct.n);
        const double comb = std::sqrt(series.se * series.se + direct.se * direct.se);
        out.check("continuum series K=2 " + name, within(series.value, direct.value, k_se * comb),
                  "series " + fmt(series.value) + " semigroup " + fmt(direct.value) + " combined se " + fmt(comb));
    }
    return out;
}

ExperimentOutput run_reversibility(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    {
        const int m = p["oracle_cells"];
        const double width = p["cell_width"], R = p["range"];
        const double alpha = p["oracle_alpha"], beta = p["oracle_beta"];
        const LatticeModel model = area_line(m, width, alpha, beta, R);
        const GeneratorMatrix Q = build_generator(model);
        const StateDist nu = stationary(model);
        const std::vector<double> uniform(model.states(), 1.0 / static_cast<double>(model.states()));
        const auto battery = probe_battery(m);
        double at_nu = 0.0, at_uniform = 0.0, at_zero = 0.0;
        for (double t : doubles(p["oracle_times"])) {
            for (const auto& [f, g] : battery) {
                at_nu = std::max(at_nu, std::abs(reversibility_residual(nu, Q, f, g, t)));
                at_uniform = std::max(at_uniform, std::abs(reversibility_residual(uniform, Q, f, g, t)));
                at_zero = std::max(at_zero, std::abs(reversibility_residual(uniform, Q, f, g, 0.0)));
            }
        }
        const std::string label = model_label(m, alpha, beta);
        out.add(label, "max_residual_stationary", at_nu);
        out.add(label, "max_residual_uniform", at_uniform);
        out.add(label, "detailed_balance_residual", detailed_balance_residual(nu, Q));
        out.check("oracle reversible at nu " + label, at_nu <= 1e-10, "max residual " + fmt(at_nu));
        out.check("oracle violation detected away from nu " + label, at_uniform > 1e-3,
                  "max residual " + fmt(at_uniform));
        out.check("oracle residual vanishes at t = 0", at_zero == 0.0, fmt(at_zero));
    }
    // Continuum: exchangeability of (X_0, X_t) started from Gibbs samples.
    const double len = p["window_length"], R = p["range"], t = p["time"], k_se = p["se_multiplier"];
    const int chains = p["chains"];
    const std::size_t per_chain = p["samples_per_chain"].get<std::size_t>();
    const Window w = Window::interval(0.0, len);
    const InteractionSpec spec = InteractionSpec::area(1, p["alpha"].get<double>(), p["beta"].get<double>(), R);
    const Window left = Window::interval(0.0, len / 2.0), right = Window::interval(len / 2.0, len);
    const auto f = [&](const Configuration& c) { return static_cast<double>(count(c, left)); };
    const auto g = [&](const Configuration& c) { return count(c, right) <= 1 ? 1.0 : 0.0; };

    std::vector<Configuration> samples;
    double worst_acf = 0.0;
    for (int c = 0; c < chains; ++c) {
        GibbsSampleSpec gs{w, spec, std::nullopt, p["burn_in"].get<double>(), per_chain, p["spacing"].get<double>()};
        GibbsChain chain = sample_gibbs(gs, SeedSpec{ctx.seed, static_cast<std::uint64_t>(c), "reversibility/gibbs"});
        worst_acf = std::max(worst_acf, chain.autocorrelation);
        for (auto& s : chain.samples) samples.push_back(std::move(s));
    }
    out.add("continuum", "max_chain_autocorrelation", worst_acf);
    const SimOptions opts{w, w, 0.0, t, std::nullopt};
    const double b_sup = rate_bounds(spec).sup;
    // Local observables whose means must not move under the dynamics.
    std::vector<std::function<double(const Configuration&)>> flat;
    for (int q = 0; q < 4; ++q) {
        const Window quarter = Window::interval(q * len / 4.0, (q + 1) * len / 4.0);
        flat.push_back([quarter](const Configuration& c) { return static_cast<double>(count(c, quarter)); });
        flat.push_back([quarter](const Configuration& c) { return count(c, quarter) == 0 ? 1.0 : 0.0; });
    }
    flat.push_back([](const Configuration& c) { return static_cast<double>(c.size()); });
    flat.push_back([](const Configuration& c) { return std::min<double>(static_cast<double>(c.size()), 5.0); });
    std::vector<std::vector<double>> drift(flat.size(), std::vector<double>(samples.size()));

    std::vector<double> fg(samples.size()), gf(samples.size());
    parallel_for(
        samples.size(),
        [&](std::size_t i) {
            const SeedSpec s{ctx.seed, i, "reversibility/continue"};
            const InitialCondition init = InitialCondition::exponential(points_of(samples[i]), s.with_tag("lifespans"));
            const Trajectory tr = simulate(init, spec, opts, propose_events(w, t, b_sup, s.with_tag("noise")));
            const Configuration xt = tr.full_at(t);
            for (std::size_t k = 0; k < flat.size(); ++k) drift[k][i] = flat[k](xt) - flat[k](samples[i]);
            fg[i] = f(xt) * g(samples[i]);
            gf[i] = f(samples[i]) * g(xt);
        },
        ctx.threads);
    std::vector<double> diff(samples.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = fg[i] - gf[i];
    const Estimate a = mean_estimate(fg), b = mean_estimate(gf), d = mean_estimate(diff);
    out.add("continuum", "nu[(T_t f) g]", a.value, a.se, a.n);
    out.add("continuum", "nu[f (T_t g)]", b.value, b.se, b.n);
    out.add("continuum", "difference", d.value, d.se, d.n);
    out.check("continuum reversibility", within(d.value, 0.0, k_se * d.se), z_detail(d.value, 0.0, d.se));
    for (std::size_t k = 0; k < flat.size(); ++k) {
        const Estimate e = mean_estimate(drift[k]);
        out.add("stationarity", "drift_" + std::to_string(k), e.value, e.se, e.n);
        out.check("stationary mean of observable " + std::to_string(k), within(e.value, 0.0, k_se * e.se),
                  z_detail(e.value, 0.0, e.se));
    }
    return out;
}

ExperimentOutput run_ideal_gas(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double len = p["window_length"], level = p["level"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    const Window w = Window::interval(0.0, len);
    for (double z : doubles(p["intensities"])) {
        for (double t : doubles(p["times"])) {
            std::vector<std::uint64_t> counts(reps);
            const std::string tag = "ideal-gas/z=" + fmt(z) + "/t=" + fmt(t);
            parallel_for(
                reps, [&](std::size_t i) { counts[i] = ideal_gas_state(w, z, t, SeedSpec{ctx.seed, i, tag}).size(); },
                ctx.threads);
            const double mean = z * (1.0 - std::exp(-t)) * w.volume();
            const TestResult chi = chi_square_gof(counts, [mean](std::uint64_t k) { return poisson_pmf(k, mean); });
            std::vector<double> c(counts.begin(), counts.end());
            const Estimate e = mean_estimate(c);
            const std::string label = "z=" + fmt(z) + ";t=" + fmt(t);
            out.add(label, "mean_count", e.value, e.se, e.n);
            out.add(label, "expected_mean", mean);
            out.add(label, "chi_square_p", chi.p_value, 0.0, reps);
            out.check("ideal-gas count law " + label, chi.p_value > level,
                      "chi-square " + fmt(chi.statistic) + " dof " + fmt(chi.dof) + " p " + fmt(chi.p_value));
        }
    }
    return out;
}

ExperimentOutput run_gnz(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double len = p["window_length"], R = p["range"], k_se = p["se_multiplier"];
    const std::size_t n = p["samples"].get<std::size_t>();
    const Window w = Window::interval(0.0, len);
    const auto tests = default_test_functions(w, R);
    Table bars{"gnz_residuals", {"spec", "test_function", "residual", "se", "n"}, {}};

    struct Case {
        std::string name;
        InteractionSpec spec;
        bool frozen;
    };
    const std::vector<Case> cases = {
        {"area-attractive", InteractionSpec::area(1, 1.0, 0.5, R), false},
        {"area-repulsive", InteractionSpec::area(1, -1.0, 0.5, R), true},
        {"pair-step", pair_step_spec(0.5, 1.0, R, p["pair_max_neighbors"].get<int>()), false},
    };
    for (const auto& c : cases) {
        GibbsSampleSpec gs{w, c.spec, std::nullopt, p["burn_in"].get<double>(), n, p["spacing"].get<double>()};
        if (c.frozen) {
            // Unit Poisson boundary in the R-collar on both sides.
            const SeedSpec bs{ctx.seed, 0, "gnz/boundary/" + c.name};
            Configuration bnd(dilate(w, R), R);
            for (const Window& side : {Window::interval(-R, 0.0), Window::interval(len, len + R)}) {
                const Configuration part = sample_poisson(1.0, side, bs.with_tag(bs.stream_tag + fmt(side.lo()[0])), R);
                for (const auto& x : part.points()) bnd.insert(x);
            }
            gs.boundary = bnd;
        }
        const GibbsChain chain = sample_gibbs(gs, SeedSpec{ctx.seed, 0, "gnz/chain/" + c.name});
        const auto res = gnz_residual(chain.samples, tests, c.spec, w);
        out.add(c.name, "autocorrelation", chain.autocorrelation, 0.0, chain.autocorrelation_lag);
        out.check("chain mixing " + c.name, !chain.mixing_flag,
                  "lag-" + std::to_string(chain.autocorrelation_lag) + " autocorrelation " + fmt(chain.autocorrelation));
        double mean_count = 0.0;
        for (const auto& s : chain.samples) mean_count += static_cast<double>(s.size());
        out.add(c.name, "mean_count", mean_count / static_cast<double>(n));
        for (std::size_t j = 0; j < tests.size(); ++j) {
            out.add(c.name, "residual:" + tests[j].name, res[j].value, res[j].se, res[j].n);
            bars.rows.push_back({c.name, tests[j].name, fmt(res[j].value), fmt(res[j].se), fmt(res[j].n)});
            out.check("GNZ " + c.name + " " + tests[j].name, within(res[j].value, 0.0, k_se * res[j].se),
                      z_detail(res[j].value, 0.0, res[j].se));
        }
    }
    // Poisson(2) samples against the ideal(1) intensity with f = 1 on a unit window.
    {
        std::vector<Configuration> samples;
        for (std::size_t i = 0; i < n; ++i) samples.push_back(sample_poisson(2.0, w, SeedSpec{ctx.seed, i, "gnz/poisson2"}, R));
        const Window unit = Window::interval(len / 2.0 - 0.5, len / 2.0 + 0.5);
        const std::vector<TestFunction> one = {{"unit_indicator", [](const Point&, const Configuration&) { return 1.0; }, unit}};
        const InteractionSpec ideal = InteractionSpec::ideal(1, 1.0, R);
        const Estimate e = gnz_residual(samples, one, ideal, w).front();
        out.add("poisson2-vs-ideal1", "residual:unit_indicator", e.value, e.se, e.n);
        bars.rows.push_back({"poisson2-vs-ideal1", "unit_indicator", fmt(e.value), fmt(e.se), fmt(e.n)});
        out.check("GNZ detects intensity mismatch", within(e.value, 1.0, k_se * e.se), z_detail(e.value, 1.0, e.se));
        const auto own = gnz_residual(samples, tests, InteractionSpec::ideal(1, 2.0, R), w);
        for (std::size_t j = 0; j < tests.size(); ++j) {
            out.check("GNZ Poisson(2) against ideal(2) " + tests[j].name, within(own[j].value, 0.0, k_se * own[j].se),
                      z_detail(own[j].value, 0.0, own[j].se));
        }
    }
    out.curves.push_back(std::move(bars));
    return out;
}

ExperimentOutput run_finite_speed(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double len = p["window_length"], R = p["range"], T = p["horizon"], k_se = p["se_multiplier"];
    const double big_buffer = p["big_buffer"], threshold = p["separation_threshold"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    const std::vector<double> buffers = doubles(p["buffers"]);
    const InteractionSpec spec = InteractionSpec::area(1, p["alpha"].get<double>(), p["beta"].get<double>(), R);
    const Window lambda_w = Window::interval(0.0, len);
    const SimOptions big{dilate(lambda_w, big_buffer * R), lambda_w, big_buffer * R, T, std::nullopt};
    const double b_sup = rate_bounds(spec).sup;

    std::vector<std::vector<char>> differs(buffers.size(), std::vector<char>(reps, 0));
    parallel_for(
        reps,
        [&](std::size_t i) {
            const SeedSpec s{ctx.seed, i, "finite-speed"};
            const Configuration c = sample_poisson(1.0, big.sim_window, s.with_tag("init"), R);
            const InitialCondition init = InitialCondition::fixed(InitialCondition::exponential(points_of(c), s.with_tag("lifespans")).realise());
            const EventStream stream = propose_events(big.sim_window, T, b_sup, s.with_tag("noise"));
            const Trajectory big_tr = simulate(init, spec, big, stream);
            for (std::size_t k = 0; k < buffers.size(); ++k) {
                const SimOptions small = SimOptions::buffered(lambda_w, buffers[k] * R, T);
                // Same initial marks restricted to the small window, same noise.
                MarkedConfiguration restricted;
                for (const auto& e : big_tr.initial().entries()) {
                    if (small.sim_window.contains(e.x)) restricted.add(e.x, e.lifespan);
                }
                const Trajectory small_tr = simulate(InitialCondition::fixed(restricted), spec, small,
                                                     shared_restriction(stream, small.sim_window));
                differs[k][i] = restricted_paths_agree(small_tr, big_tr, lambda_w) ? 0 : 1;
            }
        },
        ctx.threads);

    Table curve{"fsp_curve", {"buffer", "p_hat", "se", "n"}, {}};
    std::vector<Estimate> est;
    for (std::size_t k = 0; k < buffers.size(); ++k) {
        const double n = static_cast<double>(reps);
        const double ph = std::accumulate(differs[k].begin(), differs[k].end(), 0.0) / n;
        est.push_back({ph, std::sqrt(ph * (1.0 - ph) / n), reps});
        out.add("buffer=" + fmt(buffers[k] * R), "disagreement", ph, est.back().se, reps);
        curve.rows.push_back({fmt(buffers[k] * R), fmt(ph), fmt(est.back().se), fmt(reps)});
    }
    for (std::size_t k = 1; k < est.size(); ++k) {
        const double comb = std::sqrt(est[k].se * est[k].se + est[k - 1].se * est[k - 1].se);
        out.check("disagreement nonincreasing " + fmt(buffers[k - 1]) + "R -> " + fmt(buffers[k]) + "R",
                  est[k].value <= est[k - 1].value + k_se * comb,
                  fmt(est[k - 1].value) + " -> " + fmt(est[k].value) + " combined se " + fmt(comb));
    }
    if (est.front().value > threshold) {
        const double comb = std::sqrt(est.back().se * est.back().se + est.front().se * est.front().se);
        out.check("disagreement separates smallest and largest buffer",
                  est.back().value < est.front().value - k_se * comb,
                  fmt(est.front().value) + " vs " + fmt(est.back().value) + " combined se " + fmt(comb));
    } else {
        out.add("buffer=" + fmt(buffers.front() * R), "below_separation_threshold", est.front().value);
    }
    out.curves.push_back(std::move(curve));
    return out;
}

ExperimentOutput run_correlations(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double ell = p["box_side"], k_se = p["se_multiplier"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    const Window w = Window::interval(0.0, 1.0);
    Table profile{"correlation_profile", {"order", "x1", "x2", "value", "se", "expected"}, {}};

    auto ideal_samples = [&](double z, double t, const std::string& tag) {
        std::vector<Configuration> s(reps, Configuration(w, 1.0));
        parallel_for(reps, [&](std::size_t i) { s[i] = ideal_gas_state(w, z, t, SeedSpec{ctx.seed, i, tag}); },
                     ctx.threads);
        return s;
    };

    // rho_1 over a (z, t) grid; rho_2 and the profiles at the reference point.
    for (double z : doubles(p["intensities"])) {
        for (double t : doubles(p["times"])) {
            const auto samples = ideal_samples(z, t, "correlations/z=" + fmt(z) + "/t=" + fmt(t));
            const double rho = z * (1.0 - std::exp(-t));
            const Point x(0.5);
            const EstimatorReport r1 = correlation_estimate(samples, std::span(&x, 1), ell);
            const std::string label = "z=" + fmt(z) + ";t=" + fmt(t);
            out.add(label, "rho1", r1.value, r1.std_error, r1.n_samples);
            out.check("rho1 " + label, within(r1.value, rho, k_se * r1.std_error), z_detail(r1.value, rho, r1.std_error));
            if (z == 1.0 && t == 1.0) {
                const std::vector<Point> xs = {Point(0.3), Point(0.7)};
                const EstimatorReport r2 = correlation_estimate(samples, xs, ell);
                out.add(label, "rho2", r2.value, r2.std_error, r2.n_samples);
                out.check("rho2 " + label, within(r2.value, rho * rho, k_se * r2.std_error),
                          z_detail(r2.value, rho * rho, r2.std_error));
                for (int k = 1; k <= 9; ++k) {
                    const Point xk(0.1 * k);
                    const EstimatorReport e = correlation_estimate(samples, std::span(&xk, 1), ell);
                    profile.rows.push_back({"1", fmt(xk[0]), "", fmt(e.value), fmt(e.std_error), fmt(rho)});
                }
                for (int k = 1; k <= 7; ++k) {
                    const std::vector<Point> pr = {Point(0.15), Point(0.15 + 0.1 * k)};
                    const EstimatorReport e = correlation_estimate(samples, pr, ell);
                    profile.rows.push_back({"2", fmt(pr[0][0]), fmt(pr[1][0]), fmt(e.value), fmt(e.std_error), fmt(rho * rho)});
                }
                // Void density of the born part against the unit Poisson process.
                const JanossyReport psi = psi_density({}, samples, w, p["janossy_box_side"].get<double>(), 3);
                const double psi_exact = std::exp(w.volume() - rho * w.volume());
                out.add(label, "psi_empty", psi.value, psi.std_error, psi.n_samples);
                out.add(label, "psi_empty_truncation", psi.truncation_bound);
                const Point mid(0.5);
                const JanossyReport psi1 = psi_density(std::span(&mid, 1), samples, w, p["janossy_box_side"].get<double>(), 3);
                const double psi1_exact = std::exp(w.volume() - rho * w.volume()) * rho;
                out.add(label, "psi_single", psi1.value, psi1.std_error, psi1.n_samples);
                out.check("psi({0.5}) " + label,
                          within(psi1.value, psi1_exact, psi1.truncation_bound + k_se * psi1.std_error),
                          z_detail(psi1.value, psi1_exact, psi1.std_error) + " truncation " + fmt(psi1.truncation_bound));
                out.check("psi nonnegative " + label,
                          psi.value + k_se * psi.std_error + psi.truncation_bound >= 0.0 &&
                              psi1.value + k_se * psi1.std_error + psi1.truncation_bound >= 0.0,
                          fmt(psi.value) + ", " + fmt(psi1.value));
                out.check("psi(empty) " + label, within(psi.value, psi_exact, psi.truncation_bound + k_se * psi.std_error),
                          z_detail(psi.value, psi_exact, psi.std_error) + " truncation " + fmt(psi.truncation_bound));
            }
        }
    }
    {
        const auto at_rest = ideal_samples(1.0, p["long_time"].get<double>(), "correlations/long");
        const JanossyReport psi = psi_density({}, at_rest, w, p["janossy_box_side"].get<double>(), 3);
        const double exact = std::exp(w.volume() * std::exp(-p["long_time"].get<double>()));
        out.add("long-time", "psi_empty", psi.value, psi.std_error, psi.n_samples);
        out.check("psi(empty) near 1 after a long time", within(psi.value, exact, psi.truncation_bound + k_se * psi.std_error),
                  z_detail(psi.value, exact, psi.std_error));
    }
    // Janossy densities of a Poisson sample.
    {
        const double lam = p["janossy_intensity"], jell = p["janossy_box_side"];
        std::vector<Configuration> samples(reps, Configuration(w, 1.0));
        parallel_for(reps, [&](std::size_t i) { samples[i] = sample_poisson(lam, w, SeedSpec{ctx.seed, i, "correlations/janossy"}); },
                     ctx.threads);
        const std::vector<std::vector<Point>> at = {{}, {Point(0.5)}, {Point(0.3), Point(0.7)}};
        for (const auto& xs : at) {
            const JanossyReport j = janossy_estimate(samples, xs, w, jell, 3);
            const double exact = std::exp(-lam * w.volume()) * std::pow(lam, static_cast<double>(xs.size()));
            const std::string label = "j" + std::to_string(xs.size());
            out.add(label, "janossy", j.value, j.std_error, j.n_samples);
            out.add(label, "truncation_bound", j.truncation_bound);
            out.check("Janossy " + label, within(j.value, exact, j.truncation_bound + k_se * j.std_error),
                      z_detail(j.value, exact, j.std_error) + " truncation " + fmt(j.truncation_bound));
            const JanossyReport ja = janossy_from_correlations(
                [lam](std::span<const Point> pts) { return std::pow(lam, static_cast<double>(pts.size())); }, xs, w, 3);
            out.add(label, "janossy_from_exact_rho", ja.value, 0.0, 0);
            out.check("Janossy from exact correlations " + label, within(ja.value, exact, ja.truncation_bound),
                      z_detail(ja.value, exact, 0.0) + " truncation " + fmt(ja.truncation_bound));
        }
        const JanossyReport norm = janossy_normalisation(samples, w, 3);
        out.add("normalisation", "sum", norm.value, norm.std_error, norm.n_samples);
        out.check("Janossy normalisation", within(norm.value, 1.0, norm.truncation_bound + k_se * norm.std_error),
                  z_detail(norm.value, 1.0, norm.std_error) + " truncation " + fmt(norm.truncation_bound));
    }
    out.curves.push_back(std::move(profile));
    return out;
}

ExperimentOutput run_variable_change(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double level = p["level"], volume = p["volume"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    for (double t : doubles(p["times"])) {
        const VariableChangeResult r = variable_change_test(volume, t, reps, SeedSpec{ctx.seed, 0, "variable-change/t=" + fmt(t)});
        const std::string label = "t=" + fmt(t);
        out.add(label, "joint_p", r.joint.p_value, 0.0, reps);
        out.add(label, "union_left_p", r.union_left.p_value, 0.0, reps);
        out.add(label, "union_right_p", r.union_right.p_value, 0.0, reps);
        out.add(label, "marks_right_p", r.marks_right.p_value, 0.0, reps);
        out.check("joint count law " + label, r.joint.p_value > level,
                  "chi-square " + fmt(r.joint.statistic) + " dof " + fmt(r.joint.dof) + " p " + fmt(r.joint.p_value));
        out.check("union size law, first construction " + label, r.union_left.p_value > level, "KS p " + fmt(r.union_left.p_value));
        out.check("union size law, second construction " + label, r.union_right.p_value > level, "KS p " + fmt(r.union_right.p_value));
        out.check("assembled marks are Exp(1) " + label, r.marks_right.p_value > level, "KS p " + fmt(r.marks_right.p_value));
    }
    return out;
}

ExperimentOutput run_moments(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const int k_max = p["k_max"];
    const double R = p["range"], t = p["time"], len = p["window_length"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    const MomentConstants c{p["c1"].get<double>(), p["c2"].get<double>(), p["c3"].get<double>()};
    const Window w = Window::interval(0.0, len);
    const Window sim = dilate(w, p["buffer"].get<double>() * R);

    auto check_table = [&](const std::string& name, const std::vector<Configuration>& samples, double tt) {
        for (double vol : doubles(p["volumes"])) {
            const Window delta = Window::interval(len / 2.0 - vol / 2.0, len / 2.0 + vol / 2.0);
            for (const auto& row : moment_check(samples, delta, k_max, c, tt)) {
                const std::string label = name + ";volume=" + fmt(vol) + ";k=" + std::to_string(row.k);
                out.add(label, "moment_root", row.empirical, row.std_error, samples.size());
                out.add(label, "bound", row.bound);
                out.check("moment bound " + label, !row.exceeded,
                          fmt(row.empirical) + " (se " + fmt(row.std_error) + ") vs bound " + fmt(row.bound));
            }
        }
    };

    std::vector<Configuration> poisson(reps, Configuration(w, R));
    parallel_for(reps, [&](std::size_t i) { poisson[i] = sample_poisson(1.0, w, SeedSpec{ctx.seed, i, "moments/poisson"}, R); },
                 ctx.threads);
    check_table("poisson", poisson, 0.0);

    const std::vector<std::pair<std::string, InteractionSpec>> dyn = {
        {"evolved-ideal", InteractionSpec::ideal(1, 1.0, R)},
        {"evolved-area", InteractionSpec::area(1, p["area_alpha"].get<double>(), p["area_beta"].get<double>(), R)}};
    for (const auto& [name, spec] : dyn) {
        std::vector<Configuration> evolved(reps, Configuration(w, R));
        const SimOptions opts{sim, w, p["buffer"].get<double>() * R, t, std::nullopt};
        const double b_sup = rate_bounds(spec).sup;
        parallel_for(
            reps,
            [&](std::size_t i) {
                const SeedSpec s{ctx.seed, i, "moments/" + name};
                const Configuration c0 = sample_poisson(1.0, sim, s.with_tag("init"), R);
                const InitialCondition init = InitialCondition::exponential(points_of(c0), s.with_tag("lifespans"));
                const Trajectory tr = simulate(init, spec, opts, propose_events(sim, t, b_sup, s.with_tag("noise")));
                evolved[i] = restrict(tr.full_at(t), w);
            },
            ctx.threads);
        check_table(name, evolved, t);
    }
    return out;
}

ExperimentOutput run_ergodic(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double R = p["range"], z = p["intensity"], k_se = p["se_multiplier"], slope_tol = p["slope_tolerance"];
    const std::size_t reps = p["replicas"].get<std::size_t>();
    Table conv{"ergodic_convergence", {"dim", "observable", "volume", "mean", "variance", "se"}, {}};
    for (int d : ints(p["dims"])) {
        const std::vector<double> sides = doubles(d == 1 ? p["sides_1d"] : p["sides_2d"]);
        std::vector<Window> windows;
        for (double s : sides) windows.push_back(Window::centred(d, s));
        const Window ambient = dilate(windows.back(), R);
        const double ball = (d == 1 ? 2.0 : std::acos(-1.0)) * std::pow(R, d);
        const std::vector<std::tuple<std::string, RootedObservable, double>> obs = {
            {"intensity", RootedObservable{0.0, [](std::span<const Point>) { return 1.0; }}, z},
            {"neighbours", RootedObservable{R, [](std::span<const Point> nb) { return static_cast<double>(nb.size()); }},
             z * z * ball}};
        for (const auto& [name, h, palm] : obs) {
            std::vector<std::vector<double>> avg(sides.size(), std::vector<double>(reps));
            parallel_for(
                reps,
                [&](std::size_t i) {
                    const Configuration eta = sample_poisson(z, ambient, SeedSpec{ctx.seed, i, "ergodic/d=" + std::to_string(d)}, R);
                    const auto a = ergodic_average(eta, h, windows);
                    for (std::size_t k = 0; k < a.size(); ++k) avg[k][i] = a[k];
                },
                ctx.threads);
            std::vector<double> logv, logvar;
            for (std::size_t k = 0; k < sides.size(); ++k) {
                const Estimate e = mean_estimate(avg[k]);
                RunningStats rs;
                for (double x : avg[k]) rs.push(x);
                const std::string label = "d=" + std::to_string(d) + ";" + name + ";volume=" + fmt(windows[k].volume());
                out.add(label, "spatial_average", e.value, e.se, e.n);
                out.add(label, "variance", rs.variance());
                conv.rows.push_back({std::to_string(d), name, fmt(windows[k].volume()), fmt(e.value), fmt(rs.variance()), fmt(e.se)});
                logv.push_back(std::log(windows[k].volume()));
                logvar.push_back(std::log(rs.variance()));
                if (k + 1 == sides.size()) {
                    out.check("spatial average converges d=" + std::to_string(d) + " " + name,
                              within(e.value, palm, k_se * e.se), z_detail(e.value, palm, e.se));
                }
            }
            const double slope = ols_slope(logv, logvar);
            out.add("d=" + std::to_string(d) + ";" + name, "variance_slope", slope);
            out.check("variance slope d=" + std::to_string(d) + " " + name, std::abs(slope + 1.0) <= slope_tol,
                      "log-log slope " + fmt(slope));
        }
    }
    out.curves.push_back(std::move(conv));
    return out;
}

}  // namespace gibbsflow::detail
