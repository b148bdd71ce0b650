// Experiments on the finite-state surrogate.
#include <algorithm>
#include <cmath>
#include <numeric>

#include "exp_internal.hpp"
#include "gibbsflow/stats.hpp"

namespace gibbsflow::detail {

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }
std::vector<int> ints(const json& j) { return j.get<std::vector<int>>(); }

std::vector<double> random_distribution(std::size_t n, CounterRng& rng) {
    std::vector<double> mu(n);
    double s = 0.0;
    for (auto& x : mu) s += x = rng.exponential();
    for (auto& x : mu) x /= s;
    return mu;
}

LatticeModel area_line(int m, double cell_width, double alpha, double beta, double range) {
    return LatticeModel::line(InteractionSpec::area(1, alpha, beta, range), m, cell_width);
}

std::string model_label(int m, double alpha, double beta) {
    return "m=" + std::to_string(m) + ";alpha=" + fmt(alpha) + ";beta=" + fmt(beta);
}

namespace {

struct ModelCase {
    int m;
    double alpha;
    double beta;
};

std::vector<ModelCase> model_grid(const json& p) {
    std::vector<ModelCase> out;
    for (int m : ints(p["cells"])) {
        for (double beta : doubles(p["betas"])) {
            for (double alpha : doubles(p["alphas"])) out.push_back({m, alpha, beta});
        }
    }
    return out;
}

std::vector<double> difference(const std::vector<double>& mu, const std::vector<double>& nu) {
    std::vector<double> d(mu.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = mu[i] - nu[i];
    return d;
}

}  // namespace

ExperimentOutput run_debruijn(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double T = p["horizon"], tol = p["tolerance"], width = p["cell_width"], R = p["range"];
    const int n_grid = p["n_grid"];
    const double grading = p["grading"];
    CounterRng rng(seed_for(ctx, "debruijn/mu0"));
    Table curve{"debruijn_curve", {"model", "t", "entropy", "fisher", "residual", "kappa", "envelope"}, {}};
    for (const auto& c : model_grid(p)) {
        const LatticeModel model = area_line(c.m, width, c.alpha, c.beta, R);
        const GeneratorMatrix Q = build_generator(model);
        const std::vector<double> mu0 = random_distribution(model.states(), rng);
        const DeBruijnCurve dc = de_bruijn_check(mu0, model, Q, T, n_grid, grading);
        const double kappa = kappa_bound(model).kappa;
        const std::string label = model_label(c.m, c.alpha, c.beta);
        out.add(label, "max_residual", dc.max_residual);
        out.add(label, "initial_entropy", dc.entropy.front());
        for (std::size_t j = 0; j < dc.t.size(); j += 2) {
            curve.rows.push_back({label, fmt(dc.t[j]), fmt(dc.entropy[j]), fmt(dc.fisher[j]), fmt(dc.residual[j]),
                                  fmt(kappa), fmt(dc.entropy.front() * std::exp(-kappa * dc.t[j]))});
        }
        out.check("de Bruijn residual " + label, dc.max_residual <= tol,
                  "max residual " + fmt(dc.max_residual) + " vs tolerance " + fmt(tol));
    }
    out.curves.push_back(std::move(curve));
    return out;
}

ExperimentOutput run_dissipation(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double T = p["horizon"], tol = p["tolerance"], h = p["step"], width = p["cell_width"], R = p["range"];
    const int n_times = p["n_times"];
    CounterRng rng(seed_for(ctx, "dissipation/mu0"));
    Table curve{"dissipation_curve", {"model", "t", "entropy_slope", "fisher", "difference"}, {}};
    for (const auto& c : model_grid(p)) {
        const LatticeModel model = area_line(c.m, width, c.alpha, c.beta, R);
        const GeneratorMatrix Q = build_generator(model);
        const StateDist nu = stationary(model);
        const std::vector<double> d0 = difference(random_distribution(model.states(), rng), nu);
        std::vector<double> times;
        for (int j = 1; j <= n_times; ++j) {
            const double t = T * j / n_times;
            times.insert(times.end(), {t - h, t, t + h});
        }
        const auto path = evolve_grid(d0, Q, times);
        double worst = 0.0;
        const std::string label = model_label(c.m, c.alpha, c.beta);
        for (int j = 0; j < n_times; ++j) {
            const double slope =
                (rel_entropy_from_difference(path[3 * j + 2], nu) - rel_entropy_from_difference(path[3 * j], nu)) /
                (2.0 * h);
            const double J = fisher_from_difference(path[3 * j + 1], nu, Q);
            worst = std::max(worst, std::abs(slope + J));
            curve.rows.push_back({label, fmt(times[3 * j + 1]), fmt(slope), fmt(J), fmt(slope + J)});
        }
        out.add(label, "max_abs_difference", worst);
        out.check("dI/dt = -J " + label, worst <= tol, "max |dI/dt + J| " + fmt(worst) + " vs " + fmt(tol));
    }
    out.curves.push_back(std::move(curve));
    return out;
}

ExperimentOutput run_strict_decrease(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double T = p["horizon"], width = p["cell_width"], R = p["range"];
    const double floor = p["entropy_floor"], margin = p["margin"];
    const int n_grid = p["n_grid"], n_mu = p["n_initial"];
    CounterRng rng(seed_for(ctx, "strict-decrease/mu0"));
    std::vector<double> times;
    for (int j = 0; j < n_grid; ++j) times.push_back(T * j / (n_grid - 1));
    for (const auto& c : model_grid(p)) {
        const LatticeModel model = area_line(c.m, width, c.alpha, c.beta, R);
        const GeneratorMatrix Q = build_generator(model);
        const StateDist nu = stationary(model);
        int violations = 0;
        double min_drop = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n_mu; ++k) {
            const auto path = evolve_grid(difference(random_distribution(model.states(), rng), nu), Q, times);
            double prev = rel_entropy_from_difference(path[0], nu);
            for (int j = 1; j < n_grid; ++j) {
                if (prev < floor) break;
                const double cur = rel_entropy_from_difference(path[j], nu);
                min_drop = std::min(min_drop, prev - cur);
                if (!(cur < prev - margin)) ++violations;
                prev = cur;
            }
        }
        const std::string label = model_label(c.m, c.alpha, c.beta);
        out.add(label, "violations", violations, 0.0, n_mu);
        out.add(label, "min_drop", min_drop);
        out.check("strict decrease " + label, violations == 0,
                  std::to_string(violations) + " non-decreasing steps over " + std::to_string(n_mu) +
                      " initial laws; smallest drop " + fmt(min_drop));
    }
    return out;
}

ExperimentOutput run_decay(const json& p, const RunContext& ctx) {
    ExperimentOutput out;
    const double width = p["cell_width"], R = p["range"], alpha = p["alpha"];
    const int m = p["cells"], n_mu = p["n_initial"], n_grid = p["n_grid"];
    const double T = p["horizon"], perturbation = p["perturbation"], slope_tol = p["slope_tolerance"];
    // Fit window for the asymptotic rate, in units of 1 / spectral gap.
    const double fit_start = p["fit_start"], fit_end = p["fit_end"];
    CounterRng rng(seed_for(ctx, "decay/mu0"));
    Table curve{"decay_curve", {"beta", "kappa", "t", "entropy", "envelope"}, {}};

    // kappa -> 1 as beta -> 0
    std::vector<double> limit_betas = doubles(p["limit_betas"]);
    std::vector<double> limit_kappa;
    for (double b : limit_betas) {
        limit_kappa.push_back(kappa_bound(area_line(m, width, alpha, b, R)).kappa);
        out.add("beta=" + fmt(b), "kappa", limit_kappa.back());
    }
    bool monotone = true;
    for (std::size_t i = 1; i < limit_kappa.size(); ++i) monotone &= limit_kappa[i] >= limit_kappa[i - 1];
    out.check("kappa increases towards 1 as beta decreases", monotone && limit_kappa.back() < 1.0 + 1e-12 &&
                  1.0 - limit_kappa.back() < 1.0 - limit_kappa.front(),
              "kappa at betas " + nlohmann::json(limit_betas).dump() + ": " + nlohmann::json(limit_kappa).dump());

    int tested = 0;
    for (double beta : doubles(p["betas"])) {
        const LatticeModel model = area_line(m, width, alpha, beta, R);
        const KappaBound kb = kappa_bound(model);
        const std::string label = model_label(m, alpha, beta);
        out.add(label, "epsilon", kb.epsilon);
        out.add(label, "kappa", kb.kappa);
        if (!(kb.kappa > 0.0)) continue;
        ++tested;
        const GeneratorMatrix Q = build_generator(model);
        const StateDist nu = stationary(model);
        const double gap = spectral_gap(Q, nu);
        out.add(label, "spectral_gap", gap);

        std::vector<double> times;
        for (int j = 0; j < n_grid; ++j) times.push_back(T * j / (n_grid - 1));
        int violations = 0;
        double worst_ratio = 0.0;
        for (int k = 0; k < n_mu; ++k) {
            const auto path = evolve_grid(difference(random_distribution(model.states(), rng), nu), Q, times);
            const double I0 = rel_entropy_from_difference(path[0], nu);
            for (int j = 0; j < n_grid; ++j) {
                const double I = rel_entropy_from_difference(path[j], nu);
                const double env = std::exp(-kb.kappa * times[j]) * I0;
                worst_ratio = std::max(worst_ratio, I / env);
                if (I > env * (1.0 + 1e-12)) ++violations;
                if (k == 0) curve.rows.push_back({fmt(beta), fmt(kb.kappa), fmt(times[j]), fmt(I), fmt(env)});
            }
        }
        out.add(label, "envelope_violations", violations, 0.0, n_mu);
        out.add(label, "max_entropy_over_envelope", worst_ratio);
        out.check("entropy below exp(-kappa t) envelope " + label, violations == 0,
                  std::to_string(violations) + " violations; max I_t / envelope " + fmt(worst_ratio));

        // Asymptotic rate from a law near nu; the difference is evolved linearly.
        std::vector<double> d(model.states());
        {
            std::vector<double> r(model.states());
            double mean = 0.0;
            for (std::size_t i = 0; i < r.size(); ++i) mean += nu[i] * (r[i] = rng.uniform(-1.0, 1.0));
            for (std::size_t i = 0; i < r.size(); ++i) d[i] = perturbation * nu[i] * (r[i] - mean);
        }
        std::vector<double> late, logI;
        for (int j = 0; j <= 40; ++j) late.push_back((fit_start + (fit_end - fit_start) * j / 40) / gap);
        // Step by step, removing the round-off mass that would otherwise
        // sit along nu and stop the decay.
        double now = 0.0;
        for (double tj : late) {
            d = evolve(d, Q, tj - now);
            now = tj;
            const double mass = std::accumulate(d.begin(), d.end(), 0.0);
            for (std::size_t i = 0; i < d.size(); ++i) d[i] -= mass * nu[i];
            logI.push_back(std::log(rel_entropy_from_difference(d, nu)));
        }
        const double rate = -ols_slope(late, logI);
        out.add(label, "asymptotic_rate", rate);
        out.add(label, "twice_spectral_gap", 2.0 * gap);
        out.check("asymptotic rate >= kappa " + label, rate >= kb.kappa,
                  "rate " + fmt(rate) + " vs kappa " + fmt(kb.kappa));
        out.check("asymptotic rate within 5% of 2 gap " + label, std::abs(rate - 2.0 * gap) <= slope_tol * 2.0 * gap,
                  "rate " + fmt(rate) + " vs 2 gap " + fmt(2.0 * gap));
    }
    out.check("some beta has kappa > 0", tested > 0, std::to_string(tested) + " betas with positive kappa");
    out.curves.push_back(std::move(curve));
    return out;
}

ExperimentOutput run_finite_time_gibbs(const json& p, const RunContext&) {
    ExperimentOutput out;
    const int m = p["cells"], n_grid = p["n_grid"];
    const double T = p["horizon"], width = p["cell_width"], R = p["range"], alpha = p["alpha"], beta = p["beta"];
    const double tv_floor = p["tv_floor"];
    const LatticeModel model = area_line(m, width, alpha, beta, R);
    const GeneratorMatrix Q = build_generator(model);
    const StateDist nu = stationary(model);
    const std::vector<double> uniform(model.states(), 1.0 / static_cast<double>(model.states()));
    const FiniteTimeCheck fc = finite_time_gibbs_check(uniform, nu, Q, T, n_grid);
    const std::string label = model_label(m, alpha, beta);
    out.add(label, "min_tv", fc.min_tv);
    out.add(label, "final_tv", fc.tv.back());
    Table curve{"tv_curve", {"t", "tv"}, {}};
    for (std::size_t j = 0; j < fc.t.size(); ++j) curve.rows.push_back({fmt(fc.t[j]), fmt(fc.tv[j])});
    out.curves.push_back(std::move(curve));
    out.check("distance to nu stays positive", fc.min_tv > tv_floor,
              "min TV " + fmt(fc.min_tv) + " vs floor " + fmt(tv_floor));
    out.check("distance to nu nonincreasing", fc.nonincreasing, "TV along the grid");
    const FiniteTimeCheck same = finite_time_gibbs_check(nu, nu, Q, T, 10);
    out.check("started at nu stays at nu", same.min_tv <= 1e-12 && same.tv.back() <= 1e-12,
              "TV " + fmt(same.tv.back()));
    return out;
}

ExperimentOutput run_boundary_fisher(const json& p, const RunContext&) {
    ExperimentOutput out;
    const double width = p["cell_width"], R = p["range"], alpha = p["alpha"], beta = p["beta"], prob = p["p"];
    const int collar = p["collar"];
    const InteractionSpec spec = InteractionSpec::area(1, alpha, beta, R);
    Table curve{"boundary_fisher", {"interior", "free", "averaged", "difference_per_cell"}, {}};
    std::vector<double> per_cell;
    for (int m : ints(p["interiors"])) {
        const BoundaryFisher bf = fisher_bc_variants(spec, m, collar, width, prob);
        const std::string label = "interior=" + std::to_string(m);
        out.add(label, "fisher_free", bf.free_bc);
        out.add(label, "fisher_averaged", bf.averaged_bc);
        per_cell.push_back(std::abs(bf.difference()) / m);
        out.add(label, "difference_per_cell", per_cell.back());
        curve.rows.push_back({std::to_string(m), fmt(bf.free_bc), fmt(bf.averaged_bc), fmt(per_cell.back())});
        const BoundaryFisher none = fisher_bc_variants(spec, m, 0, width, prob);
        out.check("no collar gives equal forms " + label, none.free_bc == none.averaged_bc,
                  fmt(none.free_bc) + " vs " + fmt(none.averaged_bc));
        const BoundaryFisher ideal = fisher_bc_variants(InteractionSpec::area(1, 0.0, beta, R), m, collar, width, prob);
        out.check("zero interaction gives equal forms " + label,
                  std::abs(ideal.free_bc - ideal.averaged_bc) <= 1e-12 * std::max(1.0, ideal.free_bc),
                  fmt(ideal.free_bc) + " vs " + fmt(ideal.averaged_bc));
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < per_cell.size(); ++i) decreasing &= per_cell[i] < per_cell[i - 1];
    out.check("boundary difference per cell decreases with size", decreasing, nlohmann::json(per_cell).dump());
    out.curves.push_back(std::move(curve));
    return out;
}

}  // namespace gibbsflow::detail
