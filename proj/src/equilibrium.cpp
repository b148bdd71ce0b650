#include "gibbsflow/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "gibbsflow/dynamics.hpp"

namespace gibbsflow {

Configuration sample_poisson(double z, const Window& w, CounterRng& rng, double index_range) {
    if (!(z > 0.0)) throw std::invalid_argument("sample_poisson: z must be positive");
    Configuration cfg(w, index_range);
    const std::uint64_t n = rng.poisson(z * w.volume());
    for (std::uint64_t i = 0; i < n; ++i) {
        Point p;
        for (int a = 0; a < w.dim(); ++a) p[a] = rng.uniform(w.lo()[a], w.hi()[a]);
        cfg.insert(p);
    }
    return cfg;
}

Configuration sample_poisson(double z, const Window& w, const SeedSpec& seed, double index_range) {
    CounterRng rng(seed);
    return sample_poisson(z, w, rng, index_range);
}

void GibbsSampleSpec::validate() const {
    interaction.validate();
    if (window.dim() != interaction.dim) throw std::invalid_argument("GibbsSampleSpec: dimension mismatch");
    if (!(burn_in > 0.0) || !(spacing > 0.0)) {
        throw std::invalid_argument("GibbsSampleSpec: burn_in and spacing must be positive");
    }
    if (n_samples == 0) throw std::invalid_argument("GibbsSampleSpec: n_samples must be positive");
    if (boundary) {
        const Window outer = dilate(window, interaction.range);
        for (const auto& p : boundary->points()) {
            if (window.contains(p) || !outer.contains(p)) {
                std::ostringstream os;
                os.precision(17);
                os << "GibbsSampleSpec: boundary point (" << p[0] << ", " << p[1] << ") is not in the R-collar";
                throw std::invalid_argument(os.str());
            }
        }
    }
}

namespace {

struct Change {
    double time;
    int sign;  // +1 birth, -1 death
    Point x;
};

}  // namespace

GibbsChain sample_gibbs(const GibbsSampleSpec& g, const SeedSpec& seed) {
    g.validate();
    const double horizon = g.burn_in + g.spacing * static_cast<double>(g.n_samples - 1);
    const double R = g.interaction.range;

    const Configuration start = sample_poisson(g.initial_intensity, g.window, seed.with_tag(seed.stream_tag + "/start"), R);
    const InitialCondition init = InitialCondition::exponential(
        std::vector<Point>(start.points().begin(), start.points().end()), seed.with_tag(seed.stream_tag + "/lifespans"));

    SimOptions opts{g.window, g.window, 0.0, horizon, g.boundary};
    const EventStream stream =
        propose_events(g.window, horizon, rate_bounds(g.interaction).sup, seed.with_tag(seed.stream_tag + "/noise"));
    const Trajectory tr = simulate(init, g.interaction, opts, stream);

    // One chronological sweep instead of a replay per sample time.
    std::vector<Change> changes;
    for (const auto& e : tr.initial().entries()) changes.push_back({e.lifespan, -1, e.x});
    for (const auto& b : tr.births()) {
        changes.push_back({b.birth, +1, b.x});
        changes.push_back({b.death, -1, b.x});
    }
    std::sort(changes.begin(), changes.end(), [](const Change& a, const Change& b) { return a.time < b.time; });

    GibbsChain chain;
    Configuration state(g.window, R);
    for (const auto& e : tr.initial().entries()) state.insert(e.x);
    std::size_t next = 0;
    std::vector<double> counts;
    for (std::size_t k = 0; k < g.n_samples; ++k) {
        const double t = g.burn_in + g.spacing * static_cast<double>(k);
        // Point alive on [birth, death).
        while (next < changes.size() && changes[next].time <= t) {
            if (changes[next].sign > 0) state.insert(changes[next].x);
            else state.erase(changes[next].x);
            ++next;
        }
        chain.samples.push_back(state);
        counts.push_back(static_cast<double>(state.size()));
    }
    chain.autocorrelation_lag = static_cast<std::size_t>(std::ceil(10.0 / g.spacing));
    chain.autocorrelation = autocorrelation(counts, chain.autocorrelation_lag);
    chain.mixing_flag = counts.size() > chain.autocorrelation_lag + 1 && chain.autocorrelation >= 0.1;
    return chain;
}

std::vector<TestFunction> default_test_functions(const Window& window, double range) {
    Point lo = window.lo(), hi = window.hi();
    for (int a = 0; a < window.dim(); ++a) {
        lo[a] += range;
        hi[a] -= range;
    }
    const Window inner(window.dim(), lo, hi);
    const Point c = inner.centre();
    const double half = range / 2.0;
    std::vector<TestFunction> out;
    out.push_back({"indicator", [](const Point&, const Configuration&) { return 1.0; }, inner});
    out.push_back({"neighbour_count",
                   [range](const Point& x, const Configuration& eta) {
                       double n = 0.0;
                       eta.for_each_within(x, range, [&](const Point&) { n += 1.0; });
                       return n;
                   },
                   inner});
    out.push_back({"isolated",
                   [half](const Point& x, const Configuration& eta) {
                       bool hit = false;
                       eta.for_each_within(x, half, [&](const Point&) { hit = true; });
                       return hit ? 0.0 : 1.0;
                   },
                   inner});
    out.push_back({"offset", [c](const Point& x, const Configuration&) { return x[0] - c[0]; }, inner});
    out.push_back({"saturating_count",
                   [](const Point&, const Configuration& eta) {
                       const double n = static_cast<double>(eta.size());
                       return n / (1.0 + n);
                   },
                   inner});
    return out;
}

std::vector<Estimate> gnz_residual(std::span<const Configuration> samples, std::span<const TestFunction> tests,
                                   const InteractionSpec& spec, const Window& window, std::optional<double> step) {
    const double h = step.value_or(spec.range / 50.0);
    if (!(h > 0.0)) throw std::invalid_argument("gnz_residual: step must be positive");
    for (const auto& t : tests) {
        if (!window.contains(dilate(t.support, spec.range))) {
            throw std::invalid_argument("gnz_residual: test function '" + t.name +
                                        "' is supported within R of the window boundary");
        }
    }
    std::vector<RunningStats> acc(tests.size());
    for (const auto& eta_in : samples) {
        Configuration eta = eta_in;
        const std::vector<Point> pts(eta.points().begin(), eta.points().end());
        for (std::size_t j = 0; j < tests.size(); ++j) {
            const auto& t = tests[j];
            double sum = 0.0;
            for (const auto& x : pts) {
                if (!t.support.contains(x)) continue;
                eta.erase(x);
                sum += t.fn(x, eta);
                eta.insert(x);
            }
            // Midpoint tensor grid over the support.
            const int d = window.dim();
            std::array<int, 2> n{1, 1};
            std::array<double, 2> dx{1.0, 1.0};
            for (int a = 0; a < d; ++a) {
                n[a] = std::max(1, static_cast<int>(std::ceil(t.support.side(a) / h)));
                dx[a] = t.support.side(a) / n[a];
            }
            double integral = 0.0;
            for (int j1 = 0; j1 < n[1]; ++j1) {
                for (int j0 = 0; j0 < n[0]; ++j0) {
                    Point x(t.support.lo()[0] + (j0 + 0.5) * dx[0],
                            d == 2 ? t.support.lo()[1] + (j1 + 0.5) * dx[1] : 0.0);
                    if (eta.contains(x)) continue;
                    integral += birth_rate(spec, x, eta) * t.fn(x, eta);
                }
            }
            integral *= dx[0] * (d == 2 ? dx[1] : 1.0);
            acc[j].push(sum - integral);
        }
    }
    std::vector<Estimate> out;
    for (const auto& a : acc) out.push_back(a.estimate());
    return out;
}

void write_samples(const std::filesystem::path& dir, std::span<const Configuration> samples) {
    std::filesystem::create_directories(dir);
    nlohmann::json index;
    index["count"] = samples.size();
    index["files"] = nlohmann::json::array();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string name = "sample_" + std::to_string(i) + ".csv";
        std::ofstream os(dir / name);
        if (!os) throw std::runtime_error("write_samples: cannot write " + (dir / name).string());
        write_configuration_csv(os, samples[i]);
        index["files"].push_back({{"file", name}, {"points", samples[i].size()}});
    }
    std::ofstream js(dir / "index.json");
    js << index.dump(2) << '\n';
}

}  // namespace gibbsflow
