#include "gibbsflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "gibbsflow/parallel.hpp"

namespace gibbsflow {

SimOptions SimOptions::buffered(const Window& observe, double buffer, double horizon) {
    return SimOptions{dilate(observe, buffer), observe, buffer, horizon, std::nullopt};
}

void SimOptions::validate() const {
    if (!sim_window.contains(observe_window)) {
        throw std::invalid_argument("SimOptions: observe_window must lie inside sim_window");
    }
    if (!(buffer_width >= 0.0)) throw std::invalid_argument("SimOptions: buffer_width must be >= 0");
    if (!(horizon >= 0.0)) throw std::invalid_argument("SimOptions: horizon must be >= 0");
    if (frozen_boundary) {
        for (const auto& p : frozen_boundary->points()) {
            if (sim_window.contains(p)) {
                throw std::invalid_argument("SimOptions: frozen boundary points must lie outside sim_window");
            }
        }
    }
}

InitialCondition InitialCondition::empty() { return {}; }

InitialCondition InitialCondition::fixed(const MarkedConfiguration& marked) {
    InitialCondition ic;
    ic.mode = LifespanMode::fixed;
    for (const auto& e : marked.entries()) {
        ic.base.push_back(e.x);
        ic.lifespans.push_back(e.lifespan);
    }
    return ic;
}

InitialCondition InitialCondition::exponential(std::vector<Point> points, const SeedSpec& seed) {
    InitialCondition ic;
    ic.mode = LifespanMode::exponential;
    ic.base = std::move(points);
    ic.seed = seed;
    return ic;
}

MarkedConfiguration InitialCondition::realise() const {
    MarkedConfiguration out;
    if (mode == LifespanMode::fixed) {
        if (lifespans.size() != base.size()) {
            throw std::invalid_argument("InitialCondition: one lifespan per point required");
        }
        for (std::size_t i = 0; i < base.size(); ++i) out.add(base[i], lifespans[i]);
        return out;
    }
    CounterRng rng(seed.with_tag(seed.stream_tag + "/lifespans"));
    for (const auto& p : base) out.add(p, rng.exponential());
    return out;
}

// ---------------------------------------------------------------------------

Trajectory::Trajectory(Window window, double horizon, double index_range, MarkedConfiguration initial)
    : window_(window), horizon_(horizon), range_(index_range), initial_(std::move(initial)) {}

StateSnapshot Trajectory::state_at(double t) const {
    if (!(t >= 0.0 && t <= horizon_)) throw std::out_of_range("Trajectory::state_at: t outside [0, horizon]");
    StateSnapshot snap{Configuration(window_, range_), Configuration(window_, range_),
                       Configuration(window_, range_)};
    for (const auto& e : initial_.entries()) {
        if (e.lifespan > t) {
            snap.survivors.insert(e.x);
            snap.full.insert(e.x);
        }
    }
    for (const auto& b : births_) {
        if (b.birth <= t && t < b.death) {
            snap.born.insert(b.x);
            snap.full.insert(b.x);
        }
    }
    return snap;
}

Configuration Trajectory::full_at(double t) const {
    if (!(t >= 0.0 && t <= horizon_)) throw std::out_of_range("Trajectory::full_at: t outside [0, horizon]");
    Configuration full(window_, range_);
    for (const auto& e : initial_.entries()) {
        if (e.lifespan > t) full.insert(e.x);
    }
    for (const auto& b : births_) {
        if (b.birth <= t && t < b.death) full.insert(b.x);
    }
    return full;
}

void Trajectory::write_csv(std::ostream& os) const {
    const int d = window_.dim();
    os << "kind,x0" << (d == 2 ? ",x1" : "") << ",time\n";
    os.precision(17);
    auto row = [&](const char* kind, const Point& x, double time) {
        os << kind << ',' << x[0];
        if (d == 2) os << ',' << x[1];
        os << ',' << time << '\n';
    };
    for (const auto& e : initial_.entries()) {
        row("init", e.x, 0.0);
        if (e.lifespan <= horizon_) row("death", e.x, e.lifespan);
    }
    for (const auto& b : births_) {
        row("birth", b.x, b.birth);
        if (b.death <= horizon_) row("death", b.x, b.death);
    }
}

// ---------------------------------------------------------------------------

namespace {

struct PendingDeath {
    double time;
    Point x;
    bool operator>(const PendingDeath& o) const { return time > o.time; }
};

bool rate_depends_on_state(const InteractionSpec& spec) {
    if (spec.kind == InteractionKind::ideal) return false;
    if (spec.kind == InteractionKind::area && spec.alpha == 0.0) return false;
    if (spec.beta == 0.0) return false;
    return true;
}

}  // namespace

Trajectory simulate(const InitialCondition& init, const InteractionSpec& spec, const SimOptions& opts,
                    const EventStream& stream) {
    opts.validate();
    if (!(stream.window == opts.sim_window)) {
        throw std::invalid_argument("simulate: stream window does not match the simulation window");
    }
    if (stream.horizon != opts.horizon) {
        throw std::invalid_argument("simulate: stream horizon does not match the simulation horizon");
    }
    const RateBounds bounds = rate_bounds(spec);
    if (stream.b_sup < bounds.sup * (1.0 - 1e-12)) {
        throw std::invalid_argument("simulate: stream mark range is below the rate bound b_sup");
    }

    MarkedConfiguration marked = init.realise();
    for (const auto& e : marked.entries()) {
        if (!opts.sim_window.contains(e.x)) {
            throw std::invalid_argument("simulate: initial point outside the simulation window");
        }
    }
    Trajectory traj(opts.sim_window, opts.horizon, spec.range, marked);

    Configuration state(opts.sim_window, spec.range);
    std::priority_queue<PendingDeath, std::vector<PendingDeath>, std::greater<>> deaths;
    for (const auto& e : marked.entries()) {
        if (!state.insert(e.x)) throw std::invalid_argument("simulate: duplicate initial point");
        deaths.push({e.lifespan, e.x});
    }

    const bool interacting = rate_depends_on_state(spec);
    const Configuration* boundary = opts.frozen_boundary ? &*opts.frozen_boundary : nullptr;
    const double lo_guard = bounds.inf * (1.0 - 1e-9);
    const double hi_guard = bounds.sup * (1.0 + 1e-9);
    std::vector<Point> nb;

    for (const auto& ev : stream.events) {
        while (!deaths.empty() && deaths.top().time < ev.s) {
            state.erase(deaths.top().x);
            deaths.pop();
        }
        double b;
        if (interacting) {
            nb.clear();
            state.for_each_within(ev.x, spec.range, [&](const Point& y) { nb.push_back(y); });
            if (boundary) boundary->for_each_within(ev.x, spec.range, [&](const Point& y) { nb.push_back(y); });
            b = birth_rate(spec, ev.x, std::span<const Point>(nb));
        } else {
            b = birth_rate(spec, ev.x, std::span<const Point>{});
        }
        if (b > hi_guard || b < lo_guard) {
            throw std::logic_error("simulate: birth rate outside the declared envelope [b_inf, b_sup]");
        }
        if (ev.u <= b) {
            if (!state.insert(ev.x)) throw std::logic_error("simulate: proposal coincides with a live point");
            deaths.push({ev.s + ev.r, ev.x});
            traj.add_birth({ev.x, ev.s, ev.s + ev.r});
        }
    }
    traj.set_proposals(stream.events.size());
    return traj;
}

std::pair<Trajectory, Trajectory> simulate_coupled(const InitialCondition& init,
                                                   const InteractionSpec& spec,
                                                   const SimOptions& opts_small,
                                                   const SimOptions& opts_big,
                                                   const EventStream& big_stream) {
    if (!opts_big.sim_window.contains(opts_small.sim_window)) {
        throw std::invalid_argument("simulate_coupled: small window must be nested in the big one");
    }
    if (opts_small.frozen_boundary || opts_big.frozen_boundary) {
        throw std::invalid_argument("simulate_coupled: both runs must use the empty boundary");
    }
    if (!(opts_small.observe_window == opts_big.observe_window) || opts_small.horizon != opts_big.horizon) {
        throw std::invalid_argument("simulate_coupled: observe window and horizon must agree");
    }
    const MarkedConfiguration marked = init.realise();
    MarkedConfiguration small_marked;
    for (const auto& e : marked.entries()) {
        if (opts_small.sim_window.contains(e.x)) small_marked.add(e.x, e.lifespan);
    }
    const EventStream small_stream = shared_restriction(big_stream, opts_small.sim_window);
    Trajectory small = simulate(InitialCondition::fixed(small_marked), spec, opts_small, small_stream);
    Trajectory big = simulate(InitialCondition::fixed(marked), spec, opts_big, big_stream);
    return {std::move(small), std::move(big)};
}

namespace {

using Interval = std::tuple<double, double, double, double>;  // x0, x1, start, end

std::vector<Interval> restricted_intervals(const Trajectory& tr, const Window& w) {
    std::vector<Interval> out;
    const double T = tr.horizon();
    for (const auto& e : tr.initial().entries()) {
        if (w.contains(e.x)) out.emplace_back(e.x[0], e.x[1], 0.0, std::min(e.lifespan, T));
    }
    for (const auto& b : tr.births()) {
        if (w.contains(b.x)) out.emplace_back(b.x[0], b.x[1], b.birth, std::min(b.death, T));
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

bool restricted_paths_agree(const Trajectory& a, const Trajectory& b, const Window& w) {
    if (a.horizon() != b.horizon()) throw std::invalid_argument("restricted_paths_agree: horizon mismatch");
    return restricted_intervals(a, w) == restricted_intervals(b, w);
}

Estimate disagreement_probability(std::span<const std::pair<Trajectory, Trajectory>> pairs,
                                  const Window& observe) {
    if (pairs.empty()) return {};
    std::size_t bad = 0;
    for (const auto& [a, b] : pairs) {
        if (!restricted_paths_agree(a, b, observe)) ++bad;
    }
    const double n = static_cast<double>(pairs.size());
    const double p = static_cast<double>(bad) / n;
    return {p, std::sqrt(p * (1.0 - p) / n), pairs.size()};
}

// ---------------------------------------------------------------------------

namespace {

Window integration_domain(const Observable& f, const Configuration& eta, double dilation) {
    if (!f.support) throw std::invalid_argument("generator: observable lacks a support declaration");
    Window dom = dilation > 0.0 ? dilate(*f.support, dilation) : *f.support;
    return intersect(dom, eta.ambient());
}

Point uniform_point(const Window& w, CounterRng& rng) {
    Point p;
    for (int a = 0; a < w.dim(); ++a) p[a] = rng.uniform(w.lo()[a], w.hi()[a]);
    return p;
}

/// One unbiased draw of (L f)(eta), plus the per-sample birth terms when asked.
double generator_draw(const Observable& f, Configuration& eta, const InteractionSpec& spec,
                      std::size_t n, CounterRng& rng, std::vector<double>* birth_terms) {
    const Window dom = integration_domain(f, eta, 0.0);
    const double vol = dom.volume();
    const double f0 = f.eval(eta);
    double birth_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point x = uniform_point(dom, rng);
        const double b = birth_rate(spec, x, eta);
        if (!eta.insert(x)) continue;  // coincident draw: null set
        const double term = vol * b * (f.eval(eta) - f0);
        eta.erase(x);
        birth_sum += term;
        if (birth_terms) birth_terms->push_back(term);
    }
    double death_sum = 0.0;
    const std::vector<Point> pts(eta.points().begin(), eta.points().end());
    for (const auto& x : pts) {
        if (!dom.contains(x)) continue;
        eta.erase(x);
        death_sum += f.eval(eta) - f0;
        eta.insert(x);
    }
    return (n > 0 ? birth_sum / static_cast<double>(n) : 0.0) + death_sum;
}

double generator_sq_draw(const Observable& f, Configuration& eta, const InteractionSpec& spec,
                         std::size_t n, CounterRng& rng) {
    // Lf is supported on the R-dilation of f's support.
    const Window dom = integration_domain(f, eta, spec.range);
    const double vol = dom.volume();
    const double lf0 = generator_draw(f, eta, spec, n, rng, nullptr);
    double birth_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point x = uniform_point(dom, rng);
        const double b = birth_rate(spec, x, eta);
        if (!eta.insert(x)) continue;
        const double lf = generator_draw(f, eta, spec, n, rng, nullptr);
        eta.erase(x);
        birth_sum += vol * b * (lf - lf0);
    }
    double death_sum = 0.0;
    const std::vector<Point> pts(eta.points().begin(), eta.points().end());
    for (const auto& x : pts) {
        if (!dom.contains(x)) continue;
        eta.erase(x);
        death_sum += generator_draw(f, eta, spec, n, rng, nullptr) - lf0;
        eta.insert(x);
    }
    return (n > 0 ? birth_sum / static_cast<double>(n) : 0.0) + death_sum;
}

}  // namespace

Estimate apply_generator(const Observable& f, const Configuration& eta, const InteractionSpec& spec,
                         std::size_t quadrature_n, CounterRng& rng) {
    if (quadrature_n == 0) throw std::invalid_argument("apply_generator: quadrature_n must be positive");
    Configuration work = eta;
    std::vector<double> terms;
    terms.reserve(quadrature_n);
    const double value = generator_draw(f, work, spec, quadrature_n, rng, &terms);
    const Estimate birth = mean_estimate(terms);
    return {value, birth.se, quadrature_n};
}

double generator_power_draw(const Observable& f, const Configuration& eta, const InteractionSpec& spec,
                            int k, std::size_t quadrature_n, CounterRng& rng) {
    Configuration work = eta;
    switch (k) {
        case 0: return f.eval(work);
        case 1: return generator_draw(f, work, spec, quadrature_n, rng, nullptr);
        case 2: return generator_sq_draw(f, work, spec, quadrature_n, rng);
        default: throw std::invalid_argument("generator_power: Monte Carlo supports k <= 2 only");
    }
}

Estimate generator_power_mc(const Observable& f, const Configuration& eta, const InteractionSpec& spec,
                            int k, std::size_t quadrature_n, CounterRng& rng, std::size_t batches) {
    if (k == 0) return {f.eval(eta), 0.0, 1};
    if (k == 1) return apply_generator(f, eta, spec, quadrature_n, rng);
    std::vector<double> draws;
    for (std::size_t b = 0; b < std::max<std::size_t>(batches, 2); ++b) {
        draws.push_back(generator_power_draw(f, eta, spec, k, quadrature_n, rng));
    }
    return mean_estimate(draws);
}

Estimate semigroup_expectation(const Observable& f, const InitialSampler& sampler,
                               const InteractionSpec& spec, const SimOptions& opts, double t,
                               std::size_t n_replicas, const SeedSpec& seed, unsigned threads) {
    SimOptions o = opts;
    o.horizon = t;
    o.validate();
    const double b_sup = rate_bounds(spec).sup;
    std::vector<double> values(n_replicas);
    parallel_for(
        n_replicas,
        [&](std::size_t i) {
            const SeedSpec rs = seed.with_replica(i);
            const InitialCondition init = sampler(rs.with_tag(seed.stream_tag + "/init"));
            if (t == 0.0) {
                const MarkedConfiguration m = init.realise();
                Configuration c(o.sim_window, spec.range);
                for (const auto& e : m.entries()) c.insert(e.x);
                values[i] = f.eval(c);
                return;
            }
            const EventStream stream = propose_events(o.sim_window, t, b_sup, rs.with_tag(seed.stream_tag + "/noise"));
            const Trajectory tr = simulate(init, spec, o, stream);
            values[i] = f.eval(tr.full_at(t));
        },
        threads);
    return mean_estimate(values);
}

}  // namespace gibbsflow
