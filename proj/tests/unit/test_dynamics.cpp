#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "gibbsflow/dynamics.hpp"
#include "gibbsflow/equilibrium.hpp"
#include "test_support.hpp"

using namespace gibbsflow;
using testing_support::sorted;

namespace {

EventStream stream_for(const SimOptions& o, const InteractionSpec& spec, const SeedSpec& s) {
    return propose_events(o.sim_window, o.horizon, rate_bounds(spec).sup, s);
}

// State at time t rebuilt directly from the initial marks and the birth records.
std::vector<Point> replay(const Trajectory& tr, double t) {
    std::vector<Point> out;
    for (const auto& e : tr.initial().entries())
        if (e.lifespan > t) out.push_back(e.x);
    for (const auto& b : tr.births())
        if (b.birth <= t && t < b.death) out.push_back(b.x);
    return sorted(out);
}

}  // namespace

TEST_CASE("pure death with no proposals") {
    const Window w = Window::interval(0.0, 1.0);
    const SimOptions opts{w, w, 0.0, 1.0, std::nullopt};
    MarkedConfiguration m;
    m.add(Point(0.5), 0.5);
    const EventStream none{w, 1.0, 1.0, {}};
    const Trajectory tr = simulate(InitialCondition::fixed(m), InteractionSpec::ideal(1, 1.0), opts, none);
    CHECK(tr.full_at(0.4).size() == 1);
    CHECK(tr.full_at(0.6).size() == 0);
    const StateSnapshot s0 = tr.state_at(0.0);
    CHECK(s0.full.size() == 1);
    CHECK(s0.survivors.size() == 1);
    CHECK(s0.born.size() == 0);
    CHECK_THROWS_AS(tr.state_at(1.5), std::out_of_range);
    CHECK_THROWS_AS(tr.state_at(-0.1), std::out_of_range);
}

TEST_CASE("stream must match the options") {
    const Window w = Window::interval(0.0, 1.0);
    const SimOptions opts{w, w, 0.0, 1.0, std::nullopt};
    const auto spec = InteractionSpec::ideal(1, 1.0);
    CHECK_THROWS(simulate(InitialCondition::empty(), spec, opts,
                          propose_events(Window::interval(0.0, 2.0), 1.0, 1.0, SeedSpec{})));
    CHECK_THROWS(simulate(InitialCondition::empty(), spec, opts, propose_events(w, 2.0, 1.0, SeedSpec{})));
    CHECK_THROWS(simulate(InitialCondition::empty(), InteractionSpec::area(1, -1.0, 1.0, 1.0), opts,
                          propose_events(w, 1.0, 1.0, SeedSpec{})));
}

TEST_CASE("states agree with a replay of the records, and snapshots split cleanly") {
    const auto spec = InteractionSpec::area(1, 1.0, 1.0, 1.0);
    const SimOptions opts = SimOptions::buffered(Window::interval(0.0, 2.0), 2.0, 3.0);
    const Configuration c0 = sample_poisson(1.0, opts.sim_window, SeedSpec{1, 0, "init"});
    const std::vector<Point> base(c0.points().begin(), c0.points().end());
    const Trajectory tr = simulate(InitialCondition::exponential(base, SeedSpec{1, 0, "life"}), spec, opts,
                                   stream_for(opts, spec, SeedSpec{1, 0, "noise"}));
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double t = u(gen);
        const StateSnapshot s = tr.state_at(t);
        CHECK(s.full.sorted_points() == replay(tr, t));
        CHECK(s.full.size() == s.survivors.size() + s.born.size());
        for (const auto& p : s.survivors.points()) CHECK_FALSE(s.born.contains(p));
    }
    for (const auto& b : tr.births()) CHECK(b.death > b.birth);
}

TEST_CASE("same stream and marks reproduce the trajectory bitwise") {
    const auto spec = InteractionSpec::area(2, -0.5, 1.0, 1.0);
    const SimOptions opts = SimOptions::buffered(Window::cube(2, 0.0, 2.0), 1.0, 2.0);
    const auto ev = stream_for(opts, spec, SeedSpec{2, 0, "noise"});
    const auto init = InitialCondition::exponential({Point(0.5, 0.5), Point(1.5, 1.2)}, SeedSpec{2, 0, "life"});
    const Trajectory a = simulate(init, spec, opts, ev);
    const Trajectory b = simulate(init, spec, opts, ev);
    REQUIRE(a.births().size() == b.births().size());
    CHECK(std::equal(a.births().begin(), a.births().end(), b.births().begin()));
    std::stringstream sa, sb;
    a.write_csv(sa);
    b.write_csv(sb);
    CHECK(sa.str() == sb.str());
    CHECK(sa.str().rfind("kind,x0,x1,time\n", 0) == 0);
}

TEST_CASE("zero area coefficient reproduces the unit ideal gas event for event") {
    const SimOptions opts = SimOptions::buffered(Window::interval(0.0, 3.0), 1.0, 2.0);
    const auto ideal = InteractionSpec::ideal(1, 1.0);
    const auto area0 = InteractionSpec::area(1, 0.0, 1.0, 1.0);
    const auto ev = stream_for(opts, ideal, SeedSpec{3, 0, "noise"});
    const auto init = InitialCondition::exponential({Point(1.0)}, SeedSpec{3, 0, "life"});
    const Trajectory a = simulate(init, ideal, opts, ev);
    const Trajectory b = simulate(init, area0, opts, ev);
    REQUIRE(a.births().size() == b.births().size());
    CHECK(std::equal(a.births().begin(), a.births().end(), b.births().begin()));
}

TEST_CASE("ideal-gas mean count") {
    const Window w = Window::interval(0.0, 4.0);
    const auto spec = InteractionSpec::ideal(1, 1.0);
    const SimOptions opts{w, w, 0.0, 1.0, std::nullopt};
    std::vector<double> n;
    for (std::size_t i = 0; i < 10000; ++i) {
        const Trajectory tr = simulate(InitialCondition::empty(), spec, opts, stream_for(opts, spec, SeedSpec{4, i, "n"}));
        n.push_back(static_cast<double>(tr.state_at(1.0).born.size()));
    }
    const Estimate e = mean_estimate(n);
    CHECK(std::abs(e.value - 4.0 * (1.0 - std::exp(-1.0))) <= 3.0 * e.se);
}

TEST_CASE("coupled runs") {
    const Window obs = Window::interval(0.0, 1.0);
    const SimOptions small = SimOptions::buffered(obs, 1.0, 1.0);
    const SimOptions big = SimOptions::buffered(obs, 4.0, 1.0);
    const auto init = InitialCondition::exponential({Point(0.5), Point(-2.0)}, SeedSpec{6, 0, "life"});

    const auto ideal = InteractionSpec::ideal(1, 1.0);
    const auto ev = stream_for(big, ideal, SeedSpec{6, 0, "noise"});
    const auto [a, b] = simulate_coupled(init, ideal, big, big, ev);
    CHECK(restricted_paths_agree(a, b, big.sim_window));
    std::vector<std::pair<Trajectory, Trajectory>> pairs;
    for (std::size_t i = 0; i < 50; ++i) {
        pairs.push_back(simulate_coupled(init, ideal, small, big, stream_for(big, ideal, SeedSpec{6, i, "c"})));
        CHECK(restricted_paths_agree(pairs.back().first, pairs.back().second, obs));
    }
    const Estimate none = disagreement_probability(pairs, obs);
    CHECK(none.value == 0.0);
    CHECK(none.se == 0.0);

    auto [x, y] = pairs.front();
    y.add_birth({Point(0.25), 0.1, 0.2});
    std::vector<std::pair<Trajectory, Trajectory>> one = {{x, y}};
    CHECK(disagreement_probability(one, obs).value == 1.0);

    const auto spec = InteractionSpec::area(1, -1.0, 1.0, 1.0);
    CHECK_THROWS(simulate_coupled(init, spec, big, small, stream_for(small, spec, SeedSpec{})));
}

TEST_CASE("generator of the count with unit rates") {
    const Window lam = Window::interval(0.0, 2.0);
    const std::vector<Point> pts = {Point(0.2), Point(0.9), Point(1.5)};
    const Configuration eta(dilate(lam, 1.0), 1.0, pts);
    const Observable f{[lam](const Configuration& c) { return static_cast<double>(count(c, lam)); }, lam};
    CounterRng rng(SeedSpec{7, 0, "gen"});
    const Estimate e = apply_generator(f, eta, InteractionSpec::ideal(1, 1.0), 64, rng);
    CHECK(std::abs(e.value + 1.0) <= std::max(3.0 * e.se, 1e-12));

    const Observable constant{[](const Configuration&) { return 2.0; }, lam};
    CHECK(apply_generator(constant, eta, InteractionSpec::area(1, 1.0, 1.0, 1.0), 16, rng).value == 0.0);
    const Observable unsupported{[](const Configuration&) { return 1.0; }, std::nullopt};
    CHECK_THROWS(apply_generator(unsupported, eta, InteractionSpec::ideal(1, 1.0), 4, rng));
    CHECK_THROWS(generator_power_mc(f, eta, InteractionSpec::ideal(1, 1.0), 3, 4, rng));
}

TEST_CASE("generator against a fine deterministic quadrature (area, d = 1)") {
    const auto spec = InteractionSpec::area(1, 1.0, 1.0, 1.0);
    const Window lam = Window::interval(0.0, 1.0);
    const Window amb = dilate(lam, 3.0);
    const auto fval = [lam](const Configuration& c) {
        return std::min<double>(static_cast<double>(count(c, lam)), 3.0) / 3.0;
    };
    const Observable f{fval, lam};
    for (std::size_t k = 0; k < 20; ++k) {
        Configuration eta = sample_poisson(1.0, amb, SeedSpec{8, k, "eta"});
        // Birth integral on a 10^6-point midpoint grid over the support, death sum exact.
        const double f0 = fval(eta);
        const int n = 1000000;
        const double h = lam.volume() / n;
        double integral = 0.0;
        for (int i = 0; i < n; ++i) {
            const Point x(lam.lo()[0] + (i + 0.5) * h);
            integral += birth_rate(spec, x, eta) * h;
        }
        // f(eta + x) - f(eta) does not depend on x in the support.
        Configuration plus = eta;
        plus.insert(Point(0.5 + 1e-7));
        double oracle = integral * (fval(plus) - f0);
        for (const auto& p : std::vector<Point>(eta.points().begin(), eta.points().end())) {
            Configuration minus = eta;
            minus.erase(p);
            oracle += fval(minus) - f0;
        }
        CounterRng rng(SeedSpec{8, k, "mc"});
        const Estimate e = apply_generator(f, eta, spec, 4000, rng);
        CHECK(std::abs(e.value - oracle) <= 3.0 * e.se + 1e-6);
    }
}

TEST_CASE("semigroup expectation") {
    const Window lam = Window::interval(0.0, 2.0);
    const SimOptions opts = SimOptions::buffered(lam, 1.0, 1.0);
    const Observable f{[lam](const Configuration& c) { return static_cast<double>(count(c, lam)); }, lam};
    const InitialSampler empty = [](const SeedSpec&) { return InitialCondition::empty(); };
    const Estimate e = semigroup_expectation(f, empty, InteractionSpec::ideal(1, 1.0), opts, 1.0, 20000,
                                             SeedSpec{9, 0, "sg"}, 1);
    CHECK(std::abs(e.value - 2.0 * (1.0 - std::exp(-1.0))) <= 3.0 * e.se);

    const InitialSampler two = [](const SeedSpec& s) {
        return InitialCondition::exponential({Point(0.5), Point(1.5)}, s);
    };
    const Estimate at0 = semigroup_expectation(f, two, InteractionSpec::ideal(1, 1.0), opts, 0.0, 100,
                                               SeedSpec{9, 0, "sg0"}, 1);
    CHECK(at0.value == 2.0);

    const Observable bounded{[lam](const Configuration& c) { return count(c, lam) % 2 == 0 ? 1.0 : -1.0; }, lam};
    const Estimate b = semigroup_expectation(bounded, empty, InteractionSpec::area(1, 1.0, 1.0, 1.0), opts, 0.5, 500,
                                             SeedSpec{9, 0, "sgb"}, 1);
    CHECK(b.value >= -1.0);
    CHECK(b.value <= 1.0);
}
