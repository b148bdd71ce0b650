#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gibbsflow/noise.hpp"
#include "gibbsflow/stats.hpp"

using namespace gibbsflow;

TEST_CASE("Philox4x32-10 known answers") {
    using A4 = std::array<std::uint32_t, 4>;
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          A4{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          A4{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are determined by (root, replica, tag)") {
    const SeedSpec s{7, 3, "x"};
    CounterRng a(s), b(s), c(s.with_replica(4)), d(s.with_tag("y")), e(SeedSpec{8, 3, "x"});
    bool differs_c = false, differs_d = false, differs_e = false;
    for (int i = 0; i < 16; ++i) {
        const auto va = a();
        CHECK(va == b());
        differs_c |= va != c();
        differs_d |= va != d();
        differs_e |= va != e();
    }
    CHECK(differs_c);
    CHECK(differs_d);
    CHECK(differs_e);
}

TEST_CASE("uniform draws lie in the open unit interval") {
    CounterRng r(SeedSpec{1, 0, "u"});
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u > 0.0);
        REQUIRE(u < 1.0);
    }
}

TEST_CASE("proposal streams") {
    const Window w = Window::interval(0.0, 1.0);
    CHECK(propose_events(w, 0.0, 2.0, SeedSpec{}).events.empty());
    const auto a = propose_events(w, 10.0, 2.0, SeedSpec{5, 1, "p"});
    const auto b = propose_events(w, 10.0, 2.0, SeedSpec{5, 1, "p"});
    CHECK(a.events == b.events);
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const auto& e = a.events[i];
        CHECK(w.contains(e.x));
        CHECK(e.r > 0.0);
        CHECK(e.u >= 0.0);
        CHECK(e.u <= 2.0);
        CHECK(e.s <= 10.0);
        if (i > 0) CHECK(a.events[i - 1].s < e.s);
    }
    CHECK_THROWS(propose_events(w, 1.0, 0.0, SeedSpec{}));
}

TEST_CASE("event counts and lifespans have the stated laws") {
    const Window w = Window::interval(0.0, 1.0);
    const std::size_t n = 10000;
    std::vector<double> counts, lifespans;
    std::vector<double> first, second;
    for (std::size_t i = 0; i < n; ++i) {
        const auto ev = propose_events(w, 10.0, 2.0, SeedSpec{99, i, "laws"});
        counts.push_back(static_cast<double>(ev.events.size()));
        for (const auto& e : ev.events)
            if (lifespans.size() < 50000) lifespans.push_back(e.r);
    }
    const Estimate m = mean_estimate(counts);
    CHECK(std::abs(m.value - 20.0) <= 3.0 * m.se);
    const TestResult ks = ks_test_continuous(lifespans, [](double x) { return 1.0 - std::exp(-x); });
    CHECK(ks.p_value > 0.01);

    // Neighbouring replicas are uncorrelated.
    for (std::size_t i = 0; i + 1 < n; i += 2) {
        first.push_back(counts[i]);
        second.push_back(counts[i + 1]);
    }
    const double mx = mean_estimate(first).value, my = mean_estimate(second).value;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < first.size(); ++i) {
        sxy += (first[i] - mx) * (second[i] - my);
        sxx += (first[i] - mx) * (first[i] - mx);
        syy += (second[i] - my) * (second[i] - my);
    }
    CHECK(std::abs(sxy / std::sqrt(sxx * syy)) <= 3.0 / std::sqrt(static_cast<double>(first.size())));
}

TEST_CASE("shared restriction") {
    const Window big = Window::interval(0.0, 4.0);
    const auto ev = propose_events(big, 2.0, 1.5, SeedSpec{3, 0, "r"});
    CHECK(shared_restriction(ev, big).events == ev.events);
    const auto sub = shared_restriction(ev, Window::interval(1.0, 2.0));
    std::vector<ProposalEvent> brute;
    for (const auto& e : ev.events)
        if (e.x[0] >= 1.0 && e.x[0] < 2.0) brute.push_back(e);
    CHECK(sub.events == brute);
    CHECK_THROWS(shared_restriction(ev, Window::interval(3.0, 5.0)));

    std::vector<double> frac;
    for (std::size_t i = 0; i < 2000; ++i) {
        const auto all = propose_events(big, 2.0, 1.5, SeedSpec{3, i, "prop"});
        if (all.events.empty()) continue;
        frac.push_back(static_cast<double>(shared_restriction(all, Window::interval(0.0, 1.0)).events.size()) /
                       static_cast<double>(all.events.size()));
    }
    const Estimate f = mean_estimate(frac);
    CHECK(std::abs(f.value - 0.25) <= 3.0 * f.se);
}

TEST_CASE("event log CSV") {
    const auto ev = propose_events(Window::interval(0.0, 1.0), 1.0, 1.0, SeedSpec{4, 0, "log"});
    std::stringstream ss;
    write_event_log_csv(ss, ev);
    std::string header;
    std::getline(ss, header);
    CHECK(header == "s,x0,r,u");
    std::size_t rows = 0;
    for (std::string line; std::getline(ss, line);) ++rows;
    CHECK(rows == ev.events.size());
}
