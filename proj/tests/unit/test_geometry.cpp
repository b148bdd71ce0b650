#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "gibbsflow/geometry.hpp"
#include "test_support.hpp"

using namespace gibbsflow;
using testing_support::sorted;
using testing_support::uniform_points;

TEST_CASE("restrict and count on small cases") {
    const Window unit = Window::interval(0.0, 1.0);
    const Configuration empty(Window::interval(-5.0, 5.0), 1.0);
    CHECK(restrict(empty, unit).size() == 0);
    CHECK(count(empty, unit) == 0);

    const std::vector<Point> pts = {Point(0.3), Point(1.7)};
    const Configuration c(Window::interval(0.0, 2.0), 1.0, pts);
    const Configuration r = restrict(c, unit);
    REQUIRE(r.size() == 1);
    CHECK(r.points()[0] == Point(0.3));
    CHECK(c.size() == 2);

    const std::vector<Point> half = {Point(0.5)};
    CHECK(count(Configuration(unit, 1.0, half), unit) == 1);
}

TEST_CASE("count and restrict agree with a brute-force scan") {
    std::mt19937_64 gen(11);
    const Window big = Window::cube(2, 0.0, 10.0);
    const auto pts = uniform_points(gen, 10000, 2, 0.0, 10.0);
    const Configuration c(big, 1.0, pts);
    const Window sub = Window::cube(2, 0.0, 1.0);
    std::size_t brute = 0;
    for (const auto& p : pts) brute += sub.contains(p) ? 1 : 0;
    CHECK(restrict(c, sub).size() == brute);

    const auto few = uniform_points(gen, 500, 2, 0.0, 10.0);
    const Configuration d(big, 1.0, few);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        double a = u(gen), b = u(gen), e = u(gen), f = u(gen);
        if (a > b) std::swap(a, b);
        if (e > f) std::swap(e, f);
        if (b - a < 1e-9 || f - e < 1e-9) continue;
        const Window w = Window::rectangle(a, b, e, f);
        std::size_t n = 0;
        for (const auto& p : few) n += w.contains(p) ? 1 : 0;
        CHECK(count(d, w) == n);
        CHECK(restrict(d, w).size() == count(d, w));
    }
}

TEST_CASE("neighbors_within") {
    const Configuration empty(Window::interval(-1.0, 3.0), 0.5);
    CHECK(empty.neighbors_within(Point(0.1), 0.5).empty());

    const std::vector<Point> pts = {Point(0.0), Point(0.4), Point(2.0)};
    const Configuration c(Window::interval(-1.0, 3.0), 0.5, pts);
    CHECK(sorted(c.neighbors_within(Point(0.1), 0.5)) == std::vector<Point>{Point(0.0), Point(0.4)});

    std::mt19937_64 gen(12);
    const auto many = uniform_points(gen, 10000, 2, 0.0, 50.0);
    const Configuration big(Window::cube(2, 0.0, 50.0), 1.0, many);
    for (const auto& q : uniform_points(gen, 100, 2, 0.0, 50.0)) {
        std::vector<Point> brute;
        for (const auto& p : many)
            if (distance(p, q) <= 1.0) brute.push_back(p);
        CHECK(sorted(big.neighbors_within(q, 1.0)) == sorted(brute));
    }
}

TEST_CASE("dilate") {
    CHECK(dilate(Window::interval(0.0, 1.0), 0.0) == Window::interval(0.0, 1.0));
    CHECK(dilate(Window::interval(0.0, 1.0), 0.5) == Window::interval(-0.5, 1.5));
    CHECK(dilate(Window::cube(2, 0.0, 1.0), 1.0).volume() == doctest::Approx(9.0));
    CHECK_THROWS(dilate(Window::interval(0.0, 1.0), -0.1));
}

TEST_CASE("window invariants") {
    CHECK_THROWS(Window::interval(1.0, 1.0));
    CHECK_THROWS(Window::interval(2.0, 1.0));
    CHECK(Window::centred(2, 4.0).volume() == doctest::Approx(16.0));
    CHECK(Window::interval(0.0, 1.0).contains(Point(0.0)));
    CHECK_FALSE(Window::interval(0.0, 1.0).contains(Point(1.0)));
}

TEST_CASE("configurations stay simple and inside the ambient window") {
    Configuration c(Window::interval(0.0, 1.0), 0.25);
    CHECK(c.insert(Point(0.5)));
    CHECK_FALSE(c.insert(Point(0.5)));
    CHECK(c.size() == 1);
    CHECK_THROWS_AS(c.insert(Point(1.0)), std::invalid_argument);
    CHECK_THROWS_AS(c.insert(Point(std::nan(""))), std::invalid_argument);
    CHECK(c.erase(Point(0.5)));
    CHECK_FALSE(c.erase(Point(0.5)));
}

TEST_CASE("index stays consistent under random inserts and removals") {
    std::mt19937_64 gen(13);
    const Window w = Window::cube(2, 0.0, 20.0);
    Configuration c(w, 1.0);
    std::vector<Point> live;
    std::uniform_real_distribution<double> u(0.0, 20.0);
    std::bernoulli_distribution coin(0.6);
    for (int step = 0; step < 5000; ++step) {
        if (live.empty() || coin(gen)) {
            const Point p(u(gen), u(gen));
            if (c.insert(p)) live.push_back(p);
        } else {
            const std::size_t k = gen() % live.size();
            CHECK(c.erase(live[k]));
            live.erase(live.begin() + static_cast<long>(k));
        }
    }
    Configuration rebuilt(w, 1.0, live);
    Configuration reindexed = c;
    reindexed.rebuild_index();
    for (const auto& q : uniform_points(gen, 200, 2, 0.0, 20.0)) {
        const auto a = sorted(c.neighbors_within(q, 1.0));
        CHECK(a == sorted(rebuilt.neighbors_within(q, 1.0)));
        CHECK(a == sorted(reindexed.neighbors_within(q, 1.0)));
    }
    CHECK(c.same_points(rebuilt));
}

TEST_CASE("configuration CSV round trip") {
    const std::vector<Point> pts = {Point(0.25, 0.5), Point(1.0 / 3.0, 0.75)};
    const Configuration c(Window::cube(2, 0.0, 1.0), 0.5, pts);
    std::stringstream ss;
    write_configuration_csv(ss, c);
    CHECK(ss.str().rfind("dim=2\n", 0) == 0);
    const auto [dim, back] = read_configuration_csv(ss);
    CHECK(dim == 2);
    CHECK(sorted(back) == sorted(pts));
    std::stringstream bad("dim=3\n1,2,3\n");
    CHECK_THROWS(read_configuration_csv(bad));
}

TEST_CASE("marked configurations reject nonpositive lifespans") {
    MarkedConfiguration m;
    m.add(Point(0.1), 0.5);
    CHECK(m.size() == 1);
    CHECK_THROWS(m.add(Point(0.2), 0.0));
    CHECK_THROWS(m.add(Point(0.2), std::numeric_limits<double>::infinity()));
}
