#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "gibbsflow/interaction.hpp"
#include "test_support.hpp"

using namespace gibbsflow;
using testing_support::uniform_points;

namespace {

// Uncovered length of [x - r, x + r] by a fine midpoint grid.
double uncovered_length_grid(double x, const std::vector<Point>& others, double r, int n) {
    const double h = 2.0 * r / n;
    double free = 0.0;
    for (int i = 0; i < n; ++i) {
        const double s = x - r + (i + 0.5) * h;
        bool covered = false;
        for (const auto& y : others) covered |= std::abs(s - y[0]) <= r;
        free += covered ? 0.0 : h;
    }
    return free;
}

// Uncovered area of the disc B_r(x) by a midpoint grid.
double uncovered_area_grid(const Point& x, const std::vector<Point>& others, double r, int n) {
    const double h = 2.0 * r / n;
    double free = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Point s(x[0] - r + (i + 0.5) * h, x[1] - r + (j + 0.5) * h);
            if (distance(s, x) > r) continue;
            bool covered = false;
            for (const auto& y : others) covered |= distance(s, y) <= r;
            free += covered ? 0.0 : h * h;
        }
    }
    return free;
}

}  // namespace

TEST_CASE("area conditional energy, small cases") {
    const auto spec1 = InteractionSpec::area(1, 1.0, 1.0, 1.0);
    const std::vector<Point> none;
    CHECK(conditional_energy(spec1, Point(0.0), none) == doctest::Approx(1.0).epsilon(1e-14));
    const std::vector<Point> one = {Point(0.4)};
    CHECK(conditional_energy(spec1, Point(0.0), one) == doctest::Approx(0.4).epsilon(1e-14));
    const auto spec2 = InteractionSpec::area(2, 1.0, 1.0, 1.0);
    CHECK(std::abs(conditional_energy(spec2, Point(0.0, 0.0), none) - std::acos(-1.0) * 0.25) <= 1e-6);
}

TEST_CASE("pair conditional energy counts neighbours for a unit step") {
    const auto spec = InteractionSpec::pair(1, PairPotential::step(1.0, 1.0), 1.0, 1.0, 10);
    const std::vector<Point> pts = {Point(0.2), Point(0.9), Point(1.5), Point(-0.7)};
    CHECK(conditional_energy(spec, Point(0.0), pts) == doctest::Approx(3.0));
}

TEST_CASE("birth rates") {
    const std::vector<Point> none;
    const std::vector<Point> some = {Point(0.3), Point(-0.2)};
    CHECK(birth_rate(InteractionSpec::ideal(1, 1.0), Point(0.0), some) == 1.0);
    CHECK(birth_rate(InteractionSpec::ideal(1, 2.5), Point(0.0), some) == 2.5);
    CHECK(birth_rate(InteractionSpec::area(1, 1.0, 1.0, 1.0), Point(0.0), none) ==
          doctest::Approx(0.36787944117144233).epsilon(1e-14));
    CHECK(birth_rate(InteractionSpec::area(1, 0.0, 1.0, 1.0), Point(0.0), some) == 1.0);
}

TEST_CASE("rate bounds") {
    const auto ideal = rate_bounds(InteractionSpec::ideal(1, 3.0));
    CHECK(ideal.inf == 3.0);
    CHECK(ideal.sup == 3.0);
    const auto att = rate_bounds(InteractionSpec::area(1, 1.0, 1.0, 1.0));
    CHECK(att.inf == doctest::Approx(std::exp(-1.0)));
    CHECK(att.sup == doctest::Approx(1.0));
    const auto rep = rate_bounds(InteractionSpec::area(1, -1.0, 1.0, 1.0));
    CHECK(rep.inf == doctest::Approx(1.0));
    CHECK(rep.sup == doctest::Approx(std::exp(1.0)));
    const auto pair = rate_bounds(InteractionSpec::pair(1, PairPotential::step(0.5, 1.0), 2.0, 1.0, 4));
    CHECK(pair.sup == doctest::Approx(1.0));
    CHECK(pair.inf == doctest::Approx(std::exp(-2.0 * 0.5 * 4)));
}

TEST_CASE("signed pair potentials need a declared packing bound") {
    PairPotential signed_phi({0.0, 1.0}, {-0.5, -0.5});
    CHECK_THROWS(InteractionSpec::pair(1, signed_phi, 1.0, 1.0, std::nullopt).validate());
    CHECK_NOTHROW(InteractionSpec::pair(1, signed_phi, 1.0, 1.0, 6).validate());
    CHECK_THROWS(InteractionSpec::area(1, 1.0, -1.0, 1.0).validate());
    CHECK_THROWS(InteractionSpec::area(1, 1.0, 1.0, 0.0).validate());
}

TEST_CASE("pair potential table") {
    std::stringstream ss("r,phi\n0,2\n0.5,1\n1,0\n");
    const PairPotential phi = PairPotential::from_csv(ss);
    CHECK(phi(0.25) == doctest::Approx(1.5));
    CHECK(phi(0.75) == doctest::Approx(0.5));
    CHECK(phi(1.5) == 0.0);
}

TEST_CASE("interval-union energy matches a grid oracle in d = 1") {
    std::mt19937_64 gen(21);
    for (int k = 0; k < 50; ++k) {
        const auto others = uniform_points(gen, static_cast<int>(gen() % 6), 1, -1.0, 1.0);
        const double exact = uncovered_volume(1, Point(0.0), others, 0.5);
        CHECK(std::abs(exact - uncovered_length_grid(0.0, others, 0.5, 200000)) <= 1e-5);
    }
}

TEST_CASE("disc-union energy matches a grid oracle in d = 2") {
    std::mt19937_64 gen(22);
    for (int k = 0; k < 10; ++k) {
        const auto others = uniform_points(gen, 1 + static_cast<int>(gen() % 4), 2, -1.0, 1.0);
        const double exact = uncovered_volume(2, Point(0.0, 0.0), others, 0.5);
        CHECK(std::abs(exact - uncovered_area_grid(Point(0.0, 0.0), others, 0.5, 1200)) <= 2e-4);
    }
    const std::vector<Point> two = {Point(0.0, 0.0), Point(0.5, 0.0)};
    // Two unit-half-radius discs at distance 0.5: lens area 2 r^2 acos(d / 2r) - (d / 2) sqrt(4 r^2 - d^2).
    const double r = 0.5, d = 0.5;
    const double lens = 2 * r * r * std::acos(d / (2 * r)) - d / 2 * std::sqrt(4 * r * r - d * d);
    CHECK(disc_union_area(two, r) == doctest::Approx(2 * std::acos(-1.0) * r * r - lens).epsilon(1e-12));
}

TEST_CASE("d = 2 area rejects an unattainable tolerance") {
    auto spec = InteractionSpec::area(2, 1.0, 1.0, 1.0);
    spec.area_tol = kAreaAchievableTol / 10.0;
    const std::vector<Point> none;
    CHECK_THROWS(conditional_energy(spec, Point(0.0, 0.0), none));
}

TEST_CASE("locality: only points within R matter") {
    std::mt19937_64 gen(23);
    const std::vector<InteractionSpec> specs = {InteractionSpec::area(1, 1.0, 1.0, 1.0),
                                                InteractionSpec::area(2, -0.5, 1.0, 1.0),
                                                InteractionSpec::pair(2, PairPotential::step(0.3, 1.0), 1.0, 1.0, 30)};
    for (const auto& spec : specs) {
        for (int k = 0; k < 1000 / static_cast<int>(specs.size()); ++k) {
            const auto pts = uniform_points(gen, 12, spec.dim, -3.0, 3.0);
            const Point x = spec.dim == 1 ? Point(0.0) : Point(0.0, 0.0);
            std::vector<Point> near;
            for (const auto& p : pts)
                if (distance(p, x) <= spec.range) near.push_back(p);
            CHECK(conditional_energy(spec, x, pts) == conditional_energy(spec, x, near));
        }
    }
}

TEST_CASE("attractive area energy is monotone in the configuration (d = 1)") {
    std::mt19937_64 gen(24);
    const auto spec = InteractionSpec::area(1, 1.0, 1.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        auto pts = uniform_points(gen, 4, 1, -1.0, 1.0);
        const double before = conditional_energy(spec, Point(0.0), pts);
        pts.push_back(uniform_points(gen, 1, 1, -1.0, 1.0).front());
        CHECK(conditional_energy(spec, Point(0.0), pts) <= before + 1e-15);
    }
}

TEST_CASE("birth rates stay inside the envelope") {
    std::mt19937_64 gen(25);
    const std::vector<InteractionSpec> specs = {InteractionSpec::area(1, 1.0, 0.7, 1.0),
                                                InteractionSpec::area(1, -2.0, 0.5, 1.0),
                                                InteractionSpec::area(2, 1.5, 1.0, 1.0),
                                                InteractionSpec::pair(1, PairPotential::step(0.5, 1.0), 1.0, 1.0, 20)};
    int n = 0;
    for (const auto& spec : specs) {
        const RateBounds rb = rate_bounds(spec);
        for (int k = 0; k < 2500; ++k, ++n) {
            const auto pts = uniform_points(gen, static_cast<int>(gen() % 10), spec.dim, -1.0, 1.0);
            const double b = birth_rate(spec, spec.dim == 1 ? Point(0.0) : Point(0.0, 0.0), pts);
            CHECK(b >= rb.inf * (1 - 1e-12));
            CHECK(b <= rb.sup * (1 + 1e-12));
        }
    }
    CHECK(n == 10000);
}

TEST_CASE("energy in a window") {
    const auto spec = InteractionSpec::area(1, 1.0, 1.0, 1.0);
    const Window w = Window::interval(0.0, 4.0);
    const Configuration empty(dilate(w, 1.0), 1.0);
    CHECK(energy_in_window(spec, empty, w, empty) == 0.0);
    const std::vector<Point> one = {Point(2.0)};
    CHECK(energy_in_window(spec, Configuration(dilate(w, 1.0), 1.0, one), w, empty) == doctest::Approx(1.0));
}

TEST_CASE("insertion order does not change the energy") {
    std::mt19937_64 gen(26);
    for (int dim : {1, 2}) {
        const auto spec = InteractionSpec::area(dim, 1.0, 1.0, 1.0);
        for (int k = 0; k < 20; ++k) {
            auto pts = uniform_points(gen, 5, dim, 0.0, 1.5);
            const std::vector<Point> bg;
            const double a = insertion_energy(spec, pts, bg);
            std::shuffle(pts.begin(), pts.end(), gen);
            const double b = insertion_energy(spec, pts, bg);
            CHECK(std::abs(a - b) <= (dim == 1 ? 1e-10 : 1e-5));
        }
    }
}
