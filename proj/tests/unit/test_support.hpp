#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "gibbsflow/geometry.hpp"

// Test-side helpers; the std:: generator keeps test randomness independent of
// the library's own streams.
namespace testing_support {

using gibbsflow::Point;

inline std::vector<Point> uniform_points(std::mt19937_64& gen, int n, int dim, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<Point> pts;
    for (int i = 0; i < n; ++i) pts.push_back(dim == 1 ? Point(u(gen)) : Point(u(gen), u(gen)));
    return pts;
}

inline std::vector<Point> sorted(std::vector<Point> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace testing_support
