#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gibbsflow/geometry.hpp"
#include "gibbsflow/noise.hpp"
#include "gibbsflow/stats.hpp"

namespace gibbsflow {

struct EstimatorReport {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::string method;
};

/// Cube of side ell centred at x.
Window box_around(const Point& x, double ell, int dim);

/// |Q|^{-n} E[prod_i N_{Q(x_i)}] over the samples, Q(x) the ell-box at x.
/// Throws when boxes overlap or leave the sample window.
EstimatorReport correlation_estimate(std::span<const Configuration> samples, std::span<const Point> centres,
                                     double ell);

struct JanossyReport {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    /// Signed contribution of each order k = 0..K of the inversion sum.
    std::vector<double> terms;
    /// |last included term|.
    double truncation_bound = 0.0;
    /// Set when |terms| is not decreasing.
    bool nondecreasing_flag = false;
};

/// Janossy density at x_1..x_n from a correlation function by the truncated
/// inversion sum, with the k-fold integrals over window^k by a midpoint grid
/// of `grid` nodes per axis.
JanossyReport janossy_from_correlations(const std::function<double(std::span<const Point>)>& rho,
                                        std::span<const Point> xs, const Window& window, int K, int grid = 16);

/// Janossy density at x_1..x_n estimated from samples: the order-(n+k)
/// correlation integrals come from E[prod N_{Q(x_i)} (N_window - n)^{(k)}] / |Q|^n.
JanossyReport janossy_estimate(std::span<const Configuration> samples, std::span<const Point> xs,
                               const Window& window, double ell, int K);

/// sum_{n <= n_max} (1/n!) int j_n, each integral truncated at order K.
JanossyReport janossy_normalisation(std::span<const Configuration> samples, const Window& window, int K,
                                    int n_max = 8);

/// Density of the sample law against the unit Poisson process at zeta:
/// e^{|window|} j_n(zeta) for |zeta| = n >= 1, and
/// e^{|window|} (1 - sum_{1 <= n <= n_max} (1/n!) int j_n) at the empty pattern.
JanossyReport psi_density(std::span<const Point> zeta, std::span<const Configuration> samples,
                          const Window& window, double ell, int K, int n_max = 8);

struct KlReport {
    double value = 0.0;
    double std_error = 0.0;
    double plug_in = 0.0;
    std::size_t n_mu = 0;
    std::size_t n_nu = 0;
    /// Fraction of samples with some cell above the cap.
    double overflow_mu = 0.0;
    double overflow_nu = 0.0;
    /// Symbols seen under mu but never under nu.
    std::size_t unmatched = 0;
    bool infinite = false;
};

/// Occupancy vector over m congruent cells of `window` (m a perfect square in
/// d = 2), counts above `cap` collapsed into one overflow symbol.
std::vector<int> occupancy(const Configuration& cfg, const Window& window, int m, int cap);

/// Discrete KL between the capped occupancy laws of two sample sets, bias
/// corrected (Miller-Madow for the entropy part, first order for the cross
/// term) and clamped at 0; delta-method standard error.
KlReport rel_entropy_discretized(std::span<const Configuration> mu, std::span<const Configuration> nu,
                                 const Window& window, int m, int cap = 8);

/// Constants of the moment bound; rule `evolved` inflates c3 to e^t c3.
struct MomentConstants {
    double c1 = 1.0;
    double c2 = 1.0;
    double c3 = 1.0;
};

struct MomentRow {
    int k;
    double empirical;   // E[N^k]^{1/k}
    double std_error;
    double bound;
    bool exceeded;      // empirical - 3 se > bound
};

double moment_bound(int k, double volume, const MomentConstants& c);

std::vector<MomentRow> moment_check(std::span<const Configuration> samples, const Window& delta, int k_max,
                                    MomentConstants c, double t = 0.0);

/// h evaluated on the configuration seen from a point with that point
/// removed; only the points within `radius` are passed, as offsets.
struct RootedObservable {
    double radius = 0.0;
    std::function<double(std::span<const Point>)> fn;
};

/// (1/|w_n|) sum_{x in eta, x in w_n} h(theta_x(eta - x)) for each window.
std::vector<double> ergodic_average(const Configuration& eta, const RootedObservable& h,
                                    std::span<const Window> windows);

struct VariableChangeResult {
    /// Joint law of (surviving marked points, dead marked points, fresh points).
    TestResult joint;
    /// Union size against Poisson((1 + e^{-t}) |window|), each construction.
    TestResult union_left;
    TestResult union_right;
    /// Marks of the assembled right-hand initial points against Exp(1).
    TestResult marks_right;
    std::size_t n = 0;
};

VariableChangeResult variable_change_test(double volume, double t, std::size_t n_reps, const SeedSpec& seed,
                                          int cap = 8);

}  // namespace gibbsflow
