#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gibbsflow/geometry.hpp"
#include "gibbsflow/interaction.hpp"

namespace gibbsflow {

/// Largest cell count of the finite-state surrogate.
inline constexpr int kLatticeMaxCells = 14;
/// Largest cell count for which dense matrices are formed.
inline constexpr int kLatticeMaxDense = 10;

/// m binary cells with centres in R^d. Occupancy patterns are bit masks; a
/// vacant cell i fills at rate cell_volume * b(centre_i, occupied centres) and
/// an occupied cell empties at rate 1.
class LatticeModel {
public:
    LatticeModel(InteractionSpec spec, std::vector<Point> centres, double cell_volume);

    /// m cells of width `cell_width` tiling [origin, origin + m * cell_width).
    static LatticeModel line(const InteractionSpec& spec, int m, double cell_width, double origin = 0.0);

    int cells() const { return m_; }
    std::size_t states() const { return std::size_t{1} << m_; }
    double cell_volume() const { return v_; }
    const InteractionSpec& spec() const { return spec_; }
    std::span<const Point> centres() const { return centres_; }

    /// v * b(centre_i, eta) for vacant i.
    double birth(std::uint32_t eta, int i) const { return birth_[eta * m_ + i]; }
    /// h(centre_i, eta) with eta read as the occupied centres.
    double energy_at(int i, std::uint32_t eta) const;
    /// Energy of the pattern by insertion telescoping, relative to the empty pattern.
    double energy(std::uint32_t eta) const;
    /// log of the unnormalised Gibbs weight of eta (telescoped birth rates).
    double log_weight(std::uint32_t eta) const { return logw_[eta]; }

private:
    InteractionSpec spec_;
    int m_;
    double v_;
    std::vector<Point> centres_;
    std::vector<double> birth_;
    std::vector<double> logw_;
};

using StateDist = std::vector<double>;

/// Single-cell flip rates: rate(eta, i) is the birth rate when i is vacant,
/// 1 when occupied. The matrix itself is never stored beyond kLatticeMaxDense.
class GeneratorMatrix {
public:
    explicit GeneratorMatrix(const LatticeModel& model);

    int cells() const { return m_; }
    std::size_t states() const { return std::size_t{1} << m_; }
    double rate(std::uint32_t eta, int i) const { return rate_[eta * m_ + i]; }
    double exit_rate(std::uint32_t eta) const { return exit_[eta]; }
    /// Largest total exit rate (uniformization constant).
    double max_exit_rate() const { return lambda_; }

    /// x Q for a row vector x.
    std::vector<double> left(std::span<const double> x) const;
    /// Q f for a column vector f.
    std::vector<double> right(std::span<const double> f) const;

    Eigen::MatrixXd dense() const;

private:
    int m_;
    std::vector<double> rate_;
    std::vector<double> exit_;
    double lambda_ = 0.0;
};

GeneratorMatrix build_generator(const LatticeModel& model);

/// Normalised Gibbs weights.
StateDist stationary(const LatticeModel& model);

/// max |nu(eta) Q[eta, eta'] - nu(eta') Q[eta', eta]| over flip pairs.
double detailed_balance_residual(const StateDist& nu, const GeneratorMatrix& Q);

/// x e^{tQ} by uniformization; x may be any signed row vector.
std::vector<double> evolve(std::span<const double> x, const GeneratorMatrix& Q, double t);
/// e^{tQ} f.
std::vector<double> evolve_right(std::span<const double> f, const GeneratorMatrix& Q, double t);
/// x e^{t_k Q} for increasing t_k >= 0, evolved step by step.
std::vector<std::vector<double>> evolve_grid(std::span<const double> x, const GeneratorMatrix& Q,
                                             std::span<const double> times);

/// sum mu log(mu / nu) with 0 log 0 = 0; nu strictly positive.
double rel_entropy(std::span<const double> mu, std::span<const double> nu);
/// Same quantity from d = mu - nu, accurate when mu is close to nu.
double rel_entropy_from_difference(std::span<const double> d, std::span<const double> nu);

/// Modified Fisher information; +infinity when mu has a zero entry.
double fisher(std::span<const double> mu, std::span<const double> nu, const GeneratorMatrix& Q);
double fisher_from_difference(std::span<const double> d, std::span<const double> nu, const GeneratorMatrix& Q);

/// mu[(-Q) log(mu / nu)].
double entropy_production(std::span<const double> mu, std::span<const double> nu, const GeneratorMatrix& Q);

/// Strictly positive version of mu: (1 - 1e-9) mu + 1e-9 nu when mu has zeros.
struct Regularised {
    StateDist mu;
    bool mixed = false;
};
Regularised regularise(std::span<const double> mu, std::span<const double> nu);

struct DeBruijnCurve {
    std::vector<double> t;
    std::vector<double> entropy;
    std::vector<double> fisher;
    /// I(mu_0) - I(mu_t) - int_0^t J, at the even grid nodes (NaN elsewhere).
    std::vector<double> residual;
    double max_residual = 0.0;
    bool regularised = false;
};

/// Entropy loss against integrated Fisher information on n_grid nodes of
/// [0, T] (n_grid odd), composite Simpson on nodes t = T s^grading over a
/// uniform s-grid (dense near 0); grading = 1 gives the uniform grid.
DeBruijnCurve de_bruijn_check(std::span<const double> mu0, const LatticeModel& model,
                              const GeneratorMatrix& Q, double T, int n_grid, double grading = 3.0);

struct SeriesCheck {
    std::vector<double> partial;      // partial sums for K = 0..K
    double truth = 0.0;               // mu[e^{tQ} f]
    std::vector<double> term_bounds;  // ||f|| (2 lambda t)^k / k!
    double remainder_bound = 0.0;     // tail of term_bounds beyond K
};

SeriesCheck series_expansion_check(std::span<const double> mu, std::span<const double> f,
                                   const GeneratorMatrix& Q, double t, int K);

struct KappaBound {
    double epsilon;
    double kappa;
    double rate_norm;       // sup b at unit temperature
    double sup_sum;         // the sup over patterns of the site sum
};

/// Decay constant of the high-temperature estimate at inverse temperature
/// `beta`, the sup taken over all cells x and all patterns.
KappaBound kappa_bound(const LatticeModel& model, double beta);
KappaBound kappa_bound(const LatticeModel& model);

/// Second-smallest eigenvalue of -Q symmetrised in l2(nu). m <= kLatticeMaxDense.
double spectral_gap(const GeneratorMatrix& Q, std::span<const double> nu);

/// nu[(T_t f) g] - nu[f (T_t g)].
double reversibility_residual(std::span<const double> nu, const GeneratorMatrix& Q, std::span<const double> f,
                              std::span<const double> g, double t);

/// Fixed battery of 10 observable pairs on m cells.
std::vector<std::pair<std::vector<double>, std::vector<double>>> probe_battery(int m);

struct FiniteTimeCheck {
    std::vector<double> t;
    std::vector<double> tv;
    double min_tv = 0.0;
    bool nonincreasing = true;
};

/// Total-variation distance to nu along a uniform grid of (0, T].
FiniteTimeCheck finite_time_gibbs_check(std::span<const double> mu0, std::span<const double> nu,
                                        const GeneratorMatrix& Q, double T, int n_grid);

struct BoundaryFisher {
    double free_bc;
    double averaged_bc;
    double difference() const { return averaged_bc - free_bc; }
};

/// Fisher information of a product-Bernoulli(p) law on `interior` cells of
/// width a, against the free-boundary model on those cells and against the
/// interior marginal of a model with `collar` extra cells on each side, whose
/// rates are averaged over the collar conditionally on the interior.
BoundaryFisher fisher_bc_variants(const InteractionSpec& spec, int interior, int collar, double cell_width,
                                  double p);

}  // namespace gibbsflow
