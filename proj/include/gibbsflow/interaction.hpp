#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gibbsflow/geometry.hpp"

namespace gibbsflow {

/// Radial pair potential, piecewise linear in r, zero beyond the last knot.
class PairPotential {
public:
    PairPotential() = default;
    PairPotential(std::vector<double> r, std::vector<double> phi);

    /// phi(r) = value on [0, range], 0 beyond.
    static PairPotential step(double value, double range);
    /// Table with `r,phi` header and rows.
    static PairPotential from_csv(std::istream& is);

    double operator()(double r) const;
    double max_abs() const;
    double min_value() const;
    double support() const { return r_.empty() ? 0.0 : r_.back(); }
    std::span<const double> knots() const { return r_; }
    std::span<const double> values() const { return phi_; }

private:
    std::vector<double> r_;
    std::vector<double> phi_;
};

enum class InteractionKind { ideal, area, pair };

std::string to_string(InteractionKind k);
InteractionKind interaction_kind_from_string(const std::string& s);

/// Interaction family together with range, inverse temperature and dimension.
/// Birth rates are b(x, eta) = exp(-beta * h(x, eta)), except for the ideal
/// gas which encodes b == z directly.
struct InteractionSpec {
    InteractionKind kind = InteractionKind::ideal;
    int dim = 1;
    double range = 1.0;
    double beta = 1.0;
    double z = 1.0;       // ideal
    double alpha = 0.0;   // area
    PairPotential phi;    // pair
    /// Declared packing bound on |eta within B_R(x)|; needed for pair rate bounds.
    std::optional<int> max_neighbors;
    /// Requested accuracy of the d = 2 area evaluation.
    double area_tol = 1e-6;

    static InteractionSpec ideal(int dim, double z, double range = 1.0);
    static InteractionSpec area(int dim, double alpha, double beta, double range);
    static InteractionSpec pair(int dim, PairPotential phi, double beta, double range,
                                std::optional<int> max_neighbors);

    /// Throws std::invalid_argument on any broken invariant.
    void validate() const;
    std::string describe() const;
};

/// Smallest tolerance the d = 2 area evaluation can honour (floating-point floor
/// of the arc computation).
inline constexpr double kAreaAchievableTol = 1e-12;

struct RateBounds {
    double inf;
    double sup;
};

/// Volume of the unit ball in R^d, d in {1, 2}.
double unit_ball_volume(int dim);

/// |B_r(x) \ union_y B_r(y)| in d = 1 (interval lengths) or d = 2 (disc areas).
double uncovered_volume(int dim, const Point& x, std::span<const Point> others, double r);

/// |union_i B_r(c_i)| for discs of a common radius; exact up to rounding.
double disc_union_area(std::span<const Point> centres, double r);

/// h(x, eta) from the points of eta within distance R of x (others are ignored).
double conditional_energy(const InteractionSpec& spec, const Point& x,
                          std::span<const Point> neighbours);
double conditional_energy(const InteractionSpec& spec, const Point& x, const Configuration& eta);

double birth_rate(const InteractionSpec& spec, const Point& x, std::span<const Point> neighbours);
double birth_rate(const InteractionSpec& spec, const Point& x, const Configuration& eta);

/// Energy of inserting `points` one at a time, in the given order, on top of
/// `background`. Sum of the successive conditional energies.
double insertion_energy(const InteractionSpec& spec, std::span<const Point> points,
                        std::span<const Point> background);

/// H_w(eta_w . boundary) relative to the boundary alone.
double energy_in_window(const InteractionSpec& spec, const Configuration& eta, const Window& w,
                        const Configuration& boundary);

/// Envelope b_inf <= b(x, eta) <= b_sup.
RateBounds rate_bounds(const InteractionSpec& spec);

/// sup_eta b(x, eta) at beta = 1, the rate norm entering the high-temperature
/// decay constant.
double unit_temperature_rate_sup(const InteractionSpec& spec);

}  // namespace gibbsflow
