#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gibbsflow/geometry.hpp"
#include "gibbsflow/interaction.hpp"
#include "gibbsflow/noise.hpp"
#include "gibbsflow/stats.hpp"

namespace gibbsflow {

/// Simulation box, observation window and boundary handling.
struct SimOptions {
    Window sim_window;
    Window observe_window;
    double buffer_width = 0.0;
    double horizon = 1.0;
    /// Frozen boundary points outside sim_window; nullopt is the empty boundary.
    std::optional<Configuration> frozen_boundary;

    /// sim_window = dilate(observe, buffer), empty boundary.
    static SimOptions buffered(const Window& observe, double buffer, double horizon);
    void validate() const;
};

enum class LifespanMode { exponential, fixed };

/// Initial configuration plus how its lifespans are chosen.
struct InitialCondition {
    std::vector<Point> base;
    LifespanMode mode = LifespanMode::exponential;
    std::vector<double> lifespans;  // fixed mode
    SeedSpec seed;                  // exponential mode

    static InitialCondition empty();
    static InitialCondition fixed(const MarkedConfiguration& marked);
    static InitialCondition exponential(std::vector<Point> points, const SeedSpec& seed);

    /// Lifespans made explicit (drawn from `seed` in exponential mode).
    MarkedConfiguration realise() const;
};

struct BirthRecord {
    Point x;
    double birth;
    double death;

    friend bool operator==(const BirthRecord&, const BirthRecord&) = default;
};

/// (X_t, omega_t, Y_t): full state, surviving initial points, points born after 0.
struct StateSnapshot {
    Configuration full;
    Configuration survivors;
    Configuration born;
};

class Trajectory {
public:
    Trajectory(Window window, double horizon, double index_range, MarkedConfiguration initial);

    const Window& window() const { return window_; }
    double horizon() const { return horizon_; }
    double index_range() const { return range_; }
    const MarkedConfiguration& initial() const { return initial_; }
    std::span<const BirthRecord> births() const { return births_; }
    std::size_t proposals() const { return proposals_; }

    void add_birth(const BirthRecord& rec) { births_.push_back(rec); }
    void set_proposals(std::size_t n) { proposals_ = n; }

    /// Throws std::out_of_range unless 0 <= t <= horizon.
    StateSnapshot state_at(double t) const;
    Configuration full_at(double t) const;

    /// CSV rows `kind,x0[,x1],time` with kind in {init, birth, death}.
    void write_csv(std::ostream& os) const;

private:
    Window window_;
    double horizon_;
    double range_;
    MarkedConfiguration initial_;
    std::vector<BirthRecord> births_;
    std::size_t proposals_ = 0;
};

/// Path-wise solution of the birth-and-death equation driven by `stream`: a
/// proposal (x, s, r, u) is accepted iff u <= b(x, X_{s-} + boundary).
Trajectory simulate(const InitialCondition& init, const InteractionSpec& spec, const SimOptions& opts,
                    const EventStream& stream);

/// Two simulations on nested windows consuming the same noise. `init` lives in
/// the big window; the small run sees its restriction with the same lifespans.
std::pair<Trajectory, Trajectory> simulate_coupled(const InitialCondition& init,
                                                   const InteractionSpec& spec,
                                                   const SimOptions& opts_small,
                                                   const SimOptions& opts_big,
                                                   const EventStream& big_stream);

/// True when the restrictions to `w` coincide at every time in [0, horizon].
bool restricted_paths_agree(const Trajectory& a, const Trajectory& b, const Window& w);

/// Fraction of replicas whose restricted paths ever differ, with binomial SE.
Estimate disagreement_probability(std::span<const std::pair<Trajectory, Trajectory>> pairs,
                                  const Window& observe);

/// A local observable with its declared support window.
struct Observable {
    std::function<double(const Configuration&)> eval;
    std::optional<Window> support;
};

/// Monte Carlo value of (L f)(eta): the birth integral by `quadrature_n`
/// uniform samples on the support, the death sum exactly.
Estimate apply_generator(const Observable& f, const Configuration& eta, const InteractionSpec& spec,
                         std::size_t quadrature_n, CounterRng& rng);

/// (L^k f)(eta) for k in {0, 1, 2}; k = 2 nests two generator applications
/// over the support dilated by R. SE from independent batches.
Estimate generator_power_mc(const Observable& f, const Configuration& eta, const InteractionSpec& spec,
                            int k, std::size_t quadrature_n, CounterRng& rng, std::size_t batches = 8);

/// Single unbiased draw of (L^k f)(eta), k in {0, 1, 2}.
double generator_power_draw(const Observable& f, const Configuration& eta, const InteractionSpec& spec,
                            int k, std::size_t quadrature_n, CounterRng& rng);

using InitialSampler = std::function<InitialCondition(const SeedSpec&)>;

/// Mean of f(X_t) over replicas with fresh noise; replica i uses
/// seed.with_replica(i).
Estimate semigroup_expectation(const Observable& f, const InitialSampler& sampler,
                               const InteractionSpec& spec, const SimOptions& opts, double t,
                               std::size_t n_replicas, const SeedSpec& seed, unsigned threads = 0);

}  // namespace gibbsflow
