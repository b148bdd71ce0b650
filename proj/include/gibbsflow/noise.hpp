#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "gibbsflow/geometry.hpp"

namespace gibbsflow {

/// Names one random stream: (root_seed, replica_id, stream_tag).
struct SeedSpec {
    std::uint64_t root_seed = 0x5EED;
    std::uint64_t replica_id = 0;
    std::string stream_tag = "main";

    SeedSpec with_replica(std::uint64_t id) const { return {root_seed, id, stream_tag}; }
    SeedSpec with_tag(std::string tag) const { return {root_seed, replica_id, std::move(tag)}; }
};

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based generator: output block n of stream s is a pure function of
/// (seed, n). Satisfies UniformRandomBitGenerator.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(const SeedSpec& seed);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

    /// Uniform on the open interval (0, 1).
    double uniform();
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    /// Exp(1), strictly positive.
    double exponential();
    std::uint64_t poisson(double mean);

    /// Position in the stream, in 64-bit draws.
    std::uint64_t position() const { return block_ * 2 + lane_; }

private:
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t replica_;
    std::uint64_t block_ = 0;
    unsigned lane_ = 2;
    std::array<std::uint32_t, 4> buf_{};
};

/// One proposal (x, s, r, u) of the driving noise: location, birth time,
/// lifespan and acceptance mark.
struct ProposalEvent {
    Point x;
    double s;
    double r;
    double u;

    friend bool operator==(const ProposalEvent&, const ProposalEvent&) = default;
};

/// A time-ordered proposal list for one window and horizon.
struct EventStream {
    Window window;
    double horizon;
    double b_sup;
    std::vector<ProposalEvent> events;
};

/// Poisson proposals in time with rate b_sup * |w|, x uniform on w, u uniform
/// on [0, b_sup], r ~ Exp(1). Deterministic in (w, horizon, b_sup, seed).
EventStream propose_events(const Window& w, double horizon, double b_sup, const SeedSpec& seed);

/// The sub-list of events located in `small`, order preserved.
EventStream shared_restriction(const EventStream& big, const Window& small);

/// `s,x0[,x1],r,u` rows.
void write_event_log_csv(std::ostream& os, const EventStream& stream);

}  // namespace gibbsflow
