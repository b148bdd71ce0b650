#include "gibbsflow/noise.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

namespace gibbsflow {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

CounterRng::CounterRng(const SeedSpec& seed) : replica_(seed.replica_id) {
    const std::uint64_t k = splitmix64(seed.root_seed ^ splitmix64(fnv1a(seed.stream_tag)));
    key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

CounterRng::result_type CounterRng::operator()() {
    if (lane_ >= 2) {
        buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                           static_cast<std::uint32_t>(replica_),
                           static_cast<std::uint32_t>(replica_ >> 32)},
                          key_);
        ++block_;
        lane_ = 0;
    }
    const std::uint64_t out = (static_cast<std::uint64_t>(buf_[2 * lane_]) << 32) | buf_[2 * lane_ + 1];
    ++lane_;
    return out;
}

double CounterRng::uniform() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::exponential() { return -std::log(uniform()); }

std::uint64_t CounterRng::poisson(double mean) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
    if (mean == 0.0) return 0;
    std::poisson_distribution<std::uint64_t> dist(mean);
    return dist(*this);
}

// ---------------------------------------------------------------------------

EventStream propose_events(const Window& w, double horizon, double b_sup, const SeedSpec& seed) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("propose_events: horizon must be >= 0");
    if (!(b_sup > 0.0) || !std::isfinite(b_sup)) {
        throw std::invalid_argument("propose_events: b_sup must be positive and finite");
    }
    EventStream out{w, horizon, b_sup, {}};
    if (horizon == 0.0) return out;
    CounterRng rng(seed);
    const double rate = b_sup * w.volume();
    out.events.reserve(static_cast<std::size_t>(rate * horizon * 1.1 + 16));
    double s = 0.0;
    for (;;) {
        s += rng.exponential() / rate;
        if (s >= horizon) break;
        ProposalEvent e{};
        for (int a = 0; a < w.dim(); ++a) e.x[a] = rng.uniform(w.lo()[a], w.hi()[a]);
        e.s = s;
        e.r = rng.exponential();
        e.u = b_sup * rng.uniform();
        out.events.push_back(e);
    }
    return out;
}

EventStream shared_restriction(const EventStream& big, const Window& small) {
    if (!big.window.contains(small)) {
        throw std::invalid_argument("shared_restriction: small window must lie inside the stream window");
    }
    EventStream out{small, big.horizon, big.b_sup, {}};
    for (const auto& e : big.events) {
        if (small.contains(e.x)) out.events.push_back(e);
    }
    return out;
}

void write_event_log_csv(std::ostream& os, const EventStream& stream) {
    const int d = stream.window.dim();
    os << "s,x0" << (d == 2 ? ",x1" : "") << ",r,u\n";
    os.precision(17);
    for (const auto& e : stream.events) {
        os << e.s << ',' << e.x[0];
        if (d == 2) os << ',' << e.x[1];
        os << ',' << e.r << ',' << e.u << '\n';
    }
}

}  // namespace gibbsflow
