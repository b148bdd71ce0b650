#include "gibbsflow/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace gibbsflow {

PairPotential::PairPotential(std::vector<double> r, std::vector<double> phi)
    : r_(std::move(r)), phi_(std::move(phi)) {
    if (r_.size() != phi_.size() || r_.empty()) {
        throw std::invalid_argument("PairPotential: need matching, nonempty r and phi tables");
    }
    for (std::size_t i = 0; i < r_.size(); ++i) {
        if (!std::isfinite(r_[i]) || !std::isfinite(phi_[i]) || r_[i] < 0.0) {
            throw std::invalid_argument("PairPotential: entries must be finite with r >= 0");
        }
        if (i > 0 && !(r_[i] > r_[i - 1])) {
            throw std::invalid_argument("PairPotential: r knots must be strictly increasing");
        }
    }
}

PairPotential PairPotential::step(double value, double range) {
    return PairPotential({0.0, range}, {value, value});
}

PairPotential PairPotential::from_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("pair potential csv: empty input");
    if (line.find_first_not_of(" \t") == std::string::npos || line.substr(0, 1) != "r") {
        throw std::runtime_error("pair potential csv: expected `r,phi` header");
    }
    std::vector<double> r, phi;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw std::runtime_error("pair potential csv: bad row");
        r.push_back(std::stod(line.substr(0, comma)));
        phi.push_back(std::stod(line.substr(comma + 1)));
    }
    return PairPotential(std::move(r), std::move(phi));
}

double PairPotential::operator()(double r) const {
    if (r_.empty() || r > r_.back()) return 0.0;
    if (r <= r_.front()) return phi_.front();
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    const std::size_t k = static_cast<std::size_t>(it - r_.begin());
    const double t = (r - r_[k - 1]) / (r_[k] - r_[k - 1]);
    return phi_[k - 1] + t * (phi_[k] - phi_[k - 1]);
}

double PairPotential::max_abs() const {
    double m = 0.0;
    for (double v : phi_) m = std::max(m, std::abs(v));
    return m;
}

double PairPotential::min_value() const {
    return phi_.empty() ? 0.0 : *std::min_element(phi_.begin(), phi_.end());
}

// ---------------------------------------------------------------------------

std::string to_string(InteractionKind k) {
    switch (k) {
        case InteractionKind::ideal: return "ideal";
        case InteractionKind::area: return "area";
        case InteractionKind::pair: return "pair";
    }
    return "?";
}

InteractionKind interaction_kind_from_string(const std::string& s) {
    if (s == "ideal") return InteractionKind::ideal;
    if (s == "area") return InteractionKind::area;
    if (s == "pair") return InteractionKind::pair;
    throw std::invalid_argument("unknown interaction kind: " + s);
}

InteractionSpec InteractionSpec::ideal(int dim, double z, double range) {
    InteractionSpec s;
    s.kind = InteractionKind::ideal;
    s.dim = dim;
    s.z = z;
    s.range = range;
    s.validate();
    return s;
}

InteractionSpec InteractionSpec::area(int dim, double alpha, double beta, double range) {
    InteractionSpec s;
    s.kind = InteractionKind::area;
    s.dim = dim;
    s.alpha = alpha;
    s.beta = beta;
    s.range = range;
    s.validate();
    return s;
}

InteractionSpec InteractionSpec::pair(int dim, PairPotential phi, double beta, double range,
                                      std::optional<int> max_neighbors) {
    InteractionSpec s;
    s.kind = InteractionKind::pair;
    s.dim = dim;
    s.phi = std::move(phi);
    s.beta = beta;
    s.range = range;
    s.max_neighbors = max_neighbors;
    s.validate();
    return s;
}

void InteractionSpec::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("interaction: dim must be 1 or 2");
    if (!(range > 0.0) || !std::isfinite(range)) throw std::invalid_argument("interaction: R > 0");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("interaction: beta >= 0");
    switch (kind) {
        case InteractionKind::ideal:
            if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("ideal: z > 0");
            break;
        case InteractionKind::area:
            if (!std::isfinite(alpha)) throw std::invalid_argument("area: alpha must be finite");
            if (dim == 2 && area_tol < kAreaAchievableTol) {
                throw std::invalid_argument("area: requested tolerance below achievable accuracy");
            }
            break;
        case InteractionKind::pair:
            if (phi.knots().empty()) throw std::invalid_argument("pair: empty potential table");
            if (phi.support() > range * (1.0 + 1e-12)) {
                for (std::size_t i = 0; i < phi.knots().size(); ++i) {
                    if (phi.knots()[i] > range && phi.values()[i] != 0.0) {
                        throw std::invalid_argument("pair: phi must vanish beyond the range R");
                    }
                }
            }
            if (!max_neighbors || *max_neighbors <= 0) {
                throw std::invalid_argument("pair: a positive packing bound max_neighbors is required");
            }
            break;
    }
}

std::string InteractionSpec::describe() const {
    std::ostringstream os;
    os << to_string(kind) << "(d=" << dim << ", R=" << range << ", beta=" << beta;
    if (kind == InteractionKind::ideal) os << ", z=" << z;
    if (kind == InteractionKind::area) os << ", alpha=" << alpha;
    if (kind == InteractionKind::pair) os << ", |phi|max=" << phi.max_abs() << ", K=" << *max_neighbors;
    os << ")";
    return os.str();
}

// ---------------------------------------------------------------------------

double unit_ball_volume(int dim) {
    if (dim == 1) return 2.0;
    if (dim == 2) return std::numbers::pi;
    throw std::invalid_argument("unit_ball_volume: dim must be 1 or 2");
}

namespace {

double uncovered_length(double x, std::span<const Point> others, double r) {
    const double lo = x - r, hi = x + r;
    std::vector<std::pair<double, double>> cover;
    cover.reserve(others.size());
    for (const auto& y : others) {
        const double a = std::max(lo, y[0] - r);
        const double b = std::min(hi, y[0] + r);
        if (a < b) cover.emplace_back(a, b);
    }
    std::sort(cover.begin(), cover.end());
    double covered = 0.0;
    double cur_a = 0.0, cur_b = 0.0;
    bool open = false;
    for (const auto& [a, b] : cover) {
        if (!open) {
            cur_a = a;
            cur_b = b;
            open = true;
        } else if (a <= cur_b) {
            cur_b = std::max(cur_b, b);
        } else {
            covered += cur_b - cur_a;
            cur_a = a;
            cur_b = b;
        }
    }
    if (open) covered += cur_b - cur_a;
    return (hi - lo) - covered;
}

}  // namespace

double disc_union_area(std::span<const Point> centres, double r) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double area = 0.0;
    std::vector<std::pair<double, double>> arcs;
    for (std::size_t i = 0; i < centres.size(); ++i) {
        const Point& c = centres[i];
        arcs.clear();
        bool hidden = false;
        for (std::size_t j = 0; j < centres.size() && !hidden; ++j) {
            if (j == i) continue;
            const double dx = centres[j][0] - c[0];
            const double dy = centres[j][1] - c[1];
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d >= 2.0 * r) continue;
            if (d == 0.0) {
                // Coincident discs: keep only the first copy.
                if (j < i) hidden = true;
                continue;
            }
            const double mid = std::atan2(dy, dx);
            const double half = std::acos(d / (2.0 * r));
            double a = mid - half;
            double b = mid + half;
            // Normalise to [0, 2pi), splitting across the seam.
            a = std::fmod(a + 2.0 * two_pi, two_pi);
            b = a + 2.0 * half;
            if (b > two_pi) {
                arcs.emplace_back(a, two_pi);
                arcs.emplace_back(0.0, b - two_pi);
            } else {
                arcs.emplace_back(a, b);
            }
        }
        if (hidden) continue;
        std::sort(arcs.begin(), arcs.end());
        // Walk the uncovered arcs; each contributes (1/2) * integral (x dy - y dx).
        auto contribution = [&](double a, double b) {
            return 0.5 * (r * r * (b - a) + r * (c[0] * (std::sin(b) - std::sin(a)) -
                                                 c[1] * (std::cos(b) - std::cos(a))));
        };
        double pos = 0.0;
        for (const auto& [a, b] : arcs) {
            if (a > pos) area += contribution(pos, a);
            pos = std::max(pos, b);
        }
        if (pos < two_pi) area += contribution(pos, two_pi);
    }
    return area;
}

double uncovered_volume(int dim, const Point& x, std::span<const Point> others, double r) {
    if (dim == 1) return uncovered_length(x[0], others, r);
    // Only discs that overlap B_r(x) matter.
    std::vector<Point> near;
    near.reserve(others.size() + 1);
    for (const auto& y : others) {
        if (squared_distance(x, y) < 4.0 * r * r) near.push_back(y);
    }
    if (near.empty()) return std::numbers::pi * r * r;
    const double without = disc_union_area(near, r);
    near.push_back(x);
    const double with = disc_union_area(near, r);
    return std::max(0.0, with - without);
}

double conditional_energy(const InteractionSpec& spec, const Point& x,
                          std::span<const Point> neighbours) {
    switch (spec.kind) {
        case InteractionKind::ideal:
            return spec.beta > 0.0 ? -std::log(spec.z) / spec.beta : -std::log(spec.z);
        case InteractionKind::area:
            if (spec.dim == 2 && spec.area_tol < kAreaAchievableTol) {
                throw std::invalid_argument("area: requested tolerance below achievable accuracy");
            }
            if (spec.alpha == 0.0) return 0.0;
            return spec.alpha * uncovered_volume(spec.dim, x, neighbours, spec.range / 2.0);
        case InteractionKind::pair: {
            double h = 0.0;
            const double r2 = spec.range * spec.range;
            for (const auto& y : neighbours) {
                const double d2 = squared_distance(x, y);
                if (d2 <= r2) h += spec.phi(std::sqrt(d2));
            }
            return h;
        }
    }
    return 0.0;
}

double conditional_energy(const InteractionSpec& spec, const Point& x, const Configuration& eta) {
    if (spec.kind == InteractionKind::ideal) return conditional_energy(spec, x, std::span<const Point>{});
    const auto nb = eta.neighbors_within(x, spec.range);
    return conditional_energy(spec, x, nb);
}

double birth_rate(const InteractionSpec& spec, const Point& x, std::span<const Point> neighbours) {
    if (spec.kind == InteractionKind::ideal) return spec.z;
    return std::exp(-spec.beta * conditional_energy(spec, x, neighbours));
}

double birth_rate(const InteractionSpec& spec, const Point& x, const Configuration& eta) {
    if (spec.kind == InteractionKind::ideal) return spec.z;
    if (spec.kind == InteractionKind::area && spec.alpha == 0.0) return 1.0;
    const auto nb = eta.neighbors_within(x, spec.range);
    return birth_rate(spec, x, std::span<const Point>(nb));
}

double insertion_energy(const InteractionSpec& spec, std::span<const Point> points,
                        std::span<const Point> background) {
    std::vector<Point> current(background.begin(), background.end());
    double total = 0.0;
    std::vector<Point> nb;
    const double r2 = spec.range * spec.range;
    for (const auto& p : points) {
        nb.clear();
        for (const auto& q : current) {
            if (squared_distance(p, q) <= r2) nb.push_back(q);
        }
        total += conditional_energy(spec, p, nb);
        current.push_back(p);
    }
    return total;
}

double energy_in_window(const InteractionSpec& spec, const Configuration& eta, const Window& w,
                        const Configuration& boundary) {
    const Window collar = dilate(w, spec.range);
    for (const auto& b : boundary.points()) {
        if (w.contains(b) || !collar.contains(b)) {
            throw std::invalid_argument(
                "energy_in_window: boundary points must lie outside w and inside dilate(w, R)");
        }
    }
    std::vector<Point> inside;
    for (const auto& p : eta.points()) {
        if (w.contains(p)) inside.push_back(p);
    }
    return insertion_energy(spec, inside, boundary.points());
}

RateBounds rate_bounds(const InteractionSpec& spec) {
    switch (spec.kind) {
        case InteractionKind::ideal: return {spec.z, spec.z};
        case InteractionKind::area: {
            const double cell = unit_ball_volume(spec.dim) * std::pow(spec.range / 2.0, spec.dim);
            const double e = std::exp(-spec.beta * spec.alpha * cell);
            return spec.alpha >= 0.0 ? RateBounds{e, 1.0} : RateBounds{1.0, e};
        }
        case InteractionKind::pair: {
            const double k = static_cast<double>(spec.max_neighbors.value_or(0));
            const double pos = std::max(0.0, [&] {
                double m = 0.0;
                for (double v : spec.phi.values()) m = std::max(m, v);
                return m;
            }());
            const double neg = std::max(0.0, -spec.phi.min_value());
            return {std::exp(-spec.beta * pos * k), std::exp(spec.beta * neg * k)};
        }
    }
    return {1.0, 1.0};
}

double unit_temperature_rate_sup(const InteractionSpec& spec) {
    InteractionSpec unit = spec;
    if (spec.kind != InteractionKind::ideal) unit.beta = 1.0;
    return rate_bounds(unit).sup;
}

}  // namespace gibbsflow
