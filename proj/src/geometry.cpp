#include "gibbsflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace gibbsflow {

double squared_distance(const Point& a, const Point& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

Window::Window(int dim, Point lo, Point hi) : dim_(dim), lo_(lo), hi_(hi) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("Window: dimension must be 1 or 2");
    if (dim == 1) {
        lo_[1] = 0.0;
        hi_[1] = 0.0;
    }
    for (int a = 0; a < dim; ++a) {
        if (!std::isfinite(lo_[a]) || !std::isfinite(hi_[a]) || !(lo_[a] < hi_[a])) {
            throw std::invalid_argument("Window: require finite lo < hi on every axis");
        }
    }
}

Window Window::interval(double lo, double hi) { return Window(1, Point(lo), Point(hi)); }

Window Window::rectangle(double x0, double x1, double y0, double y1) {
    return Window(2, Point(x0, y0), Point(x1, y1));
}

Window Window::cube(int dim, double lo, double hi) {
    return Window(dim, Point(lo, dim == 2 ? lo : 0.0), Point(hi, dim == 2 ? hi : 0.0));
}

Window Window::centred(int dim, double side) { return cube(dim, -side / 2.0, side / 2.0); }

double Window::max_side() const {
    double s = side(0);
    if (dim_ == 2) s = std::max(s, side(1));
    return s;
}

double Window::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= side(a);
    return v;
}

Point Window::centre() const {
    Point c;
    for (int a = 0; a < dim_; ++a) c[a] = 0.5 * (lo_[a] + hi_[a]);
    return c;
}

bool Window::contains(const Point& p) const {
    for (int a = 0; a < dim_; ++a) {
        if (!(p[a] >= lo_[a] && p[a] < hi_[a])) return false;
    }
    return true;
}

bool Window::contains(const Window& w) const {
    if (w.dim_ != dim_) return false;
    for (int a = 0; a < dim_; ++a) {
        if (w.lo_[a] < lo_[a] || w.hi_[a] > hi_[a]) return false;
    }
    return true;
}

bool Window::intersects(const Window& w) const {
    for (int a = 0; a < dim_; ++a) {
        if (w.hi_[a] <= lo_[a] || hi_[a] <= w.lo_[a]) return false;
    }
    return true;
}

Window dilate(const Window& w, double r) {
    if (!(r >= 0.0)) throw std::invalid_argument("dilate: radius must be nonnegative");
    Point lo = w.lo(), hi = w.hi();
    for (int a = 0; a < w.dim(); ++a) {
        lo[a] -= r;
        hi[a] += r;
    }
    return Window(w.dim(), lo, hi);
}

Window intersect(const Window& a, const Window& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("intersect: dimension mismatch");
    Point lo, hi;
    for (int k = 0; k < a.dim(); ++k) {
        lo[k] = std::max(a.lo()[k], b.lo()[k]);
        hi[k] = std::min(a.hi()[k], b.hi()[k]);
    }
    return Window(a.dim(), lo, hi);
}

// ---------------------------------------------------------------------------

Configuration::Configuration(const Window& ambient, double range)
    : ambient_(ambient), range_(range) {
    if (!(range >= 0.0) || !std::isfinite(range)) {
        throw std::invalid_argument("Configuration: index range must be finite and >= 0");
    }
    for (int a = 0; a < ambient_.dim(); ++a) {
        const double side = ambient_.side(a);
        const double target = std::max(range, side / 64.0);
        ncell_[a] = std::max(1, static_cast<int>(std::floor(side / target)));
        cell_[a] = side / ncell_[a];
    }
    buckets_.resize(static_cast<std::size_t>(ncell_[0]) * ncell_[1]);
}

Configuration::Configuration(const Window& ambient, double range, std::span<const Point> points)
    : Configuration(ambient, range) {
    points_.reserve(points.size());
    for (const auto& p : points) insert(p);
}

int Configuration::clamp_cell(int axis, double coord) const {
    const double rel = (coord - ambient_.lo()[axis]) / cell_[axis];
    if (!(rel > 0.0)) return 0;
    if (rel >= ncell_[axis]) return ncell_[axis] - 1;
    return static_cast<int>(rel);
}

std::size_t Configuration::bucket_of(const Point& p) const {
    const int i = clamp_cell(0, p[0]);
    const int j = ambient_.dim() == 2 ? clamp_cell(1, p[1]) : 0;
    return static_cast<std::size_t>(j) * ncell_[0] + i;
}

std::vector<Point> Configuration::sorted_points() const {
    std::vector<Point> out(points_.begin(), points_.end());
    std::sort(out.begin(), out.end());
    return out;
}

bool Configuration::contains(const Point& p) const {
    for (std::uint32_t k : buckets_[bucket_of(p)]) {
        if (points_[k] == p) return true;
    }
    return false;
}

bool Configuration::insert(const Point& p) {
    if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
        throw std::invalid_argument("Configuration::insert: non-finite coordinate");
    }
    if (!ambient_.contains(p)) {
        throw std::invalid_argument("Configuration::insert: point outside the ambient window");
    }
    auto& bucket = buckets_[bucket_of(p)];
    for (std::uint32_t k : bucket) {
        if (points_[k] == p) return false;
    }
    bucket.push_back(static_cast<std::uint32_t>(points_.size()));
    points_.push_back(p);
    return true;
}

bool Configuration::erase(const Point& p) {
    auto& bucket = buckets_[bucket_of(p)];
    auto it = std::find_if(bucket.begin(), bucket.end(),
                           [&](std::uint32_t k) { return points_[k] == p; });
    if (it == bucket.end()) return false;
    const std::uint32_t idx = *it;
    *it = bucket.back();
    bucket.pop_back();

    const auto last = static_cast<std::uint32_t>(points_.size() - 1);
    if (idx != last) {
        // Move the last point into the hole and patch its bucket entry.
        auto& moved_bucket = buckets_[bucket_of(points_[last])];
        for (auto& k : moved_bucket) {
            if (k == last) {
                k = idx;
                break;
            }
        }
        points_[idx] = points_[last];
    }
    points_.pop_back();
    return true;
}

void Configuration::clear() {
    points_.clear();
    for (auto& b : buckets_) b.clear();
}

std::vector<Point> Configuration::neighbors_within(const Point& x, double r) const {
    std::vector<Point> out;
    for_each_within(x, r, [&](const Point& y) { out.push_back(y); });
    return out;
}

void Configuration::rebuild_index() {
    for (auto& b : buckets_) b.clear();
    for (std::uint32_t k = 0; k < points_.size(); ++k) buckets_[bucket_of(points_[k])].push_back(k);
}

bool Configuration::same_points(const Configuration& other) const {
    if (size() != other.size()) return false;
    return sorted_points() == other.sorted_points();
}

Configuration restrict(const Configuration& cfg, const Window& w) {
    Configuration out(w, cfg.index_range());
    for (const auto& p : cfg.points()) {
        if (w.contains(p)) out.insert(p);
    }
    return out;
}

std::size_t count(const Configuration& cfg, const Window& w) {
    return static_cast<std::size_t>(std::count_if(cfg.points().begin(), cfg.points().end(),
                                                  [&](const Point& p) { return w.contains(p); }));
}

// ---------------------------------------------------------------------------

MarkedConfiguration::MarkedConfiguration(std::vector<MarkedPoint> entries) {
    for (const auto& e : entries) add(e.x, e.lifespan);
}

void MarkedConfiguration::add(const Point& x, double lifespan) {
    if (!(lifespan > 0.0) || !std::isfinite(lifespan)) {
        throw std::invalid_argument("MarkedConfiguration: lifespans must be positive and finite");
    }
    entries_.push_back({x, lifespan});
}

// ---------------------------------------------------------------------------

void write_configuration_csv(std::ostream& os, const Configuration& cfg) {
    os << "dim=" << cfg.dim() << '\n';
    os.precision(17);
    for (const auto& p : cfg.points()) {
        os << p[0];
        if (cfg.dim() == 2) os << ',' << p[1];
        os << '\n';
    }
}

std::pair<int, std::vector<Point>> read_configuration_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("dim=", 0) != 0) {
        throw std::runtime_error("configuration csv: missing `dim=<d>` header");
    }
    const int dim = std::stoi(line.substr(4));
    if (dim != 1 && dim != 2) throw std::runtime_error("configuration csv: dim must be 1 or 2");
    std::vector<Point> pts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        Point p;
        int col = 0;
        while (std::getline(row, cell, ',')) {
            if (col >= dim) throw std::runtime_error("configuration csv: too many columns");
            p[col++] = std::stod(cell);
        }
        if (col != dim) throw std::runtime_error("configuration csv: too few columns");
        pts.push_back(p);
    }
    return {dim, std::move(pts)};
}

}  // namespace gibbsflow
