#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace gibbsflow {

/// A point in R^d for d in {1, 2}. One-dimensional points keep x[1] == 0.
struct Point {
    std::array<double, 2> x{0.0, 0.0};

    Point() = default;
    explicit Point(double x0, double x1 = 0.0) : x{x0, x1} {}

    double operator[](std::size_t i) const { return x[i]; }
    double& operator[](std::size_t i) { return x[i]; }

    friend bool operator==(const Point&, const Point&) = default;
    friend auto operator<=>(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b);
double squared_distance(const Point& a, const Point& b);

/// Axis-aligned half-open box [lo, hi).
class Window {
public:
    Window(int dim, Point lo, Point hi);

    static Window interval(double lo, double hi);
    static Window rectangle(double x0, double x1, double y0, double y1);
    /// [lo, hi)^dim
    static Window cube(int dim, double lo, double hi);
    /// [-side/2, side/2)^dim, the centred boxes used for thermodynamic sequences.
    static Window centred(int dim, double side);

    int dim() const { return dim_; }
    const Point& lo() const { return lo_; }
    const Point& hi() const { return hi_; }
    double side(int axis) const { return hi_[axis] - lo_[axis]; }
    double max_side() const;
    double volume() const;
    Point centre() const;

    bool contains(const Point& p) const;
    bool contains(const Window& w) const;
    bool intersects(const Window& w) const;

    friend bool operator==(const Window&, const Window&) = default;

private:
    int dim_;
    Point lo_;
    Point hi_;
};

/// Box dilation [lo - r, hi + r). Superset of the Euclidean r-neighbourhood.
Window dilate(const Window& w, double r);

/// Intersection; throws std::invalid_argument when empty.
Window intersect(const Window& a, const Window& b);

/// A finite simple point configuration inside an ambient window, indexed by a
/// uniform grid whose cells are at least `range` wide.
class Configuration {
public:
    Configuration(const Window& ambient, double range);
    Configuration(const Window& ambient, double range, std::span<const Point> points);

    const Window& ambient() const { return ambient_; }
    int dim() const { return ambient_.dim(); }
    double index_range() const { return range_; }
    double cell_size(int axis) const { return cell_[axis]; }

    std::size_t size() const { return points_.size(); }
    bool empty() const { return points_.empty(); }
    std::span<const Point> points() const { return points_; }
    std::vector<Point> sorted_points() const;

    /// Inserts p. Returns false when p is already present (simple configurations).
    /// Throws std::invalid_argument when p is outside the ambient window or not finite.
    bool insert(const Point& p);
    /// Returns false when p is not present.
    bool erase(const Point& p);
    bool contains(const Point& p) const;
    void clear();

    /// Points y with |x - y| <= r. Order unspecified.
    std::vector<Point> neighbors_within(const Point& x, double r) const;

    /// Calls fn(y) for every y with |x - y| <= r.
    template <class Fn>
    void for_each_within(const Point& x, double r, Fn&& fn) const {
        const double r2 = r * r;
        std::array<int, 2> lo_idx{0, 0}, hi_idx{0, 0};
        for (int a = 0; a < 2; ++a) {
            if (a >= ambient_.dim()) continue;
            lo_idx[a] = clamp_cell(a, x[a] - r);
            hi_idx[a] = clamp_cell(a, x[a] + r);
        }
        for (int j = lo_idx[1]; j <= hi_idx[1]; ++j) {
            for (int i = lo_idx[0]; i <= hi_idx[0]; ++i) {
                for (std::uint32_t k : buckets_[static_cast<std::size_t>(j) * ncell_[0] + i]) {
                    if (squared_distance(points_[k], x) <= r2) fn(points_[k]);
                }
            }
        }
    }

    /// Drops and rebuilds the bucket index from the point list.
    void rebuild_index();

    /// Same point set, compared as sets.
    bool same_points(const Configuration& other) const;

private:
    int clamp_cell(int axis, double coord) const;
    std::size_t bucket_of(const Point& p) const;

    Window ambient_;
    double range_;
    std::array<double, 2> cell_{1.0, 1.0};
    std::array<int, 2> ncell_{1, 1};
    std::vector<Point> points_;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

/// The points of cfg inside w, indexed on w.
Configuration restrict(const Configuration& cfg, const Window& w);
std::size_t count(const Configuration& cfg, const Window& w);

struct MarkedPoint {
    Point x;
    double lifespan;
};

/// Points with strictly positive finite lifespans.
class MarkedConfiguration {
public:
    MarkedConfiguration() = default;
    explicit MarkedConfiguration(std::vector<MarkedPoint> entries);

    std::span<const MarkedPoint> entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    void add(const Point& x, double lifespan);

private:
    std::vector<MarkedPoint> entries_;
};

/// CSV with header `dim=<d>` and one `x0[,x1]` row per point.
void write_configuration_csv(std::ostream& os, const Configuration& cfg);
/// Parses the CSV form; returns the dimension and points. Throws std::runtime_error.
std::pair<int, std::vector<Point>> read_configuration_csv(std::istream& is);

}  // namespace gibbsflow
