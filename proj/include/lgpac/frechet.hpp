#pragma once

// Discretized model of the function space C(Omega, R) for a closed interval
// Omega: grid-sampled functions, the nested sup-interval pseudonorm family,
// and the metric the pseudonorms induce.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lgpac {

/// Spatial domain Omega = [lower, upper] (upper may be absent, meaning
/// +infinity) sampled at a fixed, strictly increasing set of locations.
/// Immutable after construction.
class SpatialGrid {
public:
    SpatialGrid(double lower, std::optional<double> upper, std::vector<double> points)
        : lower_(lower), upper_(upper), points_(std::move(points)) {
        if (points_.empty())
            throw std::invalid_argument("SpatialGrid: needs at least one point");
        if (!std::isfinite(lower_))
            throw std::invalid_argument("SpatialGrid: lower endpoint must be finite");
        double prev = -std::numeric_limits<double>::infinity();
        for (double p : points_) {
            if (!std::isfinite(p) || p <= prev)
                throw std::invalid_argument("SpatialGrid: points must be finite and strictly increasing");
            prev = p;
        }
        if (points_.front() < lower_ - 1e-12)
            throw std::invalid_argument("SpatialGrid: points must not precede the lower endpoint");
        if (upper_ && points_.back() > *upper_ + 1e-12)
            throw std::invalid_argument("SpatialGrid: points must not exceed the upper endpoint");
    }

    [[nodiscard]] double lower() const { return lower_; }
    [[nodiscard]] const std::optional<double>& upper() const { return upper_; }
    [[nodiscard]] std::span<const double> points() const { return points_; }
    [[nodiscard]] std::size_t size() const { return points_.size(); }
    [[nodiscard]] double point(std::size_t i) const { return points_.at(i); }
    [[nodiscard]] double max_point() const { return points_.back(); }

    [[nodiscard]] bool same_as(const SpatialGrid& other) const {
        return this == &other ||
               (lower_ == other.lower_ && upper_ == other.upper_ && points_ == other.points_);
    }

private:
    double lower_;
    std::optional<double> upper_;
    std::vector<double> points_;
};

using GridPtr = std::shared_ptr<const SpatialGrid>;

/// Evenly spaced grid on the bounded domain [lower, last].
inline GridPtr make_uniform_grid(double lower, double last, double step) {
    if (step <= 0) throw std::invalid_argument("make_uniform_grid: step must be positive");
    std::vector<double> pts;
    long n = std::lround((last - lower) / step);
    for (long i = 0; i <= n; ++i) {
        double p = lower + static_cast<double>(i) * step;
        if (p > last + 1e-9 * std::max(1.0, std::abs(last))) break;
        pts.push_back(p);
    }
    if (!pts.empty() && std::abs(pts.back() - last) < 1e-9 * std::max(1.0, std::abs(last)))
        pts.back() = last;
    return std::make_shared<const SpatialGrid>(lower, last, std::move(pts));
}

/// Evenly spaced truncation of the unbounded domain [lower, +inf), sampled
/// up to the cutoff `last`.
inline GridPtr make_unbounded_grid(double lower, double last, double step) {
    auto bounded = make_uniform_grid(lower, last, step);
    std::vector<double> pts(bounded->points().begin(), bounded->points().end());
    return std::make_shared<const SpatialGrid>(lower, std::nullopt, std::move(pts));
}

inline GridPtr make_point_grid(std::vector<double> points, double lower,
                               std::optional<double> upper) {
    return std::make_shared<const SpatialGrid>(lower, upper, std::move(points));
}

/// An element of C(Omega, R), held as one finite value per grid point.
/// Immutable after construction.
class GridFunction {
public:
    GridFunction(GridPtr grid, std::vector<double> values)
        : grid_(std::move(grid)), values_(std::move(values)) {
        if (!grid_) throw std::invalid_argument("GridFunction: null grid");
        if (values_.size() != grid_->size())
            throw std::invalid_argument("GridFunction: values length must equal grid size");
        for (double v : values_)
            if (!std::isfinite(v))
                throw std::invalid_argument("GridFunction: values must be finite");
    }

    static GridFunction constant(GridPtr grid, double c) {
        std::size_t n = grid->size();
        return GridFunction(std::move(grid), std::vector<double>(n, c));
    }

    static GridFunction sample(GridPtr grid, const std::function<double(double)>& f) {
        std::vector<double> vals;
        vals.reserve(grid->size());
        for (double x : grid->points()) vals.push_back(f(x));
        return GridFunction(std::move(grid), std::move(vals));
    }

    [[nodiscard]] const GridPtr& grid() const { return grid_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] double value(std::size_t i) const { return values_.at(i); }

    [[nodiscard]] bool same_grid(const GridFunction& other) const {
        return grid_->same_as(*other.grid_);
    }

private:
    GridPtr grid_;
    std::vector<double> values_;
};

/// Nested sup-interval pseudonorm family ||g||_n = sup { |g(x)| : x <= cutoff(n) }.
/// Index n runs from `start_index`; cutoffs are nondecreasing right endpoints.
struct PseudonormFamily {
    GridPtr grid;
    int start_index = 1;
    std::vector<double> cutoffs;

    PseudonormFamily(GridPtr g, int start, std::vector<double> cuts)
        : grid(std::move(g)), start_index(start), cutoffs(std::move(cuts)) {
        if (!grid) throw std::invalid_argument("PseudonormFamily: null grid");
        if (cutoffs.empty()) throw std::invalid_argument("PseudonormFamily: needs at least one cutoff");
        double prev = -std::numeric_limits<double>::infinity();
        for (double c : cutoffs) {
            if (c < prev || c < grid->lower() - 1e-12)
                throw std::invalid_argument("PseudonormFamily: cutoffs must be nondecreasing and >= lower");
            prev = c;
        }
    }

    /// The family matching a grid: start at n = max(1, ceil(lower)) and grow
    /// the sup interval [lower, n] one unit per index until it covers the
    /// last grid point. Indices past the grid's extent are not represented.
    static PseudonormFamily standard(GridPtr g) {
        int start = std::max(1, static_cast<int>(std::ceil(g->lower() - 1e-12)));
        int last = std::max(start, static_cast<int>(std::ceil(g->max_point() - 1e-12)));
        std::vector<double> cuts;
        for (int n = start; n <= last; ++n)
            cuts.push_back(std::min(static_cast<double>(n), g->max_point()));
        return PseudonormFamily(std::move(g), start, std::move(cuts));
    }

    [[nodiscard]] int last_index() const {
        return start_index + static_cast<int>(cutoffs.size()) - 1;
    }

    [[nodiscard]] bool contains(int n) const { return n >= start_index && n <= last_index(); }

    [[nodiscard]] double cutoff(int n) const {
        if (!contains(n)) throw std::out_of_range("PseudonormFamily: index outside cutoff range");
        return cutoffs[static_cast<std::size_t>(n - start_index)];
    }
};

/// Weights and clamp defining the induced metric d(f, g) = sum_n w_n min(||f-g||_n, 1).
/// The default is the geometric family w_n = 2^-n; a custom rule must come
/// with a declared finite weight sum. Terms with w_n below `truncation_floor`
/// are dropped.
struct MetricConfig {
    std::function<double(int)> weight = [](int n) { return std::ldexp(1.0, -n); };
    std::function<double(double)> clamp = [](double t) { return std::min(t, 1.0); };
    double declared_weight_sum = 1.0;
    double truncation_floor = 0x1p-60;
};

namespace detail {
inline double sup_abs_diff_upto(const GridFunction& f, const GridFunction& g, double cutoff) {
    double m = 0.0;
    auto xs = f.grid()->points();
    auto fv = f.values();
    auto gv = g.values();
    for (std::size_t i = 0; i < xs.size() && xs[i] <= cutoff + 1e-12; ++i)
        m = std::max(m, std::abs(fv[i] - gv[i]));
    return m;
}
}  // namespace detail

/// ||f||_n over the grid samples.
inline double pseudonorm(const GridFunction& f, int n, const PseudonormFamily& family) {
    if (!f.grid()->same_as(*family.grid))
        throw std::invalid_argument("pseudonorm: grid mismatch");
    double cutoff = family.cutoff(n);
    double m = 0.0;
    auto xs = f.grid()->points();
    auto fv = f.values();
    for (std::size_t i = 0; i < xs.size() && xs[i] <= cutoff + 1e-12; ++i)
        m = std::max(m, std::abs(fv[i]));
    return m;
}

/// ||f - g||_n without materializing the difference.
inline double pseudonorm_diff(const GridFunction& f, const GridFunction& g, int n,
                              const PseudonormFamily& family) {
    if (!f.same_grid(g) || !f.grid()->same_as(*family.grid))
        throw std::invalid_argument("pseudonorm_diff: grid mismatch");
    return detail::sup_abs_diff_upto(f, g, family.cutoff(n));
}

/// Induced metric d(f, g) = sum_{n >= start} w_n clamp(||f-g||_n), truncated
/// once the weights drop below the configured floor. Indices past the family's
/// last cutoff reuse the widest sup interval, which on a truncated grid is
/// exactly what the pseudonorm degenerates to.
inline double metric(const GridFunction& f, const GridFunction& g,
                     const PseudonormFamily& family, const MetricConfig& cfg = {}) {
    if (!f.same_grid(g) || !f.grid()->same_as(*family.grid))
        throw std::invalid_argument("metric: grid mismatch");
    double d = 0.0;
    const int hard_cap = family.start_index + 4096;
    for (int n = family.start_index; n <= hard_cap; ++n) {
        double w = cfg.weight(n);
        if (!(w >= cfg.truncation_floor)) break;
        int idx = std::min(n, family.last_index());
        double pn = detail::sup_abs_diff_upto(f, g, family.cutoff(idx));
        d += w * cfg.clamp(pn);
    }
    return d;
}

/// Smallness transfer, metric to pseudonorms: returns delta = epsilon * 2^-M
/// such that d(f, g) < delta forces ||f-g||_n < epsilon for n = 1..M
/// (default weights and clamp).
inline double metric_to_pseudonorm_bound(double epsilon, int M) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("metric_to_pseudonorm_bound: epsilon must lie in (0,1)");
    if (M < 0) throw std::invalid_argument("metric_to_pseudonorm_bound: M must be nonnegative");
    return std::ldexp(epsilon, -M);
}

struct PseudonormBound {
    double delta;
    int M;
};

/// Smallness transfer, pseudonorms to metric: returns delta = epsilon / 2 and
/// the smallest M with 2^-M <= epsilon / 2 such that ||f-g||_n < delta for
/// n = 1..M forces d(f, g) < epsilon (default weights and clamp).
inline PseudonormBound pseudonorm_to_metric_bound(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("pseudonorm_to_metric_bound: epsilon must lie in (0,1)");
    double delta = epsilon / 2.0;
    int M = 0;
    while (std::ldexp(1.0, -M) > delta) ++M;
    return {delta, M};
}

}  // namespace lgpac
