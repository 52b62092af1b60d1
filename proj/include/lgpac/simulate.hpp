#pragma once

// Numerical integration of a bound compiled system over a finite horizon.
// Fixed-step classic RK4 and adaptive Dormand-Prince RK45; every channel is
// sampled on the requested output times, with states integrated and algebraic
// channels evaluated exactly from the states.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lgpac/compile.hpp"

namespace lgpac {

/// Finite time horizon with the sample times at which traces are recorded.
class TimeGrid {
public:
    TimeGrid(double t_end, std::vector<double> samples)
        : t_end_(t_end), samples_(std::move(samples)) {
        if (!(t_end_ >= 0)) throw std::invalid_argument("TimeGrid: t_end must be nonnegative");
        if (samples_.empty()) throw std::invalid_argument("TimeGrid: needs at least one sample");
        double prev = -1.0;
        for (double s : samples_) {
            if (!(s >= 0) || s <= prev || s > t_end_ + 1e-12)
                throw std::invalid_argument(
                    "TimeGrid: samples must be strictly increasing within [0, t_end]");
            prev = s;
        }
    }

    static TimeGrid uniform(double t_end, int n_samples) {
        if (n_samples < 2) throw std::invalid_argument("TimeGrid: needs at least two samples");
        std::vector<double> s(static_cast<std::size_t>(n_samples));
        for (int i = 0; i < n_samples; ++i)
            s[static_cast<std::size_t>(i)] = t_end * static_cast<double>(i) / (n_samples - 1);
        s.back() = t_end;
        return TimeGrid(t_end, std::move(s));
    }

    /// Same horizon with extra sample times merged in (duplicates dropped).
    [[nodiscard]] TimeGrid merged_with(std::vector<double> extra) const {
        std::vector<double> s = samples_;
        s.insert(s.end(), extra.begin(), extra.end());
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                s.end());
        double t_end = std::max(t_end_, s.back());
        return TimeGrid(t_end, std::move(s));
    }

    [[nodiscard]] double t_end() const { return t_end_; }
    [[nodiscard]] std::span<const double> samples() const { return samples_; }

private:
    double t_end_;
    std::vector<double> samples_;
};

enum class SolverMethod { RK4Fixed, RK45Adaptive };

struct SolverConfig {
    SolverMethod method = SolverMethod::RK45Adaptive;
    double abs_tol = 1e-9;
    double rel_tol = 1e-9;
    double h_init = 1e-3;  // RK4Fixed uses this as the step
    double h_max = 0.0;    // <= 0 means t_end / 100
};

/// Integration stopped before the horizon; `last_valid_time` is the frontier
/// the solver could still certify.
struct SimulationError : std::runtime_error {
    enum class Code { StepSizeUnderflow, NonFiniteState };
    SimulationError(Code c, double t, const std::string& msg)
        : std::runtime_error(msg), code(c), last_valid_time(t) {}
    Code code;
    double last_valid_time;
};

/// Sampled values of one channel: `width` values per sample time (grid points
/// for function-valued channels, 1 otherwise), row-major by time.
struct Trace {
    std::string channel;
    ChannelKind kind = ChannelKind::RStream;
    int width = 1;
    std::vector<double> data;

    [[nodiscard]] double at(std::size_t time_index, int point = 0) const {
        return data[time_index * static_cast<std::size_t>(width) + static_cast<std::size_t>(point)];
    }
};

struct SimulationResult {
    GridPtr grid;
    std::vector<double> times;
    std::vector<Trace> traces;
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;

    [[nodiscard]] const Trace* find_trace(std::string_view name) const {
        for (const auto& t : traces)
            if (t.channel == name) return &t;
        return nullptr;
    }

    [[nodiscard]] const Trace& trace(std::string_view name) const {
        const auto* t = find_trace(name);
        if (!t) throw std::out_of_range("SimulationResult: unknown channel '" + std::string(name) + "'");
        return *t;
    }

    [[nodiscard]] std::size_t sample_index(double t, double tol = 1e-9) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (std::abs(times[i] - t) <= tol) return i;
        throw std::out_of_range("SimulationResult: no sample at the requested time");
    }
};

namespace detail {

inline void check_finite(std::span<const double> y, double t_last) {
    for (double v : y)
        if (!std::isfinite(v))
            throw SimulationError(SimulationError::Code::NonFiniteState, t_last,
                                  "state became non-finite shortly after t = " +
                                      format_double(t_last));
}

}  // namespace detail

/// Integrate the bound system and record every channel at the sample times.
/// Channels are computed per grid point; per-point subsystems are independent
/// and evaluated in a fixed order, so results are deterministic.
inline SimulationResult simulate(const BoundNetwork& bn, const TimeGrid& tg,
                                 const SolverConfig& cfg = {}) {
    const auto& sys = *bn.system;
    SimulationResult result;
    result.grid = sys.grid();
    int npoints = static_cast<int>(sys.grid()->size());
    for (const auto& c : sys.channels()) {
        Trace tr;
        tr.channel = c.name;
        tr.kind = c.kind;
        tr.width = is_x_kind(c.kind) ? npoints : 1;
        result.traces.push_back(std::move(tr));
    }

    std::vector<double> y = bn.initial_state;
    std::vector<double> scratch(sys.nodes().size(), 0.0);
    const std::size_t ns = y.size();

    // capture order: channels at a sample time, each channel contiguous
    auto capture = [&](double t) {
        result.times.push_back(t);
        for (auto& tr : result.traces) tr.data.resize(tr.data.size() + static_cast<std::size_t>(tr.width));
        for (int p = 0; p < npoints; ++p) {
            eval_nodes(bn, t, y, p, scratch, false);
            std::size_t ti = result.times.size() - 1;
            for (std::size_t c = 0; c < sys.channels().size(); ++c) {
                auto& tr = result.traces[c];
                double v = scratch[static_cast<std::size_t>(sys.channels()[c].value_node)];
                if (tr.width > 1)
                    tr.data[ti * static_cast<std::size_t>(tr.width) + static_cast<std::size_t>(p)] = v;
                else if (p == 0)
                    tr.data[ti] = v;
            }
        }
    };

    auto rhs = [&](double t, std::span<const double> yy, std::span<double> dydt) {
        eval_dynamics(bn, t, yy, dydt, scratch);
    };

    std::span<const double> samples = tg.samples();
    std::size_t next_sample = 0;
    double t = 0.0;
    if (!samples.empty() && samples[0] == 0.0) {
        capture(0.0);
        next_sample = 1;
    }
    if (next_sample >= samples.size()) return result;

    double t_final = samples.back();
    double h_max = cfg.h_max > 0 ? cfg.h_max : std::max(tg.t_end(), 1e-12) / 100.0;

    if (cfg.method == SolverMethod::RK4Fixed) {
        double h_nom = std::min(cfg.h_init > 0 ? cfg.h_init : h_max, h_max);
        std::vector<double> k1(ns), k2(ns), k3(ns), k4(ns), ytmp(ns);
        while (next_sample < samples.size()) {
            double target = samples[next_sample];
            double h = std::min(h_nom, target - t);
            if (h < 1e-15 * std::max(1.0, std::abs(t))) {
                t = target;
            } else {
                rhs(t, y, k1);
                for (std::size_t i = 0; i < ns; ++i) ytmp[i] = y[i] + 0.5 * h * k1[i];
                rhs(t + 0.5 * h, ytmp, k2);
                for (std::size_t i = 0; i < ns; ++i) ytmp[i] = y[i] + 0.5 * h * k2[i];
                rhs(t + 0.5 * h, ytmp, k3);
                for (std::size_t i = 0; i < ns; ++i) ytmp[i] = y[i] + h * k3[i];
                rhs(t + h, ytmp, k4);
                for (std::size_t i = 0; i < ns; ++i)
                    y[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
                detail::check_finite(y, t);
                t = (std::abs(target - t - h) < 1e-12 * std::max(1.0, target)) ? target : t + h;
                ++result.steps_accepted;
            }
            if (t >= target - 1e-12 * std::max(1.0, target)) {
                t = target;
                capture(t);
                ++next_sample;
            }
        }
        return result;
    }

    // Dormand-Prince 5(4), FSAL
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    std::vector<double> k1(ns), k2(ns), k3(ns), k4(ns), k5(ns), k6(ns), k7(ns), ytmp(ns), ynew(ns);
    double h = std::min({cfg.h_init > 0 ? cfg.h_init : h_max, h_max, t_final - t});
    bool have_k1 = false;
    while (next_sample < samples.size()) {
        double target = samples[next_sample];
        if (target - t < 1e-14 * std::max(1.0, target)) {
            t = target;
            capture(t);
            ++next_sample;
            continue;
        }
        double h_step = std::min(h, target - t);
        bool clipped = h_step < h;
        if (h_step < 1e-14 * std::max(1.0, std::abs(t)))
            throw SimulationError(SimulationError::Code::StepSizeUnderflow, t,
                                  "step size underflow at t = " + format_double(t));
        if (!have_k1) {
            rhs(t, y, k1);
            have_k1 = true;
        }
        for (std::size_t i = 0; i < ns; ++i) ytmp[i] = y[i] + h_step * a21 * k1[i];
        rhs(t + c2 * h_step, ytmp, k2);
        for (std::size_t i = 0; i < ns; ++i) ytmp[i] = y[i] + h_step * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h_step, ytmp, k3);
        for (std::size_t i = 0; i < ns; ++i)
            ytmp[i] = y[i] + h_step * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h_step, ytmp, k4);
        for (std::size_t i = 0; i < ns; ++i)
            ytmp[i] = y[i] + h_step * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h_step, ytmp, k5);
        for (std::size_t i = 0; i < ns; ++i)
            ytmp[i] = y[i] +
                      h_step * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        rhs(t + h_step, ytmp, k6);
        for (std::size_t i = 0; i < ns; ++i)
            ynew[i] = y[i] +
                      h_step * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        rhs(t + h_step, ynew, k7);

        bool finite = true;
        double err_sq = 0.0;
        for (std::size_t i = 0; i < ns; ++i) {
            double e = h_step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                 e7 * k7[i]);
            double scale = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            double q = e / scale;
            err_sq += q * q;
            if (!std::isfinite(ynew[i]) || !std::isfinite(e)) finite = false;
        }
        double err = std::sqrt(err_sq / static_cast<double>(ns));

        if (!finite) {
            // treat like a hard rejection; shrinking past underflow reports blow-up
            h = h_step * 0.25;
            have_k1 = true;  // k1 still valid at (t, y)
            ++result.steps_rejected;
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw SimulationError(SimulationError::Code::NonFiniteState, t,
                                      "state blew up shortly after t = " + format_double(t));
            continue;
        }

        if (err <= 1.0) {
            t = clipped ? target : t + h_step;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            ++result.steps_accepted;
            double fac = err > 0 ? 0.9 * std::pow(err, -0.2) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            if (!clipped) h = std::min(h_step * fac, h_max);
            if (t >= target - 1e-12 * std::max(1.0, target)) {
                t = target;
                capture(t);
                ++next_sample;
            }
        } else {
            double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
            h = h_step * fac;
            ++result.steps_rejected;
        }
    }
    return result;
}

// --- dense output -----------------------------------------------------------

namespace detail {

/// Monotone cubic (Fritsch-Carlson) slopes for possibly non-uniform samples.
inline std::vector<double> pchip_slopes(std::span<const double> t, std::span<const double> v) {
    std::size_t n = t.size();
    std::vector<double> m(n, 0.0);
    if (n == 1) return m;
    if (n == 2) {
        double d = (v[1] - v[0]) / (t[1] - t[0]);
        m[0] = m[1] = d;
        return m;
    }
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = t[i + 1] - t[i];
        d[i] = (v[i + 1] - v[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            double w1 = 2 * h[i] + h[i - 1];
            double w2 = h[i] + 2 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    auto endpoint = [](double h0, double h1, double d0, double d1) {
        double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0) return 0.0;
        if (d0 * d1 < 0 && std::abs(s) > 3 * std::abs(d0)) return 3 * d0;
        return s;
    };
    m[0] = endpoint(h[0], h[1], d[0], d[1]);
    m[n - 1] = endpoint(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return m;
}

inline double hermite(double t, double t0, double t1, double v0, double v1, double m0, double m1) {
    double h = t1 - t0;
    double s = (t - t0) / h;
    double s2 = s * s, s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * h * m0 + (-2 * s3 + 3 * s2) * v1 +
           (s3 - s2) * h * m1;
}

}  // namespace detail

using ChannelValue = std::variant<double, GridFunction>;

/// Channel value at an arbitrary time inside the simulated horizon, by
/// monotone cubic interpolation of the stored samples (exact at sample
/// times).
inline ChannelValue evaluate_channel(const SimulationResult& result, const std::string& channel,
                                     double t) {
    const Trace& tr = result.trace(channel);
    const auto& times = result.times;
    if (times.empty()) throw std::out_of_range("evaluate_channel: empty trace");
    if (t < times.front() - 1e-12 || t > times.back() + 1e-12)
        throw std::out_of_range("evaluate_channel: time outside the simulated horizon");

    auto value_at = [&](std::size_t ti, int p) { return tr.at(ti, p); };

    std::vector<double> out(static_cast<std::size_t>(tr.width), 0.0);
    // exact at nodes
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (std::abs(times[i] - t) < 1e-12 * std::max(1.0, std::abs(t))) {
            for (int p = 0; p < tr.width; ++p) out[static_cast<std::size_t>(p)] = value_at(i, p);
            if (tr.width == 1 && !is_x_kind(tr.kind)) return out[0];
            return GridFunction(result.grid, std::move(out));
        }
    }
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    std::size_t lo = hi - 1;
    for (int p = 0; p < tr.width; ++p) {
        std::vector<double> series(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) series[i] = value_at(i, p);
        auto slopes = detail::pchip_slopes(times, series);
        out[static_cast<std::size_t>(p)] = detail::hermite(t, times[lo], times[hi], series[lo],
                                                           series[hi], slopes[lo], slopes[hi]);
    }
    if (tr.width == 1 && !is_x_kind(tr.kind)) return out[0];
    return GridFunction(result.grid, std::move(out));
}

/// Grid-valued sample of a channel at a stored sample time.
inline GridFunction grid_sample(const SimulationResult& result, const std::string& channel,
                                std::size_t time_index) {
    const Trace& tr = result.trace(channel);
    std::vector<double> v(static_cast<std::size_t>(tr.width));
    for (int p = 0; p < tr.width; ++p) v[static_cast<std::size_t>(p)] = tr.at(time_index, p);
    if (tr.width == 1 && static_cast<int>(result.grid->size()) != 1) {
        // broadcast a real-valued channel across the grid for metric work
        return GridFunction::constant(result.grid, v[0]);
    }
    return GridFunction(result.grid, std::move(v));
}

}  // namespace lgpac
