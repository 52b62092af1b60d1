#pragma once

// Moduli of convergence (discrete and continuous), the certified limit
// operations built on two-probe evaluation, and the conversions between
// metric moduli and pseudonorm-indexed moduli.

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lgpac/frechet.hpp"

namespace lgpac {

class Network;  // wiring graph, defined in network.hpp

/// Nondecreasing lookahead function: given a precision exponent it tells how
/// far into a stream (continuous flavor) or sequence (discrete flavor) to
/// probe. Network-generated moduli must be materialized into a table by
/// simulation before they can be evaluated (see workflow.hpp).
class Modulus {
public:
    enum class Flavor { Discrete, Continuous };
    enum class Rep { Linear, Exp2, Tabulated, NetworkGenerated, Derived };

    static Modulus linear(double scale, double offset = 0.0,
                          Flavor flavor = Flavor::Continuous) {
        if (scale < 0) throw std::invalid_argument("Modulus::linear: scale must be nonnegative");
        Modulus m(flavor, Rep::Linear);
        m.scale_ = scale;
        m.offset_ = offset;
        return m;
    }

    /// T(tau) = scale * 2^tau.
    static Modulus exp2(double scale, Flavor flavor = Flavor::Continuous) {
        if (scale < 0) throw std::invalid_argument("Modulus::exp2: scale must be nonnegative");
        Modulus m(flavor, Rep::Exp2);
        m.scale_ = scale;
        return m;
    }

    static Modulus identity(Flavor flavor = Flavor::Continuous) { return linear(1.0, 0.0, flavor); }

    /// Piecewise-linear table of (tau, T) points; clamps outside the range.
    static Modulus tabulated(std::vector<std::pair<double, double>> points,
                             Flavor flavor = Flavor::Continuous) {
        if (points.empty()) throw std::invalid_argument("Modulus::tabulated: empty table");
        double prev_tau = -std::numeric_limits<double>::infinity();
        double prev_val = -std::numeric_limits<double>::infinity();
        for (auto& [tau, val] : points) {
            if (tau <= prev_tau)
                throw std::invalid_argument("Modulus::tabulated: taus must be strictly increasing");
            if (val < prev_val)
                throw std::invalid_argument("Modulus::tabulated: values must be nondecreasing");
            prev_tau = tau;
            prev_val = val;
        }
        Modulus m(flavor, Rep::Tabulated);
        m.table_ = std::move(points);
        return m;
    }

    static Modulus from_network(std::shared_ptr<const Network> net, std::string channel,
                                std::string name = {}) {
        Modulus m(Flavor::Continuous, Rep::NetworkGenerated);
        m.network_ = std::move(net);
        m.network_channel_ = std::move(channel);
        m.network_name_ = std::move(name);
        return m;
    }

    /// Unnamed reference into a construction catalog, resolved at use.
    static Modulus from_named_network(std::string name) {
        Modulus m(Flavor::Continuous, Rep::NetworkGenerated);
        m.network_name_ = std::move(name);
        return m;
    }

    static Modulus callable(std::function<double(double)> fn, Flavor flavor) {
        Modulus m(flavor, Rep::Derived);
        m.fn_ = std::move(fn);
        return m;
    }

    double operator()(double tau) const {
        if (tau < 0) throw std::invalid_argument("Modulus: precision argument must be nonnegative");
        switch (rep_) {
            case Rep::Linear: return scale_ * tau + offset_;
            case Rep::Exp2: return scale_ * std::exp2(tau);
            case Rep::Tabulated: {
                if (tau <= table_.front().first) return table_.front().second;
                if (tau >= table_.back().first) return table_.back().second;
                auto it = std::upper_bound(
                    table_.begin(), table_.end(), tau,
                    [](double v, const std::pair<double, double>& p) { return v < p.first; });
                auto lo = *(it - 1);
                auto hi = *it;
                double w = (tau - lo.first) / (hi.first - lo.first);
                return lo.second + w * (hi.second - lo.second);
            }
            case Rep::NetworkGenerated:
                throw std::logic_error(
                    "Modulus: network-generated modulus must be materialized before evaluation");
            case Rep::Derived: return fn_(tau);
        }
        throw std::logic_error("Modulus: bad representation");
    }

    /// Discrete evaluation N(nu); rounds conservatively upward.
    [[nodiscard]] int at_index(int nu) const {
        double v = (*this)(static_cast<double>(nu));
        return static_cast<int>(std::ceil(v - 1e-9));
    }

    [[nodiscard]] Flavor flavor() const { return flavor_; }
    [[nodiscard]] Rep rep() const { return rep_; }
    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] double offset() const { return offset_; }
    [[nodiscard]] const std::vector<std::pair<double, double>>& table() const { return table_; }
    [[nodiscard]] const std::shared_ptr<const Network>& network() const { return network_; }
    [[nodiscard]] const std::string& network_channel() const { return network_channel_; }
    [[nodiscard]] const std::string& network_name() const { return network_name_; }

    /// Spot check that the modulus is nonnegative and nondecreasing on
    /// [lo, hi]; tables are checked exhaustively at construction already.
    [[nodiscard]] bool check_nondecreasing(double lo, double hi, int samples = 65) const {
        if (rep_ == Rep::NetworkGenerated) return true;  // checked after materialization
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < samples; ++i) {
            double tau = lo + (hi - lo) * i / (samples - 1);
            double v = (*this)(tau);
            if (!(v >= 0.0) || v < prev - 1e-12) return false;
            prev = v;
        }
        return true;
    }

private:
    Modulus(Flavor f, Rep r) : flavor_(f), rep_(r) {}

    Flavor flavor_;
    Rep rep_;
    double scale_ = 0.0;
    double offset_ = 0.0;
    std::vector<std::pair<double, double>> table_;
    std::shared_ptr<const Network> network_;
    std::string network_channel_;
    std::string network_name_;
    std::function<double(double)> fn_;
};

/// Pseudonorm-indexed modulus: one lookahead function per pseudonorm index n,
/// nondecreasing in the precision argument for each fixed n.
class PseudonormModulus {
public:
    using Flavor = Modulus::Flavor;

    PseudonormModulus(Flavor flavor, std::function<double(int, double)> eval)
        : flavor_(flavor), eval_(std::move(eval)) {}

    double operator()(int n, double tau) const {
        if (tau < 0) throw std::invalid_argument("PseudonormModulus: precision must be nonnegative");
        return eval_(n, tau);
    }

    [[nodiscard]] int at_index(int n, int nu) const {
        return static_cast<int>(std::ceil(eval_(n, static_cast<double>(nu)) - 1e-9));
    }

    [[nodiscard]] Flavor flavor() const { return flavor_; }

    /// The n-section as a plain modulus.
    [[nodiscard]] Modulus section(int n) const {
        auto eval = eval_;
        return Modulus::callable([eval, n](double tau) { return eval(n, tau); }, flavor_);
    }

private:
    Flavor flavor_;
    std::function<double(int, double)> eval_;
};

/// A limit value together with its modulus-derived bound 2^-tau and the
/// measured gap between the two probe evaluations. `certified` means the
/// probe pair was consistent with the convergence contract; the analytic
/// guarantee comes from whatever construction produced the stream.
struct CertifiedLimit {
    std::variant<double, GridFunction> value;
    double precision = 0.0;      // tau (continuous) or nu (discrete)
    double bound = 0.0;          // 2^-precision
    double empirical_gap = 0.0;  // metric distance between the probes
    bool certified = false;

    [[nodiscard]] const GridFunction& grid_value() const { return std::get<GridFunction>(value); }
    [[nodiscard]] double scalar_value() const { return std::get<double>(value); }
};

/// Continuous limit by two-probe evaluation at T(tau) and T(tau+1):
/// returns u(T(tau+1)) with bound 2^-tau, certified when the probe gap under
/// the metric stays below the bound.
inline CertifiedLimit continuous_limit(const std::function<GridFunction(double)>& probe,
                                       const Modulus& modulus, double tau,
                                       const PseudonormFamily& family,
                                       const MetricConfig& cfg = {}) {
    if (tau < 0) throw std::invalid_argument("continuous_limit: tau must be nonnegative");
    if (modulus.flavor() != Modulus::Flavor::Continuous)
        throw std::invalid_argument("continuous_limit: needs a continuous modulus");
    if (!modulus.check_nondecreasing(0.0, tau + 1.0))
        throw std::invalid_argument("continuous_limit: modulus must be nonnegative and nondecreasing");
    double t1 = modulus(tau);
    double t2 = modulus(tau + 1.0);
    GridFunction u1 = probe(t1);
    GridFunction u2 = probe(t2);
    CertifiedLimit out;
    out.precision = tau;
    out.bound = std::exp2(-tau);
    out.empirical_gap = metric(u1, u2, family, cfg);
    out.certified = out.empirical_gap < out.bound;
    out.value = std::move(u2);
    return out;
}

/// Discrete limit by two-probe evaluation at N(nu) and N(nu+1).
inline CertifiedLimit discrete_limit(std::span<const GridFunction> seq, const Modulus& modulus,
                                     int nu, const PseudonormFamily& family,
                                     const MetricConfig& cfg = {}) {
    if (nu < 0) throw std::invalid_argument("discrete_limit: nu must be nonnegative");
    if (modulus.flavor() != Modulus::Flavor::Discrete)
        throw std::invalid_argument("discrete_limit: needs a discrete modulus");
    int n1 = modulus.at_index(nu);
    int n2 = modulus.at_index(nu + 1);
    if (n1 < 0 || n2 < 0 || static_cast<std::size_t>(n2) >= seq.size() ||
        static_cast<std::size_t>(n1) >= seq.size())
        throw std::out_of_range("discrete_limit: sequence too short for the probe indices");
    CertifiedLimit out;
    out.precision = nu;
    out.bound = std::exp2(-nu);
    out.empirical_gap = metric(seq[static_cast<std::size_t>(n1)],
                               seq[static_cast<std::size_t>(n2)], family, cfg);
    out.certified = out.empirical_gap < out.bound;
    out.value = seq[static_cast<std::size_t>(n2)];
    return out;
}

/// Composition u . T: turns a modulus-convergent stream into an
/// identity-convergent one.
inline std::function<GridFunction(double)> reindex_by_modulus(
    std::function<GridFunction(double)> u, Modulus modulus) {
    if (modulus.flavor() != Modulus::Flavor::Continuous)
        throw std::invalid_argument("reindex_by_modulus: needs a continuous modulus");
    return [u = std::move(u), modulus = std::move(modulus)](double t) { return u(modulus(t)); };
}

/// Composition g . N for sequences.
inline std::function<GridFunction(int)> reindex_by_modulus(
    std::function<GridFunction(int)> g, Modulus modulus) {
    if (modulus.flavor() != Modulus::Flavor::Discrete)
        throw std::invalid_argument("reindex_by_modulus: needs a discrete modulus");
    return [g = std::move(g), modulus = std::move(modulus)](int n) {
        return g(modulus.at_index(n));
    };
}

/// Shifted-argument conversion: a metric modulus m yields the pseudonorm
/// modulus (n, tau) -> m(n + tau), same flavor.
inline PseudonormModulus metric_to_pseudonorm_modulus(const Modulus& m) {
    return PseudonormModulus(m.flavor(),
                             [m](int n, double tau) { return m(n + tau); });
}

/// Max-over-sections conversion back to a metric modulus:
/// discrete N(nu) = max_{n <= nu+1} M(n, nu+1); continuous
/// T(tau) = max_{n <= tau+2} M(n, tau+1), n running from 1.
inline Modulus pseudonorm_to_metric_modulus(const PseudonormModulus& pm) {
    if (pm.flavor() == Modulus::Flavor::Discrete) {
        return Modulus::callable(
            [pm](double nu_real) {
                int nu = static_cast<int>(std::floor(nu_real + 1e-9));
                double best = 0.0;
                for (int n = 1; n <= nu + 1; ++n)
                    best = std::max(best, pm(n, static_cast<double>(nu + 1)));
                return best;
            },
            Modulus::Flavor::Discrete);
    }
    return Modulus::callable(
        [pm](double tau) {
            int max_n = static_cast<int>(std::floor(tau + 2.0 + 1e-9));
            double best = 0.0;
            for (int n = 1; n <= max_n; ++n) best = std::max(best, pm(n, tau + 1.0));
            return best;
        },
        Modulus::Flavor::Continuous);
}

}  // namespace lgpac
