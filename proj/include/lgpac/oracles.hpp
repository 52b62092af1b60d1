#pragma once

// Reference values computed independently of the network/ODE path: adaptive
// quadrature for the gamma-type integrals and truncated Dirichlet series with
// an integral tail estimate for zeta. Used by tests and the `oracle` CLI
// workflow to score simulated results.

#include <cmath>
#include <functional>
#include <stdexcept>

namespace lgpac {

namespace detail {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa,
                      double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(f, a, m, fa, flm, fm);
    double right = simpson(f, m, b, fm, frm, fb);
    if (depth <= 0) return left + right;
    if (std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol = 1e-12, int max_depth = 48) {
    if (!(b > a)) return 0.0;
    double m = 0.5 * (a + b);
    double fa = f(a), fm = f(m), fb = f(b);
    double whole = detail::simpson(f, a, b, fa, fm, fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Gamma function by quadrature. The integrand is split at 1 and the inner
/// part substituted t = s^2 to keep it smooth near the origin.
inline double gamma_oracle(double x) {
    if (!(x > 0.5)) throw std::invalid_argument("gamma_oracle: x must exceed 0.5");
    double inner = 2.0 * adaptive_simpson(
                             [x](double s) { return std::pow(s, 2 * x - 1) * std::exp(-s * s); },
                             0.0, 1.0, 1e-13);
    double outer = adaptive_simpson(
        [x](double t) { return std::pow(t, x - 1) * std::exp(-t); }, 1.0, 80.0, 1e-13);
    return inner + outer;
}

/// Riemann zeta by direct summation of 10^6 terms (ascending to keep the
/// rounding low) plus the Euler-Maclaurin tail through the x/12 term.
inline double zeta_oracle(double x) {
    if (!(x > 1.2)) throw std::invalid_argument("zeta_oracle: x must exceed 1.2");
    constexpr long N = 1000000;
    double sum = 0.0;
    for (long n = N; n >= 1; --n) sum += std::pow(static_cast<double>(n), -x);
    double a = static_cast<double>(N) + 1.0;
    double tail = std::pow(a, 1.0 - x) / (x - 1.0) + 0.5 * std::pow(a, -x) +
                  x / 12.0 * std::pow(a, -x - 1.0);
    return sum + tail;
}

/// Partial gamma pieces: the two integrands whose limits give the gamma
/// function, integrated to a finite horizon.
inline double gamma1_partial(double t, double x) {
    return adaptive_simpson(
        [x](double s) { return std::pow(1.0 + s, -(x + 1.0)) * std::exp(-1.0 / (1.0 + s)); }, 0.0,
        t, 1e-12);
}

inline double gamma2_partial(double t, double x) {
    return adaptive_simpson(
        [x](double s) { return std::pow(1.0 + s, x - 1.0) * std::exp(-(1.0 + s)); }, 0.0, t,
        1e-12);
}

/// The damped oscillatory integrand of the Abel-Plana representation.
inline double zeta2_closed(double t, double x) {
    return std::sin(x * std::atan(t)) * std::pow(1.0 + t * t, -x / 2.0) *
           std::exp(-M_PI * t - 1.0);
}

/// Partial Abel-Plana integral to horizon t.
inline double zeta1_partial(double t, double x) {
    double head = std::pow(2.0, x) / (x - 1.0);
    double integral = adaptive_simpson([x](double s) { return zeta2_closed(s, x); }, 0.0, t, 1e-13);
    return head - std::pow(2.0, x) * integral;
}

inline double inverter_closed_form(double k, double b_t, double b_0) {
    return k / (1.0 + k * (b_t - b_0));
}

}  // namespace lgpac
