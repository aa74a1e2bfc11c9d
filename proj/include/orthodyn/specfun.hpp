#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "errors.hpp"

namespace orthodyn {

using cplx = std::complex<double>;

struct SeriesControl {
    double rel_tol{1e-14};
    std::size_t max_terms{10000};
};

inline double ln_gamma(double x) {
    if (!(x > 0)) throw DomainError("ln_gamma: argument must be positive");
    return boost::math::lgamma(x);
}

namespace detail {

inline bool nonpositive_integer(double b) {
    return b <= 0 && b == std::floor(b);
}

// ln of the Pochhammer symbol (x)_n for x > 0.
inline double ln_poch(double x, double n) {
    return ln_gamma(x + n) - ln_gamma(x);
}

inline double ln_factorial(std::size_t n) {
    return ln_gamma(static_cast<double>(n) + 1.0);
}

}  // namespace detail

inline cplx hyp1f1(double a, double b, cplx z, const SeriesControl& ctl = {}) {
    if (detail::nonpositive_integer(b)) throw DomainError("hyp1f1: b is a pole");
    cplx term = 1.0, sum = 1.0;
    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        double ak = a + static_cast<double>(k);
        if (ak == 0.0) return sum;
        double ratio_scale = ak / ((b + static_cast<double>(k)) * (static_cast<double>(k) + 1.0));
        term *= ratio_scale * z;
        sum += term;
        if (std::abs(term) <= ctl.rel_tol * std::abs(sum) && std::abs(ratio_scale * z) < 1.0)
            return sum;
        if (!std::isfinite(std::abs(sum))) break;
    }
    throw ConvergenceError("hyp1f1: series did not converge");
}

// 2F1(a, -n; c; z), a finite sum of n+1 terms.
inline cplx hyp2f1_terminating(double a, unsigned n, double c, cplx z) {
    cplx term = 1.0, sum = 1.0;
    for (unsigned k = 0; k < n; ++k) {
        double ck = c + k;
        if (ck == 0.0) throw DomainError("hyp2f1_terminating: parameter pole inside the sum");
        term *= (a + k) * (-static_cast<double>(n) + k) / (ck * (k + 1.0)) * z;
        sum += term;
    }
    return sum;
}

inline double hyp_pfq(const std::vector<double>& num, const std::vector<double>& den, double x,
                      const SeriesControl& ctl = {}) {
    for (double d : den)
        if (detail::nonpositive_integer(d)) throw DomainError("hyp_pfq: denominator parameter is a pole");
    bool terminating = false;
    for (double a : num)
        if (detail::nonpositive_integer(a)) terminating = true;
    if (!terminating && x != 0.0) {
        if (num.size() > den.size() + 1) throw ConvergenceError("hyp_pfq: divergent series (p > q+1)");
        if (num.size() == den.size() + 1 && std::abs(x) >= 1.0)
            throw ConvergenceError("hyp_pfq: divergent series (|x| >= 1 with p = q+1)");
    }
    double term = 1.0, sum = 1.0;
    std::size_t growing = 0;
    for (std::size_t k = 0; k < ctl.max_terms; ++k) {
        double r = x / (static_cast<double>(k) + 1.0);
        for (double a : num) r *= a + static_cast<double>(k);
        for (double d : den) r /= d + static_cast<double>(k);
        if (r == 0.0) return sum;
        term *= r;
        sum += term;
        growing = std::abs(r) >= 1.0 ? growing + 1 : 0;
        if (growing > 2000) throw ConvergenceError("hyp_pfq: term ratio stays >= 1");
        if (std::abs(term) <= ctl.rel_tol * std::abs(sum) && std::abs(r) < 1.0) return sum;
    }
    throw ConvergenceError("hyp_pfq: max_terms exceeded");
}

// Tricomi U(a, b, x) for x > 0. Euler integral when a > 0; polynomial when a is a
// nonpositive integer.
inline double hyperu(double a, double b, double x) {
    if (!(x > 0)) throw DomainError("hyperu: x must be positive");
    if (a == 0.0) return 1.0;
    if (detail::nonpositive_integer(a)) {
        auto m = static_cast<unsigned>(-a);
        double sum = 0.0, binom = 1.0;
        for (unsigned s = 0; s <= m; ++s) {
            double poch = 1.0;
            for (unsigned j = 0; j < m - s; ++j) poch *= b + s + j;
            sum += binom * poch * std::pow(-x, static_cast<double>(s));
            binom = binom * (m - s) / (s + 1.0);
        }
        return (m % 2 ? -1.0 : 1.0) * sum;
    }
    if (!(a > 0)) throw Unsupported("hyperu: Re a <= 0 is not supported");
    // t = s/x scales the exponential to e^{-s}; s = u^{1/a} removes the s^{a-1} endpoint singularity.
    double inv_a = 1.0 / a;
    auto f = [&](double u) {
        if (u == 0.0) return inv_a;
        double t = std::pow(u, inv_a);
        double v = std::exp(-t + (b - a - 1.0) * std::log1p(t / x));
        return std::isfinite(v) ? v * inv_a : 0.0;
    };
    boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    double val = integrator.integrate(f, 1e-14, &err);
    return val * std::exp(-a * std::log(x) - ln_gamma(a));
}

inline double whittaker_w(double kappa, double lam, double x) {
    if (!(x > 0)) throw DomainError("whittaker_w: x must be positive");
    double l = std::abs(lam);  // W is even in lambda
    double a = l - kappa + 0.5;
    if (!(a > 0) && !(detail::nonpositive_integer(a)))
        throw Unsupported("whittaker_w: lambda - kappa + 1/2 <= 0 is not supported");
    return std::exp(-0.5 * x) * std::pow(x, l + 0.5) * hyperu(a, 1.0 + 2.0 * l, x);
}

inline double bessel_k(double alpha, double x) {
    if (!(x > 0)) throw DomainError("bessel_k: x must be positive");
    // e^{-x} K_alpha(x) = int_0^inf e^{-x(cosh t - 1)} cosh(alpha t) dt, peaked where x sinh t = |alpha|
    const double a = std::abs(alpha);
    auto ln_f = [&](double t) { return -x * (std::cosh(t) - 1.0) + a * t; };
    double peak = std::asinh(a / x);
    double top = ln_f(peak), upper = peak + std::min(1.0, 1.0 / std::sqrt(x + a));
    while (ln_f(upper) > top - 50.0) upper = peak + 2 * (upper - peak);
    auto f = [&](double t) {
        double e = -x * (std::cosh(t) - 1.0);
        return 0.5 * (std::exp(e + a * t - top) + std::exp(e - a * t - top));
    };
    double err = 0.0;
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double val = GK::integrate(f, 0.0, peak, 12, 1e-13, &err) + GK::integrate(f, peak, upper, 12, 1e-13, &err);
    return val * std::exp(top - x);
}

}  // namespace orthodyn
