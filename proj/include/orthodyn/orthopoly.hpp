#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>

#include "errors.hpp"
#include "specfun.hpp"

namespace orthodyn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr std::size_t kInfiniteDim = std::numeric_limits<std::size_t>::max();

enum class Family { Hermite, Laguerre, Jacobi };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Hermite: return "hermite";
        case Family::Laguerre: return "laguerre";
        case Family::Jacobi: return "jacobi";
    }
    return "?";
}

// Raw polynomial coefficients: A(w) = a1 w + a0, B(w) = b2 w^2 + b1 w + b0.
struct PearsonRaw {
    double a1{0}, a0{0}, b2{0}, b1{0}, b0{0};
};

struct PearsonData {
    double a1{0}, a0{0}, b2{0}, b1{0}, b0{0};
    double lo{-kInf}, hi{kInf};
    Family family{Family::Hermite};
    double mu{0}, nu{0};
    // Jacobi only: B = jscale (w - ja)(jb - w) with jscale = -b2 > 0.
    double ja{0}, jb{0}, jscale{0};

    double A(double w) const { return a1 * w + a0; }
    double B(double w) const { return (b2 * w + b1) * w + b0; }
    double dB(double w) const { return 2 * b2 * w + b1; }
};

struct JacobiSystem {
    std::function<double(std::size_t)> b;
    std::function<double(std::size_t)> h;
    std::size_t dim{kInfiniteDim};
    double gamma0{0};

    bool infinite() const { return dim == kInfiniteDim; }
};

inline PearsonData classify(const PearsonRaw& r, std::optional<std::pair<double, double>> support = {}) {
    PearsonData pd;
    pd.a1 = r.a1; pd.a0 = r.a0; pd.b2 = r.b2; pd.b1 = r.b1; pd.b0 = r.b0;
    auto fail = [](const std::string& cond) { throw ConstraintViolated("classify: " + cond + " violated", cond); };
    if (r.b2 != 0.0) {
        pd.family = Family::Jacobi;
        if (!(r.b2 < 0)) fail("b2<0 (B = b2 (w-a)(b-w) with b2>0)");
        double disc = r.b1 * r.b1 - 4 * r.b2 * r.b0;
        if (!(disc > 0)) fail("two distinct real roots of B");
        double sq = std::sqrt(disc);
        double x1 = (-r.b1 + sq) / (2 * r.b2), x2 = (-r.b1 - sq) / (2 * r.b2);
        pd.ja = std::min(x1, x2);
        pd.jb = std::max(x1, x2);
        pd.jscale = -r.b2;
        pd.lo = pd.ja;
        pd.hi = pd.jb;
        pd.mu = (pd.ja * r.a1 + r.a0) / (pd.jscale * (pd.jb - pd.ja));
        pd.nu = (pd.jb * r.a1 + r.a0) / (pd.jscale * (pd.ja - pd.jb));
        if (!(pd.mu > 0)) fail("mu>0");
        if (!(pd.nu > 0)) fail("nu>0");
    } else if (r.b1 != 0.0) {
        pd.family = Family::Laguerre;
        if (!(r.a1 / r.b1 < 0)) fail("a1/b1<0");
        pd.mu = (r.a0 * r.b1 - r.b0 * r.a1) / (r.b1 * r.b1);
        if (!(pd.mu > 0)) fail("mu>0");
        pd.lo = -r.b0 / r.b1;
        pd.hi = kInf;
    } else {
        pd.family = Family::Hermite;
        if (r.b0 == 0.0) fail("b0!=0");
        if (!(r.a1 / r.b0 < 0)) fail("a1/b0<0");
    }
    if (support) {
        auto close = [](double x, double y) { return x == y || std::abs(x - y) <= 1e-12 * (1 + std::abs(x)); };
        if (!close(support->first, pd.lo) || !close(support->second, pd.hi)) fail("support matching the roots of B");
    }
    return pd;
}

inline PearsonData hermite(double a1, double a0, double b0) {
    return classify({.a1 = a1, .a0 = a0, .b0 = b0});
}

inline PearsonData laguerre(double a1, double a0, double b1, double b0) {
    return classify({.a1 = a1, .a0 = a0, .b1 = b1, .b0 = b0});
}

// a1 = -1, b1 = 1, b0 = 0: weight w^{mu-1} e^{-w} on (0, inf).
inline PearsonData laguerre_canonical(double mu) {
    return laguerre(-1.0, mu, 1.0, 0.0);
}

// Weight (w-a)^{mu-1} (b-w)^{nu-1} on (a, b); scale is the positive factor in B.
inline PearsonData jacobi(double a, double b, double mu, double nu, double scale = 1.0) {
    if (!(a < b)) throw ConstraintViolated("jacobi: a<b violated", "a<b");
    double a1 = -scale * (mu + nu);
    double a0 = scale * (mu * b + nu * a);
    auto pd = classify({.a1 = a1, .a0 = a0, .b2 = -scale, .b1 = scale * (a + b), .b0 = -scale * a * b});
    // keep the exact endpoints and exponents rather than the root-finder's rounding
    pd.ja = pd.lo = a;
    pd.jb = pd.hi = b;
    pd.mu = mu;
    pd.nu = nu;
    return pd;
}

inline PearsonData legendre() { return jacobi(-1.0, 1.0, 1.0, 1.0); }

inline JacobiSystem recurrence(const PearsonData& pd) {
    JacobiSystem js;
    switch (pd.family) {
        case Family::Hermite: {
            double s = -pd.b0 / pd.a1, h0 = -pd.a0 / pd.a1;
            js.b = [s](std::size_t n) { return n == 0 ? 0.0 : std::sqrt(s * static_cast<double>(n)); };
            js.h = [h0](std::size_t) { return h0; };
            break;
        }
        case Family::Laguerre: {
            double k = -pd.b1 / pd.a1, mu = pd.mu, shift = -pd.b0 / pd.b1;
            js.b = [k, mu](std::size_t n) {
                if (n == 0) return 0.0;
                double x = static_cast<double>(n);
                return k * std::sqrt(x * (x + mu - 1.0));
            };
            js.h = [k, mu, shift](std::size_t n) { return k * (2.0 * static_cast<double>(n) + mu) + shift; };
            break;
        }
        case Family::Jacobi: {
            double a = pd.ja, b = pd.jb, mu = pd.mu, nu = pd.nu;
            js.b = [a, b, mu, nu](std::size_t n) {
                if (n == 0) return 0.0;
                double x = static_cast<double>(n), s = mu + nu;
                double den = (s + 2 * x - 3) * (s + 2 * x - 2) * (s + 2 * x - 2) * (s + 2 * x - 1);
                if (den == 0.0)  // n = 1, mu + nu = 1: cancel the common factor
                    return (b - a) * std::sqrt(mu * nu / (s * s * (s + 1)));
                double num = x * (mu + x - 1) * (nu + x - 1) * (s + x - 2);
                return (b - a) * std::sqrt(num / den);
            };
            js.h = [a, b, mu, nu](std::size_t n) {
                double x = static_cast<double>(n), s = mu + nu;
                double den = (s + 2 * x - 2) * (s + 2 * x);
                if (den == 0.0)  // n = 0, mu + nu = 2
                    return (b * mu + a * nu) / s;
                double num = 2 * x * (a + b) * (s - 1) + 2 * x * x * (a + b) - 2 * b * mu - 2 * a * nu +
                             mu * nu * (a + b) + b * mu * mu + a * nu * nu;
                return num / den;
            };
            break;
        }
    }
    return js;
}

struct PolyValue {
    double value{0}, d1{0}, d2{0};
};

inline PolyValue eval_poly(const JacobiSystem& js, std::size_t n, double w, double p0 = 1.0) {
    if (n >= js.dim) throw DomainError("eval_poly: n >= dim");
    double p = p0, dp = 0, ddp = 0;
    double pm = 0, dpm = 0, ddpm = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double bk = js.b(k), bk1 = js.b(k + 1), c = w - js.h(k);
        double pn = (c * p - bk * pm) / bk1;
        double dpn = (c * dp + p - bk * dpm) / bk1;
        double ddpn = (c * ddp + 2 * dp - bk * ddpm) / bk1;
        pm = p; dpm = dp; ddpm = ddp;
        p = pn; dp = dpn; ddp = ddpn;
    }
    return {p, dp, ddp};
}

// ln c_n, with c_n of Rodrigues' formula P_n = c_n / rho * d^n/dw^n (rho B^n).
inline double ln_rodrigues_constant(const PearsonData& pd, std::size_t n, double C) {
    if (!(C > 0)) throw DomainError("rodrigues_constant: C must be positive");
    double x = static_cast<double>(n);
    double lnv = std::log(C) + detail::ln_factorial(n);
    switch (pd.family) {
        case Family::Hermite:
            lnv += x * std::log(-pd.a1 * pd.b0) + 0.5 * std::log(-2 * std::numbers::pi * pd.b0 / pd.a1);
            break;
        case Family::Laguerre:
            lnv += x * std::log(-pd.a1 * pd.b1) + (pd.mu + x) * std::log(-pd.b1 / pd.a1) + ln_gamma(pd.mu + x) -
                   pd.a1 * pd.b0 / (pd.b1 * pd.b1);
            break;
        case Family::Jacobi: {
            double s = pd.mu + pd.nu;
            lnv += 2 * x * std::log(pd.jscale) + (s + 2 * x - 1) * std::log(pd.jb - pd.ja) + ln_gamma(pd.mu + x) +
                   ln_gamma(pd.nu + x);
            // (s + 2n - 1) Gamma(s + n - 1) reduces to Gamma(s) at n = 0, also when s = 1
            lnv -= n == 0 ? ln_gamma(s) : std::log(s + 2 * x - 1) + ln_gamma(s + x - 1);
            break;
        }
    }
    return -0.5 * lnv;
}

inline double rodrigues_constant(const PearsonData& pd, std::size_t n, double C) {
    return std::exp(ln_rodrigues_constant(pd, n, C));
}

// Sign of the leading coefficient of the Rodrigues polynomial; the recurrence
// polynomials (positive leading coefficient) equal rodrigues_sign * Rodrigues.
inline double rodrigues_sign(const PearsonData& pd, std::size_t n) {
    double s = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        double f = pd.a1 + static_cast<double>(n - 1 + k) * pd.b2;
        if (f < 0) s = -s;
    }
    return s;
}

inline double ode_eigenvalue(const PearsonData& pd, std::size_t n) {
    double x = static_cast<double>(n);
    return pd.a1 * x + pd.b2 * x * (x - 1);
}

inline double ode_residual(const PearsonData& pd, const JacobiSystem& js, std::size_t n, double w) {
    auto v = eval_poly(js, n, w);
    return std::abs(pd.A(w) * v.d1 + pd.B(w) * v.d2 - ode_eigenvalue(pd, n) * v.value);
}

inline PearsonData derivative_pearson(const PearsonData& pd, std::size_t k) {
    double x = static_cast<double>(k);
    return classify({.a1 = pd.a1 + 2 * x * pd.b2, .a0 = pd.a0 + x * pd.b1, .b2 = pd.b2, .b1 = pd.b1, .b0 = pd.b0});
}

struct StrongFieldParams {
    double a1{-2}, b0{1};               // Hermite
    double l_a1{-1}, l_b1{1};           // Laguerre
    double ja{-1}, jb{1}, jscale{1};    // Jacobi
};

inline PearsonData strong_field(Family f, const StrongFieldParams& p = {}) {
    switch (f) {
        case Family::Hermite: return hermite(p.a1, 0.0, p.b0);
        case Family::Laguerre: {
            double b0 = -p.l_b1 * p.l_b1 / p.l_a1;
            double a0 = (p.l_b1 * p.l_b1 + b0 * p.l_a1) / p.l_b1;  // mu = 1
            return laguerre(p.l_a1, a0, p.l_b1, b0);
        }
        case Family::Jacobi: return jacobi(p.ja, p.jb, 1.5, 1.5, p.jscale);
    }
    throw DomainError("strong_field: unknown family");
}

}  // namespace orthodyn
