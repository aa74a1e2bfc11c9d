#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "measure.hpp"
#include "specfun.hpp"
#include "tridiag.hpp"

namespace orthodyn {

using namespace std::complex_literals;

// Sigma = {r < Im z < s}; the characteristic function lives on the doubled strip.
struct StripDomain {
    double r{-kInf}, s{kInf};

    bool contains(double y) const { return y > r && y < s; }
    bool doubled_contains(double y) const { return y > 2 * r && y < 2 * s; }
};

inline StripDomain strip_for(const PearsonData& pd) {
    if (pd.family == Family::Laguerre) return {-kInf, -pd.a1 / (2 * pd.b1)};
    return {};
}

// e^{-iJt} on the ladder by diagonalizing truncations of the Jacobi matrix. The
// truncation grows until the evolved state has no weight near the cut.
class LadderEvolver {
public:
    explicit LadderEvolver(JacobiSystem js) : js_(std::move(js)), cache_(std::make_shared<Cache>()) {
        if (js_.infinite()) check_limit_point();
    }

    const JacobiSystem& system() const { return js_; }

    std::shared_ptr<const TridiagEigen> eigen(std::size_t N) const {
        std::lock_guard lock(cache_->mu);
        auto& slot = cache_->eig[N];
        if (!slot) {
            std::vector<double> d(N), e(N ? N - 1 : 0);
            for (std::size_t i = 0; i < N; ++i) d[i] = js_.h(i);
            for (std::size_t i = 0; i + 1 < N; ++i) e[i] = js_.b(i + 1);
            slot = std::make_shared<const TridiagEigen>(tridiag_eigen(std::move(d), std::move(e)));
        }
        return slot;
    }

    // e^{-iJt} psi; the result may be longer than psi.
    std::vector<cplx> evolve(std::span<const cplx> psi, double t) const {
        if (!js_.infinite()) {
            if (psi.size() > js_.dim) throw DomainError("evolve: state longer than the ladder");
            return apply(*eigen(js_.dim), psi, t);
        }
        std::size_t N = 64;
        while (N < 2 * psi.size() + 32) N *= 2;
        double norm = 0.0;
        for (auto c : psi) norm += std::norm(c);
        norm = std::sqrt(norm);
        for (;; N *= 2) {
            if (N > kMaxSize) throw ConvergenceError("evolve: truncation limit reached before the tail vanished");
            auto out = apply(*eigen(N), psi, t);
            double edge = 0.0;
            for (std::size_t i = N - N / 8; i < N; ++i) edge = std::max(edge, std::abs(out[i]));
            if (edge <= 1e-13 * std::max(norm, 1e-300)) return out;
        }
    }

    cplx element(std::size_t m, std::size_t n, double t) const {
        std::vector<cplx> e(n + 1, 0.0);
        e[n] = 1.0;
        auto out = evolve(e, t);
        return m < out.size() ? out[m] : cplx(0.0);
    }

    static constexpr std::size_t kMaxSize = 4096;

private:
    struct Cache {
        std::mutex mu;
        std::map<std::size_t, std::shared_ptr<const TridiagEigen>> eig;
    };

    static std::vector<cplx> apply(const TridiagEigen& eg, std::span<const cplx> psi, double t) {
        const std::size_t N = eg.n, S = std::min(psi.size(), N);
        std::vector<cplx> c(N);
        for (std::size_t j = 0; j < N; ++j) {
            cplx s = 0.0;
            for (std::size_t i = 0; i < S; ++i) s += eg.vec(j, i) * psi[i];
            c[j] = s * std::polar(1.0, -eg.values[j] * t);
        }
        std::vector<double> re(N, 0.0), im(N, 0.0);
        for (std::size_t j = 0; j < N; ++j) {
            double cr = c[j].real(), ci = c[j].imag();
            const double* v = &eg.vectors[j * N];
            for (std::size_t i = 0; i < N; ++i) {
                re[i] += v[i] * cr;
                im[i] += v[i] * ci;
            }
        }
        std::vector<cplx> out(N);
        for (std::size_t i = 0; i < N; ++i) out[i] = {re[i], im[i]};
        return out;
    }

    // Growth faster than linear in b(n) signals a possibly non-self-adjoint ladder.
    void check_limit_point() const {
        double b1 = js_.b(1000), b2 = js_.b(2000);
        if (b1 > 0 && std::log2(b2 / b1) > 1.05)
            throw Unsupported("ladder coefficients grow faster than linearly; sum 1/b(n) may converge");
    }

    JacobiSystem js_;
    std::shared_ptr<Cache> cache_;
};

class PropagatorContext {
public:
    explicit PropagatorContext(const PearsonData& p, std::optional<double> C = std::nullopt)
        : pd(p), sm{p, C ? *C : default_normalization(p)}, js(recurrence(p)), strip(strip_for(p)), evolver(js),
          closed_form_limit(default_closed_form_limit(p.family)) {}

    // largest m + n at which the alternating closed-form sums still hold about 1e-11
    static std::size_t default_closed_form_limit(Family f) {
        switch (f) {
            case Family::Hermite: return 28;
            case Family::Laguerre: return 14;
            case Family::Jacobi: return 12;
        }
        return 12;
    }

    PearsonData pd;
    SpectralMeasure sm;
    JacobiSystem js;
    StripDomain strip;
    LadderEvolver evolver;
    // closed-form sigma_mn is used while m + n stays at or below this
    std::size_t closed_form_limit;
};

namespace detail {

inline void check_doubled_strip(const PropagatorContext& ctx, cplx z, const char* who) {
    if (!ctx.strip.doubled_contains(z.imag()))
        throw StripError(std::string(who) + ": Im z outside the doubled strip");
}

inline double ln_rodrigues(const PropagatorContext& ctx, std::size_t n) {
    return ln_rodrigues_constant(ctx.pd, n, ctx.sm.C);
}

// C Gamma(mu)Gamma(nu)/Gamma(mu+nu) (b-a)^{mu+nu-1} e^{-iaz} 1F1(mu; mu+nu; (a-b) i z)
inline cplx jacobi_sigma(const PropagatorContext& ctx, cplx z, double mu, double nu) {
    const auto& pd = ctx.pd;
    double L = pd.jb - pd.ja;
    double lnK = std::log(ctx.sm.C) + ln_gamma(mu) + ln_gamma(nu) - ln_gamma(mu + nu) + (mu + nu - 1) * std::log(L);
    return std::exp(lnK - 1i * pd.ja * z) * hyp1f1(mu, mu + nu, -1i * L * z);
}

inline double sign_pow(double s, std::size_t n) { return (s < 0 && n % 2) ? -1.0 : 1.0; }

}  // namespace detail

inline cplx char_fn(const PropagatorContext& ctx, cplx z) {
    detail::check_doubled_strip(ctx, z, "char_fn");
    const auto& pd = ctx.pd;
    switch (pd.family) {
        case Family::Hermite: {
            cplx u = z + 1i * pd.a0 / pd.b0;
            return ctx.sm.mass() * std::exp(pd.a0 * pd.a0 / (2 * pd.a1 * pd.b0) + pd.b0 / (2 * pd.a1) * u * u);
        }
        case Family::Laguerre: {
            double kappa = pd.a1 / pd.b1;
            cplx base = 1i * z - kappa;  // Re base > 0 on the doubled strip
            double lnK = std::log(ctx.sm.C) + ln_gamma(pd.mu) - kappa * pd.b0 / pd.b1;
            return std::exp(lnK - pd.mu * std::log(base) + 1i * (pd.b0 / pd.b1) * z);
        }
        case Family::Jacobi:
            return detail::jacobi_sigma(ctx, z, pd.mu, pd.nu);
    }
    return 0.0;
}

inline cplx sigma_n(const PropagatorContext& ctx, std::size_t n, cplx z) {
    detail::check_doubled_strip(ctx, z, "sigma_n");
    const auto& pd = ctx.pd;
    if (n == 0) return char_fn(ctx, z) * rodrigues_constant(pd, 0, ctx.sm.C);
    double sgn = rodrigues_sign(pd, n);
    double x = static_cast<double>(n);
    double lnc = detail::ln_rodrigues(ctx, n);
    switch (pd.family) {
        case Family::Hermite: {
            cplx w = 1i * pd.b0 * z;
            if (w == 0.0) return 0.0;
            return sgn * std::exp(lnc + x * std::log(w)) * char_fn(ctx, z);
        }
        case Family::Laguerre: {
            double kappa = pd.a1 / pd.b1;
            cplx w = pd.b1 * z / (z + 1i * kappa);
            if (w == 0.0) return 0.0;
            return sgn * std::exp(lnc + x * std::log(w) + ln_gamma(pd.mu + x) - ln_gamma(pd.mu)) * char_fn(ctx, z);
        }
        case Family::Jacobi: {
            cplx w = 1i * pd.jscale * z;
            if (w == 0.0) return 0.0;
            return sgn * std::exp(lnc + x * std::log(w)) * detail::jacobi_sigma(ctx, z, pd.mu + x, pd.nu + x);
        }
    }
    return 0.0;
}

// The family closed forms for the matrix elements, in the convention where every
// P_n has positive leading coefficient.
inline cplx sigma_mn_closed(const PropagatorContext& ctx, std::size_t m, std::size_t n, cplx z) {
    detail::check_doubled_strip(ctx, z, "sigma_mn");
    const auto& pd = ctx.pd;
    if (m > n) std::swap(m, n);
    const double mn = static_cast<double>(m + n);
    switch (pd.family) {
        case Family::Hermite: {
            // (-1)^{m+n} i^{m+n} sqrt((-b0/a1)^{m+n} m! n!) sum_k z^{m+n-2k} (a1/b0)^k / ((m-k)!(n-k)!k!)
            cplx u = z + 1i * pd.a0 / pd.b0;
            cplx gauss = std::exp(pd.a0 * pd.a0 / (2 * pd.a1 * pd.b0) + pd.b0 / (2 * pd.a1) * u * u);
            double lnpre = 0.5 * (mn * std::log(-pd.b0 / pd.a1) + detail::ln_factorial(m) + detail::ln_factorial(n));
            cplx sum = 0.0;
            for (std::size_t k = 0; k <= m; ++k) {
                double lnt = k * std::log(std::abs(pd.a1 / pd.b0)) - detail::ln_factorial(m - k) -
                             detail::ln_factorial(n - k) - detail::ln_factorial(k);
                double sg = (pd.a1 / pd.b0 < 0 && k % 2) ? -1.0 : 1.0;
                std::size_t p = m + n - 2 * k;
                cplx zp = p == 0 ? cplx(1.0) : (z == 0.0 ? cplx(0.0) : std::pow(z, static_cast<int>(p)));
                sum += sg * std::exp(lnt + lnpre) * zp;
            }
            cplx ipow = std::pow(-1i, static_cast<int>(m + n));  // (-1)^{m+n} i^{m+n}
            return gauss * ipow * sum;
        }
        case Family::Laguerre: {
            cplx x = 1i * pd.a1 / (pd.b1 * z + 1i * pd.a1);
            double lnpre = detail::ln_rodrigues(ctx, m) + detail::ln_rodrigues(ctx, n) + mn * std::log(std::abs(pd.b1)) +
                           ln_gamma(pd.mu + m) + ln_gamma(pd.mu + n) - 2 * ln_gamma(pd.mu);
            double sg = detail::sign_pow(pd.b1, m + n) * detail::sign_pow(pd.a1, m + n);
            cplx sum = 0.0, xk = 1.0;
            double binom = 1.0;
            for (std::size_t k = 0; k <= m; ++k) {
                sum += binom * xk * hyp2f1_terminating(pd.mu + k, static_cast<unsigned>(n), pd.mu, x);
                xk *= -x;
                binom = binom * (m - k) / (k + 1.0);
            }
            return sg * std::exp(lnpre) * char_fn(ctx, z) * sum;
        }
        case Family::Jacobi: {
            double mu = pd.mu, nu = pd.nu;
            double lnpre = detail::ln_rodrigues(ctx, m) + detail::ln_rodrigues(ctx, n) + mn * std::log(pd.jscale);
            std::vector<cplx> sig(m + n + 1);
            for (std::size_t j = 0; j <= m + n; ++j)
                sig[j] = detail::jacobi_sigma(ctx, z, mu + mn - j, nu + j);
            cplx sum = 0.0;
            for (std::size_t k = 0; k <= m; ++k)
                for (std::size_t l = 0; l <= n; ++l) {
                    double lnt = detail::ln_factorial(m) - detail::ln_factorial(k) - detail::ln_factorial(m - k) +
                                 detail::ln_factorial(n) - detail::ln_factorial(l) - detail::ln_factorial(n - l) +
                                 ln_gamma(mu + m) + ln_gamma(mu + n) - ln_gamma(mu + m - k) - ln_gamma(mu + n - l) +
                                 ln_gamma(nu + m) + ln_gamma(nu + n) - ln_gamma(nu + k) - ln_gamma(nu + l);
                    double sg = ((k + l) % 2) ? -1.0 : 1.0;
                    sum += sg * std::exp(lnt + lnpre) * sig[k + l];
                }
            return sum;
        }
    }
    return 0.0;
}

// int e^{-izw} P_m P_n dsigma by adaptive quadrature of the weight.
inline cplx sigma_mn_quadrature(const PropagatorContext& ctx, std::size_t m, std::size_t n, cplx z) {
    detail::check_doubled_strip(ctx, z, "sigma_mn");
    auto f = [&](double w, bool imag) {
        double p = eval_poly(ctx.js, m, w).value * eval_poly(ctx.js, n, w).value / ctx.sm.mass();
        cplx e = std::exp(-1i * z * w);
        return p * (imag ? e.imag() : e.real());
    };
    double re = integrate_measure(ctx.sm, [&](double w) { return f(w, false); });
    double im = integrate_measure(ctx.sm, [&](double w) { return f(w, true); });
    return {re, im};
}

inline cplx sigma_mn(const PropagatorContext& ctx, std::size_t m, std::size_t n, cplx z) {
    if (z == 0.0) return m == n ? 1.0 : 0.0;
    if (m + n <= ctx.closed_form_limit) return sigma_mn_closed(ctx, m, n, z);
    detail::check_doubled_strip(ctx, z, "sigma_mn");
    if (z.imag() == 0.0) return ctx.evolver.element(m, n, z.real());
    return sigma_mn_quadrature(ctx, m, n, z);
}

// Drop the tail once its norm is below tol relative to the total.
inline void trim_tail(std::vector<cplx>& v, double tol = 1e-12) {
    double total = 0.0;
    for (auto c : v) total += std::norm(c);
    double tail = 0.0;
    std::size_t keep = v.size();
    while (keep > 1) {
        double next = tail + std::norm(v[keep - 1]);
        if (next >= tol * tol * total) break;
        tail = next;
        --keep;
    }
    v.resize(keep);
}

// Coefficients of e^{-iH_I t} psi; components reachable by the closed forms use them.
inline std::vector<cplx> evolve(const PropagatorContext& ctx, std::span<const cplx> coeffs, double t) {
    if (t == 0.0) return {coeffs.begin(), coeffs.end()};
    auto out = ctx.evolver.evolve(coeffs, t);
    trim_tail(out);
    std::size_t top = 0;
    for (std::size_t n = 0; n < coeffs.size(); ++n)
        if (coeffs[n] != 0.0) top = n;
    for (std::size_t m = 0; m < out.size() && m + top <= ctx.closed_form_limit; ++m) {
        cplx s = 0.0;
        for (std::size_t n = 0; n <= top; ++n)
            if (coeffs[n] != 0.0) s += coeffs[n] * sigma_mn_closed(ctx, n, m, t);
        out[m] = s;
    }
    return out;
}

}  // namespace orthodyn
