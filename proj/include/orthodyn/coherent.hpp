#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "measure.hpp"
#include "propagator.hpp"
#include "specfun.hpp"

namespace orthodyn {

// mu(y) with  int mu(y) e^{2 y w} dy * rho(w) = 1  on the support; dmu = mu(y) dx dy / (2 pi).
inline double reproducing_density(const PropagatorContext& ctx, double y) {
    const auto& pd = ctx.pd;
    const double C = ctx.sm.C;
    if (!ctx.strip.contains(y)) throw StripError("reproducing_density: y outside the strip");
    switch (pd.family) {
        case Family::Hermite: {
            double al = -pd.a1 / (2 * pd.b0), c = -pd.a0 / pd.a1;
            return std::exp(-y * y / al - 2 * c * y) / (C * std::sqrt(std::numbers::pi * al));
        }
        case Family::Laguerre: {
            if (!(pd.mu > 1)) throw Unsupported("reproducing_density: Laguerre needs mu > 1");
            double kappa = pd.a1 / pd.b1, u = -2 * y - kappa;
            return 2 / (C * std::tgamma(pd.mu - 1)) * std::exp((pd.mu - 2) * std::log(u) + pd.lo * u);
        }
        case Family::Jacobi: {
            double al = pd.mu - 1, be = pd.nu - 1, L = pd.jb - pd.ja;
            double ln_pre = std::log(2 / C) + (1 - al - be) * std::log(L) - 2 * pd.ja * y;
            double tau = 2 * L * y, at = std::abs(tau);
            auto from_log = [&](double ln_rest, double factor) {
                return factor > 0 ? std::exp(ln_pre + ln_rest + std::log(factor)) : 0.0;
            };
            if (pd.mu == pd.nu && pd.mu > 1) {
                // Gegenbauer: modified Bessel form
                const double ln_sqrt_pi = 0.5 * std::log(std::numbers::pi);
                if (tau == 0.0) {
                    if (al <= 0.5) return kInf;
                    return from_log(ln_gamma(al - 0.5) + (2 * al - 1) * std::log(2.0) - std::log(2.0) - ln_sqrt_pi -
                                        ln_gamma(al), 1.0);
                }
                return from_log((al - 0.5) * std::log(at) - tau / 2 - ln_sqrt_pi - ln_gamma(al), bessel_k(al - 0.5, at / 2));
            }
            if (!(pd.mu + pd.nu > 3) || !(al > 0) || !(be > 0))
                throw Unsupported("reproducing_density: Jacobi needs mu, nu > 1 and mu + nu > 3 (or mu = nu > 1)");
            // Whittaker form with W_{k,l}(x) = e^{-x/2} x^{l+1/2} U(l-k+1/2, 1+2l, x) folded in
            if (tau == 0.0) return from_log(ln_gamma(al + be - 1) - ln_gamma(al) - ln_gamma(be), 1.0);
            if (tau > 0) return from_log((al + be - 1) * std::log(at) - at - ln_gamma(be), hyperu(al, al + be, at));
            return from_log((al + be - 1) * std::log(at) - ln_gamma(al), hyperu(be, al + be, at));
        }
    }
    return 0.0;
}

// <z|v> = sigma(v - conj z)
inline cplx kernel(const PropagatorContext& ctx, cplx z, cplx v) { return char_fn(ctx, v - std::conj(z)); }

// Psi(z) = int e^{-izw} conj(psi(w)) dsigma for psi = sum c_n P_n.
inline cplx holomorphic_transform(const PropagatorContext& ctx, std::span<const cplx> coeffs, cplx z) {
    if (!ctx.strip.contains(z.imag())) throw StripError("holomorphic_transform: z outside the strip");
    cplx s = 0.0;
    for (std::size_t n = 0; n < coeffs.size(); ++n)
        if (coeffs[n] != 0.0) s += std::conj(coeffs[n]) * sigma_n(ctx, n, z);
    return s;
}

// The same transform for a function given in the spectral picture.
inline cplx holomorphic_transform(const PropagatorContext& ctx, const std::function<cplx(double)>& psi, cplx z) {
    if (!ctx.strip.contains(z.imag())) throw StripError("holomorphic_transform: z outside the strip");
    auto part = [&](bool imag) {
        return integrate_measure(ctx.sm, [&](double w) {
            cplx v = std::exp(-1i * z * w) * std::conj(psi(w)) / ctx.sm.mass();
            return imag ? v.imag() : v.real();
        });
    };
    return {part(false), part(true)};
}

// <H_I>_z = (1/2) d/dy ln sigma(2iy)
inline double mean_energy(const PropagatorContext& ctx, cplx z) {
    const auto& pd = ctx.pd;
    double y = z.imag();
    if (!ctx.strip.contains(y)) throw StripError("mean_energy: Im z outside the strip");
    switch (pd.family) {
        case Family::Hermite:
            return -2 * pd.b0 * y / pd.a1 - pd.a0 / pd.a1;
        case Family::Laguerre:
            return pd.mu / (-2 * y - pd.a1 / pd.b1) - pd.b0 / pd.b1;
        case Family::Jacobi: {
            double L = pd.jb - pd.ja, s = pd.mu + pd.nu, X = 2 * L * y;
            cplx r = hyp1f1(pd.mu + 1, s + 1, X) / hyp1f1(pd.mu, s, X);
            return pd.ja + L * pd.mu / s * r.real();
        }
    }
    return 0.0;
}

// -(1/2) d^2/dy^2 ln sigma(2iy) = -d<H_I>/dy
inline double omega_density(const PropagatorContext& ctx, double y) {
    const auto& pd = ctx.pd;
    if (!ctx.strip.contains(y)) throw StripError("omega_density: y outside the strip");
    switch (pd.family) {
        case Family::Hermite:
            return 2 * pd.b0 / pd.a1;
        case Family::Laguerre: {
            double u = -2 * y - pd.a1 / pd.b1;
            return -2 * pd.mu / (u * u);
        }
        case Family::Jacobi: {
            double L = pd.jb - pd.ja, s = pd.mu + pd.nu, X = 2 * L * y, mu = pd.mu;
            double m0 = hyp1f1(mu, s, X).real(), m1 = hyp1f1(mu + 1, s + 1, X).real(),
                   m2 = hyp1f1(mu + 2, s + 2, X).real();
            double dr = ((mu + 1) / (s + 1) * m2 * m0 - mu / s * m1 * m1) / (m0 * m0);
            return -2 * L * L * mu / s * dr;
        }
    }
    return 0.0;
}

// <m| alpha |n> = i int P_m P_n' dsigma, exact by a Gauss rule.
inline cplx alpha_element(const PropagatorContext& ctx, std::size_t m, std::size_t n) {
    if (m >= n) return 0.0;
    auto q = gauss_rule(ctx.js, std::min<std::size_t>((m + n) / 2 + 2, ctx.js.dim));
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i)
        s += q.weights[i] * eval_poly(ctx.js, m, q.nodes[i]).value * eval_poly(ctx.js, n, q.nodes[i]).d1;
    return 1i * s;
}

// int f(z) dmu over x in [-xhalf, xhalf], y in [ylo, yhi], composite 20-point Gauss panels.
template <class F>
cplx integrate_reproducing(const PropagatorContext& ctx, F&& f, double xhalf, double ylo, double yhi,
                           int xpanels = 32, int ypanels = 32) {
    using G = boost::math::quadrature::gauss<double, 20>;
    auto nodes = [](double lo, double hi, int panels) {
        std::vector<std::pair<double, double>> out;
        double h = (hi - lo) / panels;
        const auto& ab = G::abscissa();
        const auto& wt = G::weights();
        for (int p = 0; p < panels; ++p) {
            double c = lo + (p + 0.5) * h, r = h / 2;
            for (std::size_t i = 0; i < ab.size(); ++i) {
                if (ab[i] == 0.0) {
                    out.emplace_back(c, wt[i] * r);
                } else {
                    out.emplace_back(c - r * ab[i], wt[i] * r);
                    out.emplace_back(c + r * ab[i], wt[i] * r);
                }
            }
        }
        return out;
    };
    auto xs = nodes(-xhalf, xhalf, xpanels), ys = nodes(ylo, yhi, ypanels);
    cplx total = 0.0;
    for (const auto& [y, wy] : ys) {
        double my = reproducing_density(ctx, y);
        cplx row = 0.0;
        for (const auto& [x, wx] : xs) row += wx * f(cplx(x, y));
        total += wy * my * row;
    }
    return total / (2 * std::numbers::pi);
}

}  // namespace orthodyn
