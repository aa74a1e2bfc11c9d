#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "orthopoly.hpp"
#include "tridiag.hpp"

namespace orthodyn {

// Weight normalization making the measure a probability measure.
inline double default_normalization(const PearsonData& pd) {
    switch (pd.family) {
        case Family::Hermite:
            return 1.0 / std::sqrt(-2 * std::numbers::pi * pd.b0 / pd.a1);
        case Family::Laguerre:
            return std::exp(-(ln_gamma(pd.mu) + pd.mu * std::log(-pd.b1 / pd.a1) - pd.a1 * pd.b0 / (pd.b1 * pd.b1)));
        case Family::Jacobi:
            return std::exp(-((pd.mu + pd.nu - 1) * std::log(pd.jb - pd.ja) + ln_gamma(pd.mu) + ln_gamma(pd.nu) -
                              ln_gamma(pd.mu + pd.nu)));
    }
    return 1.0;
}

struct SpectralMeasure {
    PearsonData pd;
    double C{1.0};

    double density(double w) const {
        if (!(w > pd.lo) || !(w < pd.hi)) return 0.0;
        return density_at(w, w - pd.lo, pd.hi - w);
    }

    // density with the distances to the support endpoints supplied separately,
    // so quadrature nodes clustered at an endpoint keep full relative precision
    double density_at(double w, double dlo, double dhi) const {
        if (!(dlo > 0) || !(dhi > 0)) return 0.0;
        switch (pd.family) {
            case Family::Hermite: {
                double u = w + pd.a0 / pd.a1;
                return C * std::exp(pd.a1 / (2 * pd.b0) * u * u);
            }
            case Family::Laguerre:
                return C * std::exp((pd.mu - 1) * std::log(dlo) + pd.a1 / pd.b1 * w);
            case Family::Jacobi:
                return C * std::exp((pd.mu - 1) * std::log(dlo) + (pd.nu - 1) * std::log(dhi));
        }
        return 0.0;
    }

    // total mass; 1 under the default normalization
    double mass() const { return C / default_normalization(pd); }
};

inline double density(const SpectralMeasure& sm, double w) { return sm.density(w); }

inline SpectralMeasure normalize(const PearsonData& pd) { return {pd, default_normalization(pd)}; }

// Integral of f over [lo, hi] (either end may be infinite), split at the given interior points.
template <class F>
double integrate_line(F&& f, double lo, double hi, std::vector<double> splits = {}, double tol = 1e-13) {
    std::vector<double> pts{lo};
    std::sort(splits.begin(), splits.end());
    for (double s : splits)
        if (s > lo && s < hi) pts.push_back(s);
    pts.push_back(hi);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        double a = pts[i], b = pts[i + 1];
        double err = 0.0;
        if (std::isinf(a) && std::isinf(b)) {
            boost::math::quadrature::sinh_sinh<double> q;
            total += q.integrate(f, tol, &err);
        } else if (std::isinf(b)) {
            boost::math::quadrature::exp_sinh<double> q;
            total += q.integrate([&](double u) { return f(a + u); }, 0.0, kInf, tol, &err);
        } else if (std::isinf(a)) {
            boost::math::quadrature::exp_sinh<double> q;
            total += q.integrate([&](double u) { return f(b - u); }, 0.0, kInf, tol, &err);
        } else {
            boost::math::quadrature::tanh_sinh<double> q;
            total += q.integrate(f, a, b, tol, &err);
        }
    }
    return total;
}

// Integral of f(w) dsigma(w), split at 0 and near the bulk of the weight.
template <class F>
double integrate_measure(const SpectralMeasure& sm, F&& f, double tol = 1e-13) {
    const auto& pd = sm.pd;
    if (pd.family == Family::Jacobi) {
        double a = pd.ja, b = pd.jb;
        std::vector<double> pts{a};
        if (a < 0 && 0 < b) pts.push_back(0.0);
        pts.push_back(b);
        boost::math::quadrature::tanh_sinh<double> q;
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            double lo = pts[i], hi = pts[i + 1], mid = 0.5 * (lo + hi);
            auto g = [&](double x, double xc) {
                // xc is the signed distance to the nearer end of [lo, hi]
                double dlo = (x < mid && lo == a) ? -xc : x - a;
                double dhi = (x > mid && hi == b) ? xc : b - x;
                double r = sm.density_at(x, dlo, dhi);
                return r == 0.0 ? 0.0 : f(x) * r;
            };
            double err = 0.0;
            total += q.integrate(g, lo, hi, tol, &err);
        }
        return total;
    }
    std::vector<double> splits{0.0};
    if (pd.family == Family::Hermite) splits.push_back(-pd.a0 / pd.a1);
    if (pd.family == Family::Laguerre) splits.push_back(pd.lo + 1.0);
    return integrate_line([&](double w) {
        double r = sm.density(w);
        return r == 0.0 ? 0.0 : f(w) * r;
    }, pd.lo, pd.hi, splits, tol);
}

inline double moment(const SpectralMeasure& sm, unsigned k) {
    if (k == 0) return sm.mass();
    return integrate_measure(sm, [k](double w) { return std::pow(w, static_cast<double>(k)); });
}

inline double absolute_moment(const SpectralMeasure& sm, unsigned k) {
    if (k == 0) return sm.mass();
    return integrate_measure(sm, [k](double w) { return std::pow(std::abs(w), static_cast<double>(k)); });
}

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline QuadratureRule gauss_rule(const JacobiSystem& js, std::size_t N, double mu0 = 1.0) {
    if (N == 0 || N > js.dim) throw DomainError("gauss_rule: need 0 < N <= dim");
    std::vector<double> d(N), e(N > 0 ? N - 1 : 0);
    for (std::size_t i = 0; i < N; ++i) d[i] = js.h(i);
    for (std::size_t i = 0; i + 1 < N; ++i) e[i] = js.b(i + 1);
    auto eig = tridiag_eigen(d, e);
    QuadratureRule q;
    q.nodes = eig.values;
    q.weights.resize(N);
    for (std::size_t k = 0; k < N; ++k) q.weights[k] = mu0 * eig.vec(k, 0) * eig.vec(k, 0);
    return q;
}

// <0| J^k |0> for the truncated Jacobi matrix (exact once N > k/2).
inline double tridiagonal_moment(const JacobiSystem& js, unsigned k) {
    std::size_t N = std::min<std::size_t>(js.dim, k / 2 + 2);
    std::vector<double> v(N, 0.0), w(N, 0.0);
    v[0] = 1.0;
    for (unsigned step = 0; step < k; ++step) {
        for (std::size_t i = 0; i < N; ++i) {
            double s = js.h(i) * v[i];
            if (i > 0) s += js.b(i) * v[i - 1];
            if (i + 1 < N) s += js.b(i + 1) * v[i + 1];
            w[i] = s;
        }
        std::swap(v, w);
    }
    return v[0];
}

// Estimate of R in lim sup |mu|_n^{1/n} / n = 1/(e R); infinite when the sequence decays.
inline double analyticity_radius(const SpectralMeasure& sm, unsigned n_max) {
    if (n_max < 4) throw DomainError("analyticity_radius: n_max must be >= 4");
    auto ln_s = [&](unsigned n) {
        double m = absolute_moment(sm, n);
        return std::log(m) / n - std::log(static_cast<double>(n));
    };
    // least-squares slope of ln s_n against ln n over the last five indices
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const unsigned first = n_max - 4;
    double last = 0.0;
    for (unsigned n = first; n <= n_max; ++n) {
        double x = std::log(static_cast<double>(n)), y = ln_s(n);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        if (n == n_max) last = y;
    }
    double slope = (5 * sxy - sx * sy) / (5 * sxx - sx * sx);
    if (slope < -0.25) return kInf;
    return 1.0 / (std::numbers::e * std::exp(last));
}

}  // namespace orthodyn
