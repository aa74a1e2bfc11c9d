#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "coherent.hpp"
#include "propagator.hpp"
#include "reduction.hpp"
#include "specfun.hpp"

namespace orthodyn {

struct NumberState {
    std::size_t n{0};
};
struct GaussianCoherent {
    cplx zeta;
};
struct SpectralCoherent {
    cplx z;
};
struct FockState {
    std::vector<cplx> coeffs;
};

using QuantumState = std::variant<NumberState, GaussianCoherent, SpectralCoherent, FockState>;

enum class Picture { Interaction, Full };

inline const char* picture_name(Picture p) { return p == Picture::Full ? "full" : "interaction"; }

namespace detail {

// e^{-|zeta|^2/2} zeta^n / sqrt(n!), cut once |zeta|^{2n}/n! e^{-|zeta|^2} drops below 1e-16
inline std::vector<cplx> gaussian_coefficients(cplx zeta) {
    const double r2 = std::norm(zeta);
    std::vector<cplx> out;
    cplx c = std::exp(-r2 / 2);
    for (std::size_t n = 0;; ++n) {
        out.push_back(c);
        double p = std::norm(c);
        if (n > r2 + 2 && p * (n + 1) < 1e-16) break;
        if (n > 5000) throw ConvergenceError("gaussian coherent: series did not converge");
        c *= zeta / std::sqrt(n + 1.0);
    }
    return out;
}

inline std::vector<cplx> normalized(std::vector<cplx> v) {
    double s = 0.0;
    for (auto c : v) s += std::norm(c);
    if (!(s > 0) || !std::isfinite(s)) throw DomainError("state is not normalizable");
    s = std::sqrt(s);
    for (auto& c : v) c /= s;
    return v;
}

// Runs k = 0, 1, ... until the weighted terms (k+1)^power |c_k|^2 have a negligible geometric tail
// and the squared norms have reached their known total of 1.
template <class F>
std::vector<cplx> sum_until_tail(F&& coeff, std::size_t dim, unsigned power, const char* who) {
    std::vector<cplx> out;
    double acc = 0.0, prev = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
        cplx c = coeff(k);
        double p = std::norm(c);
        out.push_back(c);
        acc += p;
        double w = p * std::pow(k + 1.0, power);
        double q = prev > 0 ? p / prev : 0.0;
        prev = p;
        if (k >= 8 && q < 1 && w / (1 - q) < 1e-16 * acc && 1 - acc < 1e-12) return out;
        if (k > 200000) throw ConvergenceError(std::string(who) + ": series did not converge");
    }
    return out;
}

inline std::vector<cplx> initial_coefficients(const QuantumState& s, std::size_t dim) {
    if (auto p = std::get_if<NumberState>(&s)) {
        if (p->n >= dim) throw DomainError("number state beyond the ladder");
        std::vector<cplx> v(p->n + 1, 0.0);
        v[p->n] = 1.0;
        return v;
    }
    if (auto p = std::get_if<GaussianCoherent>(&s)) {
        auto v = gaussian_coefficients(p->zeta);
        if (v.size() > dim) v.resize(dim);
        return normalized(std::move(v));
    }
    if (auto p = std::get_if<FockState>(&s)) {
        if (p->coeffs.size() > dim) throw DomainError("fock state longer than the ladder");
        return normalized(p->coeffs);
    }
    throw Unsupported("spectral coherent states need a polynomial family");
}

}  // namespace detail

// <n|z> / sqrt(<z|z>) at w = z + t; |z> moves to |z + t> under e^{-iH_I t}.
inline std::vector<cplx> spectral_state(const PropagatorContext& ctx, cplx z, double t, unsigned power = 4) {
    if (!ctx.strip.contains(z.imag())) throw StripError("spectral coherent state: z outside the strip");
    double norm = char_fn(ctx, cplx(0, 2 * z.imag())).real();
    double s = 1 / std::sqrt(norm);
    cplx w = z + t;
    return detail::sum_until_tail([&](std::size_t k) { return s * sigma_n(ctx, k, w); }, ctx.js.dim, power,
                                  "spectral_state");
}

// Ladder coefficients of e^{-iH_I t}|state>.
inline std::vector<cplx> state_at(const PropagatorContext& ctx, const QuantumState& s, double t, unsigned power = 4) {
    if (auto p = std::get_if<SpectralCoherent>(&s)) return spectral_state(ctx, p->z, t, power);
    auto v = detail::initial_coefficients(s, ctx.js.dim);
    return evolve(ctx, v, t);
}

// The same for a ladder without a polynomial family behind it.
inline std::vector<cplx> state_at(const LadderEvolver& ev, const QuantumState& s, double t) {
    auto v = detail::initial_coefficients(s, ev.system().dim);
    if (t == 0.0) return v;
    auto out = ev.evolve(v, t);
    trim_tail(out);
    return out;
}

// ---- observables of a coefficient vector ----

inline double ladder_energy(const JacobiSystem& js, std::span<const cplx> v) {
    cplx s = 0.0;
    for (std::size_t n = 0; n < v.size(); ++n) {
        cplx hv = js.h(n) * v[n];
        if (n > 0) hv += js.b(n) * v[n - 1];
        if (n + 1 < v.size()) hv += js.b(n + 1) * v[n + 1];
        s += std::conj(v[n]) * hv;
    }
    return s.real();
}

inline double number_moment_of(std::span<const cplx> v, unsigned l) {
    double s = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) s += std::pow(static_cast<double>(k), l) * std::norm(v[k]);
    return s;
}

// sum_m conj(v_{m+r}) v_{m+s} sqrt((m+r)!(m+s)!)/m!
inline cplx correlation_of(std::span<const cplx> v, unsigned r, unsigned s) {
    cplx out = 0.0;
    for (std::size_t m = 0; m + std::max(r, s) < v.size(); ++m) {
        double lnf = 0.5 * (detail::ln_factorial(m + r) + detail::ln_factorial(m + s)) - detail::ln_factorial(m);
        out += std::conj(v[m + r]) * v[m + s] * std::exp(lnf);
    }
    return out;
}

// sum_k conj(v_{k+r}) v_{k+s} b(k+1)...b(k+r) b(k+1)...b(k+s)
inline cplx cluster_of(const JacobiSystem& js, std::span<const cplx> v, unsigned r, unsigned s) {
    cplx out = 0.0;
    for (std::size_t k = 0; k + std::max(r, s) < v.size(); ++k) {
        double f = 1.0;
        for (unsigned j = 1; j <= r; ++j) f *= js.b(k + j);
        for (unsigned j = 1; j <= s; ++j) f *= js.b(k + j);
        out += f * std::conj(v[k + r]) * v[k + s];
    }
    return out;
}

// ---- state-level API ----

inline double h_expectation(const PropagatorContext& ctx, const QuantumState& s) {
    if (auto p = std::get_if<NumberState>(&s)) {
        if (p->n >= ctx.js.dim) throw DomainError("number state beyond the ladder");
        return ctx.js.h(p->n);
    }
    if (auto p = std::get_if<SpectralCoherent>(&s)) return mean_energy(ctx, p->z);
    return ladder_energy(ctx.js, detail::initial_coefficients(s, ctx.js.dim));
}

inline double number_moment(const PropagatorContext& ctx, const QuantumState& s, unsigned l, double t) {
    if (l == 0) throw DomainError("number_moment: l must be positive");
    return number_moment_of(state_at(ctx, s, t, l + 2), l);
}

inline cplx correlation(const PropagatorContext& ctx, const QuantumState& s, unsigned r, unsigned q, double t) {
    return correlation_of(state_at(ctx, s, t, r + q + 2), r, q);
}

inline cplx cluster_correlation(const PropagatorContext& ctx, const QuantumState& s, unsigned r, unsigned q, double t,
                                Picture pic = Picture::Interaction) {
    cplx v = cluster_of(ctx.js, state_at(ctx, s, t, 2 * (r + q) + 2), r, q);
    if (pic == Picture::Full) v *= std::polar(1.0, -ctx.js.gamma0 * (static_cast<double>(q) - r) * t);
    return v;
}

// <alpha^j> at t = 0
inline cplx alpha_power_mean(const PropagatorContext& ctx, const QuantumState& s, unsigned j) {
    if (j == 0) return 1.0;
    if (std::get_if<NumberState>(&s)) return 0.0;  // alpha is strictly upper triangular
    if (auto p = std::get_if<SpectralCoherent>(&s)) return std::pow(p->z, static_cast<int>(j));
    auto v = detail::initial_coefficients(s, ctx.js.dim);
    const std::size_t K = v.size();
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(K, K);
    for (std::size_t m = 0; m < K; ++m)
        for (std::size_t n = m + 1; n < K; ++n) a(m, n) = alpha_element(ctx, m, n);
    Eigen::VectorXcd x = Eigen::Map<Eigen::VectorXcd>(v.data(), K), y = x;
    for (unsigned i = 0; i < j; ++i) y = a * y;
    return x.dot(y);
}

// <alpha^l(t)> with alpha(t) = alpha + t
inline cplx alpha_moment(const PropagatorContext& ctx, const QuantumState& s, unsigned l, double t) {
    cplx sum = 0.0;
    double binom = 1.0;
    for (unsigned k = 0; k <= l; ++k) {
        sum += binom * std::pow(t, k) * alpha_power_mean(ctx, s, l - k);
        binom = binom * (l - k) / (k + 1.0);
    }
    return sum;
}

// <alpha^2(t)> - <alpha(t)>^2
inline cplx alpha_dispersion(const PropagatorContext& ctx, const QuantumState& s, double t) {
    cplx m1 = alpha_moment(ctx, s, 1, t);
    return alpha_moment(ctx, s, 2, t) - m1 * m1;
}

inline double total_energy(const PropagatorContext& ctx, const QuantumState& s, double t) {
    return ctx.js.gamma0 * number_moment(ctx, s, 1, t) + h_expectation(ctx, s);
}

// ---- closed forms for <N^l(t)>_z, kept as cross-checks of the series ----

struct ClosedFormCheck {
    std::string formula;
    double series{0}, closed{0};

    double deviation() const { return std::abs(series - closed) / std::max(1.0, std::abs(series)); }
    bool agrees(double tol) const { return deviation() <= tol; }
};

inline ClosedFormCheck number_moment_check(const PropagatorContext& ctx, cplx z, unsigned l, double t) {
    const auto& pd = ctx.pd;
    ClosedFormCheck c;
    c.series = number_moment(ctx, SpectralCoherent{z}, l, t);
    const cplx w = z + t;
    const double y = z.imag();
    std::vector<double> twos(l - 1, 2.0), ones(l - 1, 1.0);
    switch (pd.family) {
        case Family::Hermite: {
            c.formula = "hermite: e^{-X} X (l-1)F(l-1)(2..;1..;X), X = (-b0/a1)|z+t|^2";
            double X = -pd.b0 / pd.a1 * std::norm(w);
            c.closed = X == 0.0 ? 0.0 : std::exp(-X) * X * hyp_pfq(twos, ones, X);
            break;
        }
        case Family::Laguerre: {
            c.formula = "laguerre: (k(2y+k))^mu mu|w|^2/|w+ik|^{2mu+2} lF(l-1)(mu+1,2..;1..;|w/(w+ik)|^2)";
            double k = pd.a1 / pd.b1;
            cplx d = w + 1i * k;
            double X = std::norm(w) / std::norm(d);
            std::vector<double> num{pd.mu + 1};
            num.insert(num.end(), twos.begin(), twos.end());
            double pre = std::exp(pd.mu * std::log(k * (2 * y + k)) - (pd.mu + 1) * std::log(std::norm(d)));
            c.closed = X == 0.0 ? 0.0 : pre * pd.mu * std::norm(w) * hyp_pfq(num, ones, X);
            break;
        }
        case Family::Jacobi: {
            c.formula = "jacobi: sum_n c_n^2 |b2 w|^{2n} |sigma(w; mu+n, nu+n)|^2 n^l / sigma(z - conj z)";
            double norm = char_fn(ctx, cplx(0, 2 * y)).real();
            double lnw = std::log(pd.jscale * std::abs(w));
            auto terms = detail::sum_until_tail(
                [&](std::size_t n) {
                    double lnc = ln_rodrigues_constant(pd, n, ctx.sm.C);
                    return cplx(std::exp(lnc + (n ? n * lnw : 0.0)) *
                                std::abs(detail::jacobi_sigma(ctx, w, pd.mu + n, pd.nu + n)) / std::sqrt(norm));
                },
                ctx.js.dim, l + 2, "number_moment_check");
            c.closed = number_moment_of(terms, l);
            break;
        }
    }
    return c;
}

// ---- scenario formulas ----

// two-mode amplifier, mean photon number in mode 0; the coupling is -i g (a0 a1) + h.c. with g real
inline double amplifier_mean_photon(cplx zeta0, cplx zeta1, double g, double t) {
    double c = std::cosh(g * t), s = std::sinh(g * t);
    return std::norm(zeta0 * c + std::conj(zeta1) * s) + s * s;
}

// beta_j = sum_{i >= 1} (alpha^{-1})_{ji} lambda_i
inline std::vector<double> modulation_offsets(const MultiModeSystem& sys, const Sector& sector) {
    Eigen::MatrixXd inv = detail::to_eigen(sys.alpha).inverse();
    std::vector<double> beta(sys.modes(), 0.0);
    for (std::size_t j = 0; j < sys.modes(); ++j)
        for (std::size_t i = 1; i < sys.modes(); ++i) beta[j] += inv(j, i) * sector.lambda_rest.at(i - 1);
    return beta;
}

inline double a0_mean(const Sector& sector, double mean_n) { return sector.lambda00 + mean_n; }

// <a_j* a_j> = l_j <A_0(t)> + beta_j
inline double modulation_mean(const MultiModeSystem& sys, const Sector& sector, double mean_n, std::size_t j) {
    return sys.l.at(j) * a0_mean(sector, mean_n) + modulation_offsets(sys, sector)[j];
}

namespace detail {

inline void check_same_ladder(const JacobiSystem& a, const JacobiSystem& b) {
    std::size_t K = std::min<std::size_t>({12, a.dim, b.dim});
    for (std::size_t n = 0; n < K; ++n)
        if (std::abs(a.b(n) - b.b(n)) > 1e-9 * std::max(1.0, a.b(n)) ||
            std::abs(a.h(n) - b.h(n)) > 1e-9 * std::max(1.0, std::abs(a.h(n))))
            throw DomainError("modulation_mean: state not in the reduced sector");
}

}  // namespace detail

inline double modulation_mean(const MultiModeSystem& sys, const Sector& sector, const PropagatorContext& ctx,
                              const QuantumState& s, std::size_t j, double t) {
    detail::check_same_ladder(reduce(sys, sector), ctx.js);
    return modulation_mean(sys, sector, number_moment(ctx, s, 1, t), j);
}

inline double modulation_mean(const MultiModeSystem& sys, const Sector& sector, const QuantumState& s, std::size_t j,
                              double t) {
    LadderEvolver ev(reduce(sys, sector));
    return modulation_mean(sys, sector, number_moment_of(state_at(ev, s, t), 1), j);
}

// ---- phase operator on span{|0>, ..., |N-1>} ----

// exp(i phi) = (N + 1)^{-1/2} a
inline Eigen::MatrixXd phase_exp_plus(std::size_t N) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t n = 1; n < N; ++n) m(n - 1, n) = 1.0;
    return m;
}

// exp(-i phi) = a* (N + 1)^{-1/2}
inline Eigen::MatrixXd phase_exp_minus(std::size_t N) { return phase_exp_plus(N).transpose(); }

inline Eigen::MatrixXd cos_phase(std::size_t N) { return 0.5 * (phase_exp_plus(N) + phase_exp_minus(N)); }

inline Eigen::MatrixXd jacobi_matrix(const JacobiSystem& js, std::size_t N) {
    if (N > js.dim) throw DomainError("jacobi_matrix: N beyond the ladder");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(N, N);
    for (std::size_t n = 0; n < N; ++n) m(n, n) = js.h(n);
    for (std::size_t n = 1; n < N; ++n) m(n - 1, n) = m(n, n - 1) = js.b(n);
    return m;
}

}  // namespace orthodyn
