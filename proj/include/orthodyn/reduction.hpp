#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "orthopoly.hpp"

namespace orthodyn {

using Occupation = std::vector<long>;
using RealMatrix = std::vector<std::vector<double>>;

// H = sum_j omega_j N_j + A + A* + h_diag(N), with A* raising the occupation by l.
// A*|n> = conj(g(n)) sqrt(...) |n + l>, so g is read at the lower end of each ladder step.
struct MultiModeSystem {
    std::vector<double> omega;
    std::vector<int> l;
    std::function<cplx(const Occupation&)> g;
    std::function<double(const Occupation&)> h_diag;
    RealMatrix alpha;

    std::size_t modes() const { return l.size(); }
};

struct Sector {
    std::vector<double> lambda_rest;
    Occupation pseudo_vacuum_occupation;
    double lambda00{0};
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const RealMatrix& m) {
    Eigen::MatrixXd out(m.size(), m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m[i].size() != m.size()) throw DomainError("alpha must be square");
        for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m[i][j];
    }
    return out;
}

}  // namespace detail

inline void validate_alpha(const RealMatrix& alpha, const std::vector<int>& l) {
    if (alpha.size() != l.size()) throw DomainError("validate_alpha: alpha does not match the mode count");
    auto a = detail::to_eigen(alpha);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible() || std::abs(a.determinant()) < 1e-12) throw Singular("validate_alpha: alpha is singular");
    for (std::size_t i = 0; i < l.size(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < l.size(); ++j) s += alpha[i][j] * l[j];
        if (std::abs(s - (i == 0 ? 1.0 : 0.0)) > 1e-12)
            throw ConstraintViolated("validate_alpha: row " + std::to_string(i) + " violates sum_j alpha_ij l_j = delta_0i",
                                     std::to_string(i));
    }
}

// Row 0 = l / |l|^2, remaining rows an orthonormal basis of the complement of l.
inline RealMatrix default_alpha(const std::vector<int>& l) {
    const std::size_t M = l.size();
    Eigen::VectorXd v(M);
    for (std::size_t j = 0; j < M; ++j) v(j) = l[j];
    double n2 = v.squaredNorm();
    if (n2 == 0.0) throw DomainError("default_alpha: l must be nonzero");
    RealMatrix a(M, std::vector<double>(M));
    for (std::size_t j = 0; j < M; ++j) a[0][j] = v(j) / n2;
    if (M > 1) {
        // Householder QR of l: columns 1..M-1 of Q span the complement
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
        Eigen::MatrixXd Q = qr.householderQ();
        for (std::size_t i = 1; i < M; ++i)
            for (std::size_t j = 0; j < M; ++j) a[i][j] = Q(j, i);
    }
    return a;
}

inline std::vector<double> lambda_of(const RealMatrix& alpha, const Occupation& n) {
    if (alpha.size() != n.size()) throw DomainError("lambda_of: shape mismatch");
    std::vector<double> out(n.size(), 0.0);
    for (std::size_t j = 0; j < n.size(); ++j)
        for (std::size_t i = 0; i < n.size(); ++i) out[j] += alpha[j][i] * static_cast<double>(n[i]);
    return out;
}

// gamma with H0 = sum_j gamma_j A_j, i.e. alpha^T gamma = omega.
inline std::vector<double> gamma_coeffs(const MultiModeSystem& sys) {
    auto a = detail::to_eigen(sys.alpha);
    Eigen::VectorXd w(sys.modes());
    for (std::size_t j = 0; j < sys.modes(); ++j) w(j) = sys.omega[j];
    Eigen::VectorXd g = a.transpose().fullPivLu().solve(w);
    return {g.data(), g.data() + g.size()};
}

inline MultiModeSystem make_system(std::vector<double> omega, std::vector<int> l,
                                   std::function<cplx(const Occupation&)> g,
                                   std::function<double(const Occupation&)> h_diag = {},
                                   std::optional<RealMatrix> alpha = {}) {
    if (omega.size() != l.size() || l.empty()) throw DomainError("make_system: omega and l must have the same nonzero length");
    MultiModeSystem s;
    s.omega = std::move(omega);
    s.alpha = alpha ? *alpha : default_alpha(l);
    s.l = std::move(l);
    s.g = std::move(g);
    s.h_diag = h_diag ? std::move(h_diag) : [](const Occupation&) { return 0.0; };
    validate_alpha(s.alpha, s.l);
    return s;
}

inline MultiModeSystem make_system(std::vector<double> omega, std::vector<int> l, cplx g,
                                   std::function<double(const Occupation&)> h_diag = {},
                                   std::optional<RealMatrix> alpha = {}) {
    return make_system(std::move(omega), std::move(l), [g](const Occupation&) { return g; }, std::move(h_diag),
                       std::move(alpha));
}

// sqrt of the occupation factor of A*|n> (0 if a lowering runs below the vacuum).
inline double raise_factor(const std::vector<int>& l, const Occupation& n) {
    double f = 1.0;
    for (std::size_t j = 0; j < l.size(); ++j) {
        if (n[j] < 0) return 0.0;
        if (l[j] > 0)
            for (int k = 1; k <= l[j]; ++k) f *= static_cast<double>(n[j] + k);
        else
            for (int k = 0; k < -l[j]; ++k) {
                double x = static_cast<double>(n[j] - k);
                if (x <= 0) return 0.0;
                f *= x;
            }
    }
    return f;
}

inline double big_g(const MultiModeSystem& sys, const Occupation& n) {
    for (auto x : n)
        if (x < 0) throw DomainError("big_g: occupations must be nonnegative");
    double f = raise_factor(sys.l, n);
    return f == 0.0 ? 0.0 : std::norm(sys.g(n)) * f;
}

inline Occupation step(const std::vector<int>& l, const Occupation& n, long k) {
    Occupation out(n);
    for (std::size_t j = 0; j < n.size(); ++j) out[j] += k * l[j];
    return out;
}

inline Sector find_pseudo_vacuum(const MultiModeSystem& sys, const Occupation& start) {
    if (start.size() != sys.modes()) throw DomainError("find_pseudo_vacuum: occupation has the wrong length");
    for (auto x : start)
        if (x < 0) throw DomainError("find_pseudo_vacuum: occupations must be nonnegative");
    bool any_positive = false;
    for (int lj : sys.l) any_positive |= lj > 0;
    if (!any_positive) throw NoPseudoVacuum("find_pseudo_vacuum: no l_j > 0, the lowering walk never terminates");
    Occupation n = start;
    for (;;) {
        Occupation below = step(sys.l, n, -1);
        bool valid = true;
        for (auto x : below) valid &= x >= 0;
        if (!valid || big_g(sys, below) == 0.0) break;
        n = below;
    }
    Sector s;
    auto lam = lambda_of(sys.alpha, n);
    s.lambda00 = lam[0];
    s.lambda_rest.assign(lam.begin() + 1, lam.end());
    s.pseudo_vacuum_occupation = n;
    return s;
}

inline JacobiSystem reduce(const MultiModeSystem& sys, const Sector& sector) {
    const Occupation pv = sector.pseudo_vacuum_occupation;
    if (pv.size() != sys.modes()) throw DomainError("reduce: sector does not match the system");
    auto lam = lambda_of(sys.alpha, pv);
    for (std::size_t j = 1; j < lam.size(); ++j)
        if (std::abs(lam[j] - sector.lambda_rest[j - 1]) > 1e-9) throw DomainError("reduce: inconsistent sector");
    Occupation below = step(sys.l, pv, -1);
    bool below_valid = true;
    for (auto x : below) below_valid &= x >= 0;
    if (below_valid && big_g(sys, below) != 0.0) throw DomainError("reduce: occupation is not a pseudo-vacuum");

    JacobiSystem js;
    // the ladder ends where A* first maps to zero
    std::size_t dim = kInfiniteDim;
    bool all_nonneg = true;
    for (int lj : sys.l) all_nonneg &= lj >= 0;
    if (!all_nonneg) {
        dim = 1;
        while (big_g(sys, step(sys.l, pv, static_cast<long>(dim - 1))) != 0.0) ++dim;
    }
    js.dim = dim;
    js.b = [sys, pv](std::size_t n) {
        if (n == 0) return 0.0;
        return std::sqrt(big_g(sys, step(sys.l, pv, static_cast<long>(n) - 1)));
    };
    js.h = [sys, pv](std::size_t n) { return sys.h_diag(step(sys.l, pv, static_cast<long>(n))); };
    js.gamma0 = gamma_coeffs(sys)[0];
    return js;
}

// Which classical family pattern a reduced ladder follows, judged on b(1..8) and h(0..7).
struct LadderClass {
    std::optional<Family> family;
    double mu{0}, nu{0}, scale{0};
    bool h_matches{false};
    std::optional<PearsonData> pd;  // set when b and h both match

    std::string describe(std::size_t dim) const {
        std::ostringstream os;
        if (!family) {
            os << "unclassified";
        } else {
            std::string name = family_name(*family);
            name[0] = static_cast<char>(std::toupper(name[0]));
            os << name << "-type";
            if (*family != Family::Hermite) os << ", mu = " << mu;
            if (*family == Family::Jacobi) os << ", nu = " << nu;
        }
        os << ", dim = ";
        if (dim == kInfiniteDim) os << "inf"; else os << dim;
        return os.str();
    }
};

inline LadderClass classify_ladder(const JacobiSystem& js, double tol = 1e-10) {
    LadderClass c;
    const std::size_t K = 8;
    if (!js.infinite() && js.dim < K + 1) return c;
    std::vector<double> b2(K + 1), h(K);
    for (std::size_t n = 1; n <= K; ++n) b2[n] = js.b(n) * js.b(n);
    for (std::size_t n = 0; n < K; ++n) h[n] = js.h(n);
    if (!(b2[1] > 0)) return c;
    auto close = [tol](double x, double y) { return std::abs(x - y) <= tol * std::max(1.0, std::abs(y)); };
    auto h_const = [&] {
        for (double v : h)
            if (!close(v, h[0])) return false;
        return true;
    };

    // Hermite: b^2 = s n
    bool herm = true;
    for (std::size_t n = 1; n <= K; ++n) herm &= close(b2[n], b2[1] * n);
    if (herm) {
        c.family = Family::Hermite;
        c.scale = b2[1];
        c.h_matches = h_const();
        if (c.h_matches) c.pd = hermite(-1.0, h[0], b2[1]);
        return c;
    }
    // Laguerre: b^2 = k^2 n (n + mu - 1)
    double r = b2[2] / b2[1];
    if (r > 2) {
        double mu = 2.0 / (r - 2.0), k2 = b2[1] / mu;
        bool lag = mu > 0;
        for (std::size_t n = 1; n <= K && lag; ++n) lag &= close(b2[n], k2 * n * (n + mu - 1));
        if (lag) {
            double k = std::sqrt(k2), shift = h[0] - k * mu;
            c.family = Family::Laguerre;
            c.mu = mu;
            c.scale = k;
            c.h_matches = true;
            for (std::size_t n = 0; n < K; ++n) c.h_matches &= close(h[n], k * (2.0 * n + mu) + shift);
            if (c.h_matches) c.pd = laguerre(-1.0, mu * k, k, -shift * k);
            return c;
        }
    }
    // Jacobi: Newton on (mu, nu) matching b(2)^2/b(1)^2 and b(3)^2/b(1)^2, then the length from b(1)
    auto ratios = [](double mu, double nu) {
        auto js0 = recurrence(jacobi(0.0, 1.0, mu, nu));
        double q1 = js0.b(1) * js0.b(1);
        return std::pair{js0.b(2) * js0.b(2) / q1, js0.b(3) * js0.b(3) / q1};
    };
    double t2 = b2[2] / b2[1], t3 = b2[3] / b2[1];
    for (double mu0 : {0.7, 1.5, 3.0})
        for (double nu0 : {0.7, 1.5, 3.0}) {
            double mu = mu0, nu = nu0;
            bool ok = true;
            for (int it = 0; it < 60 && ok; ++it) {
                auto [f2, f3] = ratios(mu, nu);
                double e2 = f2 - t2, e3 = f3 - t3;
                if (std::abs(e2) + std::abs(e3) < 1e-15) break;
                double d = 1e-7;
                auto [m2, m3] = ratios(mu + d, nu);
                auto [n2, n3] = ratios(mu, nu + d);
                double j11 = (m2 - f2) / d, j12 = (n2 - f2) / d, j21 = (m3 - f3) / d, j22 = (n3 - f3) / d;
                double det = j11 * j22 - j12 * j21;
                if (det == 0 || !std::isfinite(det)) { ok = false; break; }
                mu -= (j22 * e2 - j12 * e3) / det;
                nu -= (-j21 * e2 + j11 * e3) / det;
                if (!(mu > 0 && nu > 0) || mu > 1e6 || nu > 1e6) ok = false;
            }
            if (!ok) continue;
            auto js0 = recurrence(jacobi(0.0, 1.0, mu, nu));
            double L = std::sqrt(b2[1]) / js0.b(1);
            bool jac = true;
            for (std::size_t n = 1; n <= K && jac; ++n) jac &= close(b2[n], L * L * js0.b(n) * js0.b(n));
            if (!jac) continue;
            c.family = Family::Jacobi;
            c.mu = mu;
            c.nu = nu;
            c.scale = L;
            // h(n) = a + L h_unit(n) with h_unit from the unit interval
            double a = h[0] - L * js0.h(0);
            c.h_matches = true;
            for (std::size_t n = 0; n < K; ++n) c.h_matches &= close(h[n], a + L * js0.h(n));
            if (c.h_matches) c.pd = jacobi(a, a + L, mu, nu);
            return c;
        }
    return c;
}

}  // namespace orthodyn
