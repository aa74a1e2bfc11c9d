#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include <Eigen/Dense>

#include "orthopoly.hpp"
#include "reduction.hpp"

namespace orthodyn {

// Brute-force reference: truncated matrices diagonalized with Eigen.
struct TruncatedOperator {
    std::size_t dim{0};
    bool tridiagonal{true};
    std::vector<double> diag, off;  // tridiagonal storage, off[i] couples i and i+1
    Eigen::MatrixXcd dense;         // used when !tridiagonal
    bool hermitian{true};
    std::size_t edge_margin{0};

    struct Decomp {
        std::once_flag once;
        Eigen::VectorXd values;
        Eigen::MatrixXcd vectors;
    };
    std::shared_ptr<Decomp> decomp{std::make_shared<Decomp>()};

    const Decomp& eigen() const {
        std::call_once(decomp->once, [this] {
            if (tridiagonal) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
                Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(diag.data(), dim);
                Eigen::VectorXd e = dim > 1 ? Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(off.data(), dim - 1))
                                            : Eigen::VectorXd(0);
                es.computeFromTridiagonal(d, e, Eigen::ComputeEigenvectors);
                if (es.info() != Eigen::Success) throw ConvergenceError("fockoracle: eigen decomposition failed");
                decomp->values = es.eigenvalues();
                decomp->vectors = es.eigenvectors().cast<cplx>();
            } else {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
                if (es.info() != Eigen::Success) throw ConvergenceError("fockoracle: eigen decomposition failed");
                decomp->values = es.eigenvalues();
                decomp->vectors = es.eigenvectors();
            }
        });
        return *decomp;
    }

    Eigen::MatrixXcd to_dense() const {
        if (!tridiagonal) return dense;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = diag[i];
        for (std::size_t i = 0; i + 1 < dim; ++i) m(i, i + 1) = m(i + 1, i) = off[i];
        return m;
    }
};

inline TruncatedOperator truncated_h(const JacobiSystem& js, std::size_t N) {
    if (N == 0 || N > js.dim) throw DomainError("truncated_h: need 0 < N <= dim");
    TruncatedOperator op;
    op.dim = N;
    op.diag.resize(N);
    op.off.resize(N - 1);
    for (std::size_t i = 0; i < N; ++i) op.diag[i] = js.h(i);
    for (std::size_t i = 0; i + 1 < N; ++i) op.off[i] = js.b(i + 1);
    return op;
}

inline TruncatedOperator dense_operator(Eigen::MatrixXcd m, bool hermitian = true, std::size_t edge_margin = 0) {
    TruncatedOperator op;
    op.dim = static_cast<std::size_t>(m.rows());
    op.tridiagonal = false;
    op.dense = std::move(m);
    op.hermitian = hermitian;
    op.edge_margin = edge_margin;
    return op;
}

inline Eigen::VectorXcd to_vector(const std::vector<cplx>& v, std::size_t dim) {
    if (v.size() > dim) throw DomainError("fockoracle: state longer than the truncation");
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
    for (std::size_t i = 0; i < v.size(); ++i) x(i) = v[i];
    return x;
}

inline Eigen::VectorXcd expm_evolve(const TruncatedOperator& op, const Eigen::VectorXcd& v, double t) {
    if (!op.hermitian) throw DomainError("expm_evolve: operator is not Hermitian");
    const auto& d = op.eigen();
    Eigen::VectorXcd c = d.vectors.adjoint() * v;
    for (Eigen::Index j = 0; j < c.size(); ++j) c(j) *= std::polar(1.0, -d.values(j) * t);
    return d.vectors * c;
}

inline std::vector<cplx> expm_evolve(const TruncatedOperator& op, const std::vector<cplx>& v, double t) {
    Eigen::VectorXcd out = expm_evolve(op, to_vector(v, op.dim), t);
    return {out.data(), out.data() + out.size()};
}

// Single-mode a on span{|0>, ..., |N-1>}.
inline Eigen::MatrixXcd annihilation(std::size_t N) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

inline Eigen::MatrixXcd number_operator(std::size_t N) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(N, N);
    for (std::size_t n = 0; n < N; ++n) m(n, n) = static_cast<double>(n);
    return m;
}

// ---- multi-mode occupation basis ----

using SparseState = std::map<Occupation, cplx>;

enum class TermKind { A, Astar, H0, HI, Aj };

struct Term {
    TermKind kind;
    std::size_t j{0};  // mode-space index for Aj
};

namespace detail {

inline long total(const Occupation& n) {
    long s = 0;
    for (auto x : n) s += x;
    return s;
}

inline void add_to(SparseState& out, const Occupation& n, cplx c, long cutoff) {
    if (c == 0.0) return;
    if (total(n) > cutoff) throw DomainError("multimode_apply: cutoff overflow");
    out[n] += c;
}

}  // namespace detail

inline SparseState multimode_apply(const MultiModeSystem& sys, Term term, const SparseState& v, long cutoff) {
    SparseState out;
    for (const auto& [n, c] : v) {
        if (detail::total(n) > cutoff) throw DomainError("multimode_apply: state beyond the cutoff");
        auto raise = [&] {
            double f = raise_factor(sys.l, n);
            if (f > 0) detail::add_to(out, step(sys.l, n, 1), c * std::conj(sys.g(n)) * std::sqrt(f), cutoff);
        };
        auto lower = [&] {
            Occupation m = step(sys.l, n, -1);
            for (auto x : m)
                if (x < 0) return;
            double f = raise_factor(sys.l, m);
            if (f > 0) detail::add_to(out, m, c * sys.g(m) * std::sqrt(f), cutoff);
        };
        switch (term.kind) {
            case TermKind::A: lower(); break;
            case TermKind::Astar: raise(); break;
            case TermKind::H0: {
                double e = 0.0;
                for (std::size_t i = 0; i < n.size(); ++i) e += sys.omega[i] * n[i];
                detail::add_to(out, n, c * e, cutoff);
                break;
            }
            case TermKind::HI:
                lower();
                raise();
                detail::add_to(out, n, c * sys.h_diag(n), cutoff);
                break;
            case TermKind::Aj:
                detail::add_to(out, n, c * lambda_of(sys.alpha, n).at(term.j), cutoff);
                break;
        }
    }
    return out;
}

inline double norm(const SparseState& v) {
    double s = 0.0;
    for (const auto& [n, c] : v) s += std::norm(c);
    return std::sqrt(s);
}

// All occupations with total photon number <= total_max.
inline std::vector<Occupation> simplex_basis(std::size_t modes, long total_max) {
    std::vector<Occupation> out;
    Occupation n(modes, 0);
    std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
        if (i == modes) {
            out.push_back(n);
            return;
        }
        for (long k = 0; k <= left; ++k) {
            n[i] = k;
            rec(i + 1, left - k);
        }
        n[i] = 0;
    };
    rec(0, total_max);
    return out;
}

// All occupations with every n_j <= per_mode.
inline std::vector<Occupation> box_basis(std::size_t modes, long per_mode) {
    std::vector<Occupation> out;
    Occupation n(modes, 0);
    for (;;) {
        out.push_back(n);
        std::size_t i = 0;
        while (i < modes && n[i] == per_mode) n[i++] = 0;
        if (i == modes) break;
        ++n[i];
    }
    return out;
}

inline long l1_norm(const std::vector<int>& l) {
    long s = 0;
    for (int x : l) s += std::abs(x);
    return s;
}

// max over interior basis states e of ||[X, Y] e||; states within two applications
// of the cutoff are excluded, so no truncation error enters.
inline double commutator_norm(const MultiModeSystem& sys, Term X, Term Y, long cutoff) {
    long interior = cutoff - 2 * l1_norm(sys.l);
    if (interior < 0) throw DomainError("commutator_norm: cutoff too small");
    double worst = 0.0;
    for (const auto& n : simplex_basis(sys.modes(), interior)) {
        SparseState e{{n, 1.0}};
        auto xy = multimode_apply(sys, X, multimode_apply(sys, Y, e, cutoff), cutoff);
        auto yx = multimode_apply(sys, Y, multimode_apply(sys, X, e, cutoff), cutoff);
        for (const auto& [m, c] : yx) xy[m] -= c;
        worst = std::max(worst, norm(xy));
    }
    return worst;
}

// Matrix of a term on the given basis; components leaving the basis are dropped.
inline Eigen::MatrixXcd multimode_matrix(const MultiModeSystem& sys, Term term, const std::vector<Occupation>& basis) {
    std::map<Occupation, Eigen::Index> index;
    long cutoff = 0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
        index[basis[i]] = static_cast<Eigen::Index>(i);
        cutoff = std::max(cutoff, detail::total(basis[i]));
    }
    cutoff += l1_norm(sys.l);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.size(), basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) {
        auto out = multimode_apply(sys, term, SparseState{{basis[i], 1.0}}, cutoff);
        for (const auto& [n, c] : out) {
            auto it = index.find(n);
            if (it != index.end()) m(it->second, static_cast<Eigen::Index>(i)) = c;
        }
    }
    return m;
}

}  // namespace orthodyn
