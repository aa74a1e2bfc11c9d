#pragma once

#include <cstddef>
#include <vector>

#include <lapacke.h>

#include "errors.hpp"

namespace orthodyn {

// Eigenpairs of a real symmetric tridiagonal matrix. vectors is column-major
// (vectors[k * n + i] is component i of eigenvector k); eigenvalues ascending.
struct TridiagEigen {
    std::size_t n{0};
    std::vector<double> values;
    std::vector<double> vectors;

    double vec(std::size_t k, std::size_t i) const { return vectors[k * n + i]; }
};

// diag has n entries, offdiag has n-1 (offdiag[i] couples i and i+1).
inline TridiagEigen tridiag_eigen(std::vector<double> diag, std::vector<double> offdiag, bool want_vectors = true) {
    TridiagEigen out;
    const auto n = static_cast<lapack_int>(diag.size());
    out.n = diag.size();
    if (n == 0) return out;
    offdiag.resize(diag.size(), 0.0);  // dstemr wants length n workspace
    out.values.assign(diag.size(), 0.0);
    if (want_vectors) out.vectors.assign(diag.size() * diag.size(), 0.0);
    std::vector<lapack_int> isuppz(2 * diag.size());
    lapack_int m = 0;
    lapack_logical tryrac = 1;
    double dummy = 0.0;
    int info = LAPACKE_dstemr(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'A', n, diag.data(), offdiag.data(), 0.0,
                              0.0, 0, 0, &m, out.values.data(), want_vectors ? out.vectors.data() : &dummy, n, n,
                              isuppz.data(), &tryrac);
    if (info != 0 || m != n) throw Error("tridiag_eigen: eigensolver failed (info=" + std::to_string(info) + ")");
    return out;
}

}  // namespace orthodyn
