#include <cmath>

#include <gtest/gtest.h>

#include "orthodyn/fockoracle.hpp"
#include "orthodyn/propagator.hpp"

using namespace orthodyn;

TEST(TruncatedH, SmallCases) {
    auto js = recurrence(hermite(-2, 0, 1));
    auto one = truncated_h(js, 1);
    EXPECT_EQ(one.diag[0], js.h(0));
    auto two = truncated_h(js, 2);
    const auto& d = two.eigen();
    EXPECT_NEAR(d.values(0), -1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(d.values(1), 1 / std::sqrt(2.0), 1e-15);
    EXPECT_THROW(truncated_h(js, 0), DomainError);
}

TEST(TruncatedH, EigenvaluesAreGaussNodes) {
    auto js = recurrence(jacobi(-0.5, 2, 1.5, 2.5, 0.7));
    auto op = truncated_h(js, 15);
    auto q = gauss_rule(js, 15);
    for (int i = 0; i < 15; ++i) EXPECT_NEAR(op.eigen().values(i), q.nodes[i], 1e-13);
}

TEST(ExpmEvolve, UnitaryAndIdentityAtZero) {
    auto op = truncated_h(recurrence(laguerre_canonical(2.5)), 200);
    std::vector<cplx> v{0.3, cplx(0, 0.4), 0.5, cplx(0.2, -0.1)};
    auto same = expm_evolve(op, v, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_LT(std::abs(same[i] - v[i]), 1e-14);
    auto out = expm_evolve(op, v, 1.7);
    double n0 = 0, n1 = 0;
    for (auto c : v) n0 += std::norm(c);
    for (auto c : out) n1 += std::norm(c);
    EXPECT_NEAR(n1, n0, 1e-12);
}

TEST(ExpmEvolve, MatchesSigmaMN) {
    for (const auto& pd : {hermite(-2, 0, 1), laguerre_canonical(2.5), jacobi(-0.5, 2, 1.5, 2.5, 0.7)}) {
        PropagatorContext ctx(pd);
        auto op = truncated_h(ctx.js, 200);
        for (double t : {0.4, 1.0}) {
            for (std::size_t n = 0; n <= 8; ++n) {
                std::vector<cplx> e(n + 1, 0.0);
                e[n] = 1.0;
                auto col = expm_evolve(op, e, t);
                for (std::size_t m = 0; m <= 8; ++m)
                    EXPECT_LT(std::abs(col[m] - sigma_mn(ctx, m, n, t)), 1e-8) << family_name(pd.family);
            }
        }
    }
    // the hermite m = n = 1 value at t = 1
    PropagatorContext h(hermite(-2, 0, 1));
    auto col = expm_evolve(truncated_h(h.js, 200), std::vector<cplx>{0.0, 1.0}, 1.0);
    EXPECT_LT(std::abs(col[1] - sigma_mn(h, 1, 1, 1.0)), 1e-8);
}

TEST(ExpmEvolve, TruncationStability) {
    // the Laguerre ladder spreads geometrically with ratio t^2/(1+t^2), so it is checked at t = 2
    std::vector<std::pair<PearsonData, double>> cases{
        {hermite(-2, 0, 1), 5.0}, {jacobi(-0.5, 2, 1.5, 2.5), 5.0}, {laguerre_canonical(1.5), 2.0}};
    for (const auto& [pd, t] : cases) {
        auto js = recurrence(pd);
        auto a = truncated_h(js, 200), b = truncated_h(js, 400);
        std::vector<cplx> v{1.0, 0.0, cplx(0, 1.0)};
        auto x = expm_evolve(a, v, t), y = expm_evolve(b, v, t);
        for (std::size_t i = 0; i < 50; ++i) EXPECT_LT(std::abs(x[i] - y[i]), 1e-9) << family_name(pd.family);
    }
}

TEST(Ladder, CanonicalCommutator) {
    const std::size_t N = 30;
    auto a = annihilation(N);
    Eigen::MatrixXcd c = a * a.adjoint() - a.adjoint() * a;
    for (std::size_t i = 0; i + 1 < N; ++i)
        for (std::size_t j = 0; j + 1 < N; ++j) EXPECT_NEAR(std::abs(c(i, j) - (i == j ? 1.0 : 0.0)), 0.0, 1e-13);
    EXPECT_LT((a.adjoint() * a - number_operator(N)).norm(), 1e-13);
}

TEST(Multimode, AmplifierOperators) {
    auto sys = make_system({1, 1}, {1, 1}, 0.7);
    SparseState pv{{{2, 0}, 1.0}};
    EXPECT_EQ(norm(multimode_apply(sys, {TermKind::A}, pv, 20)), 0.0);
    // [A0, A] v = -A v
    SparseState v{{{3, 2}, 0.6}, {{1, 4}, cplx(0, 0.8)}};
    auto a0a = multimode_apply(sys, {TermKind::Aj, 0}, multimode_apply(sys, {TermKind::A}, v, 20), 20);
    auto aa0 = multimode_apply(sys, {TermKind::A}, multimode_apply(sys, {TermKind::Aj, 0}, v, 20), 20);
    auto av = multimode_apply(sys, {TermKind::A}, v, 20);
    for (auto& [n, c] : aa0) a0a[n] -= c;
    for (auto& [n, c] : av) a0a[n] += c;
    EXPECT_LT(norm(a0a), 1e-12);
    // ||A*|n>||^2 = big_g
    for (long n0 = 0; n0 < 5; ++n0)
        for (long n1 = 0; n1 < 5; ++n1) {
            auto r = multimode_apply(sys, {TermKind::Astar}, SparseState{{{n0, n1}, 1.0}}, 20);
            EXPECT_NEAR(norm(r) * norm(r), big_g(sys, {n0, n1}), 1e-12);
        }
    EXPECT_THROW(multimode_apply(sys, {TermKind::Astar}, SparseState{{{10, 10}, 1.0}}, 20), DomainError);
}

TEST(Multimode, IntegralsOfMotion) {
    auto amp = make_system({1, 1}, {1, 1}, 0.7);
    EXPECT_LT(commutator_norm(amp, {TermKind::Aj, 1}, {TermKind::HI}, 16), 1e-10);
    EXPECT_LT(commutator_norm(amp, {TermKind::Aj, 1}, {TermKind::H0}, 16), 1e-10);
    EXPECT_EQ(commutator_norm(amp, {TermKind::Aj, 0}, {TermKind::Aj, 0}, 16), 0.0);
    EXPECT_GT(commutator_norm(amp, {TermKind::Aj, 0}, {TermKind::HI}, 16), 0.1);
    auto up = make_system({1, 3}, {-1, 1}, cplx(0.4, 0.3));
    EXPECT_LT(commutator_norm(up, {TermKind::Aj, 1}, {TermKind::HI}, 16), 1e-10);
}

TEST(Multimode, Bases) {
    EXPECT_EQ(simplex_basis(2, 3).size(), 10u);
    EXPECT_EQ(simplex_basis(3, 2).size(), 10u);
    EXPECT_EQ(box_basis(2, 3).size(), 16u);
    auto sys = make_system({1, 1}, {1, 1}, 0.5);
    auto H = multimode_matrix(sys, {TermKind::HI}, box_basis(2, 6));
    EXPECT_LT((H - H.adjoint()).norm(), 1e-14);
}
