#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "orthodyn/fockoracle.hpp"
#include "orthodyn/reduction.hpp"

using namespace orthodyn;

namespace {

MultiModeSystem amplifier(double g = 0.7) { return make_system({1, 1}, {1, 1}, g); }
MultiModeSystem upconverter() { return make_system({1, 3}, {-1, 1}, cplx(0.4, 0.3)); }
MultiModeSystem squeezer() { return make_system({1.3}, {2}, 0.5); }

}  // namespace

TEST(Alpha, Validate) {
    EXPECT_NO_THROW(validate_alpha({{0.5, 0.5}, {1, -1}}, {1, 1}));
    EXPECT_THROW(validate_alpha({{0.5, 0.5}, {0.5, 0.5}}, {1, 1}), Singular);
    try {
        validate_alpha({{1, 0}, {0, 1}}, {1, 1});
        FAIL();
    } catch (const ConstraintViolated& e) {
        EXPECT_EQ(e.where, "1");
    }
}

TEST(Alpha, Default) {
    auto a = default_alpha({1, 1});
    EXPECT_DOUBLE_EQ(a[0][0], 0.5);
    EXPECT_DOUBLE_EQ(a[0][1], 0.5);
    EXPECT_NEAR(a[1][0] + a[1][1], 0.0, 1e-15);
    EXPECT_DOUBLE_EQ(default_alpha({2})[0][0], 0.5);
    auto b = default_alpha({-1, 1});
    EXPECT_DOUBLE_EQ(b[0][0], -0.5);
    EXPECT_NEAR(b[1][0] - b[1][1], 0.0, 1e-15);
    for (const auto& l : std::vector<std::vector<int>>{{1, 1}, {2}, {-1, 1}, {1, 2, -3}, {0, 1}})
        EXPECT_NO_THROW(validate_alpha(default_alpha(l), l));
}

TEST(Lambda, Values) {
    RealMatrix a{{0.5, 0.5}, {1, -1}};
    auto lam = lambda_of(a, {3, 1});
    EXPECT_DOUBLE_EQ(lam[0], 2);
    EXPECT_DOUBLE_EQ(lam[1], 2);
    EXPECT_DOUBLE_EQ(lambda_of({{0.5}}, {5})[0], 2.5);
    EXPECT_EQ(lambda_of(a, {0, 0}), (std::vector<double>{0, 0}));
}

TEST(Gamma, Coefficients) {
    EXPECT_NEAR(gamma_coeffs(amplifier())[0], 2.0, 1e-12);
    EXPECT_NEAR(gamma_coeffs(upconverter())[0], 2.0, 1e-12);
    EXPECT_NEAR(gamma_coeffs(squeezer())[0], 2.6, 1e-12);
    auto s = make_system({1.5, 0.25, 2}, {1, 2, -3}, 1.0);
    EXPECT_NEAR(gamma_coeffs(s)[0], 1.5 + 0.5 - 6, 1e-12);
}

TEST(BigG, ProductFormula) {
    auto amp = amplifier(0.7);
    EXPECT_NEAR(big_g(amp, {2, 3}), 0.49 * 3 * 4, 1e-14);
    auto up = upconverter();
    EXPECT_NEAR(big_g(up, {2, 3}), 0.25 * 2 * 4, 1e-14);
    EXPECT_EQ(big_g(up, {0, 3}), 0.0);
    EXPECT_THROW(big_g(amp, {-1, 0}), DomainError);
}

TEST(BigG, MatchesSparseOracle) {
    std::mt19937 gen(23);
    std::uniform_int_distribution<long> occ(0, 8);
    for (const auto& sys : {amplifier(), upconverter(), squeezer()}) {
        for (int i = 0; i < 50; ++i) {
            Occupation n(sys.modes());
            for (auto& x : n) x = occ(gen);
            auto r = multimode_apply(sys, {TermKind::Astar}, SparseState{{n, 1.0}}, 40);
            EXPECT_NEAR(norm(r) * norm(r), big_g(sys, n), 1e-10);
        }
    }
}

TEST(PseudoVacuum, Walks) {
    EXPECT_EQ(find_pseudo_vacuum(amplifier(), {3, 1}).pseudo_vacuum_occupation, (Occupation{2, 0}));
    EXPECT_EQ(find_pseudo_vacuum(upconverter(), {3, 1}).pseudo_vacuum_occupation, (Occupation{4, 0}));
    auto sq = make_system({1}, {2}, 1.0);
    EXPECT_EQ(find_pseudo_vacuum(sq, {5}).pseudo_vacuum_occupation, (Occupation{1}));
    EXPECT_EQ(find_pseudo_vacuum(sq, {4}).pseudo_vacuum_occupation, (Occupation{0}));
    auto s = find_pseudo_vacuum(amplifier(), {3, 1});
    EXPECT_DOUBLE_EQ(s.lambda00, 1.0);
    auto down = make_system({1}, {-1}, 1.0);
    EXPECT_THROW(find_pseudo_vacuum(down, {2}), NoPseudoVacuum);
}

TEST(PseudoVacuum, AnnihilatedInOracle) {
    for (const auto& sys : {amplifier(), upconverter(), squeezer()}) {
        Occupation start(sys.modes(), 3);
        auto s = find_pseudo_vacuum(sys, start);
        auto r = multimode_apply(sys, {TermKind::A}, SparseState{{s.pseudo_vacuum_occupation, 1.0}}, 40);
        EXPECT_EQ(norm(r), 0.0);
    }
}

TEST(Reduce, Amplifier) {
    auto sys = amplifier(0.7);
    for (long delta : {0, 1, 3}) {
        auto js = reduce(sys, find_pseudo_vacuum(sys, {delta + 2, 2}));
        EXPECT_TRUE(js.infinite());
        EXPECT_NEAR(js.gamma0, 2.0, 1e-12);
        for (std::size_t n = 1; n <= 10; ++n) EXPECT_NEAR(js.b(n), 0.7 * std::sqrt(n * (n + delta)), 1e-12);
        auto c = classify_ladder(js);
        ASSERT_TRUE(c.family.has_value());
        EXPECT_EQ(*c.family, Family::Laguerre);
        EXPECT_NEAR(c.mu, delta + 1.0, 1e-9);
        EXPECT_FALSE(c.h_matches);
        EXPECT_EQ(c.describe(js.dim).rfind("Laguerre-type, mu = " + std::to_string(delta + 1), 0), 0u);
    }
}

TEST(Reduce, SectorInvariance) {
    auto sys = amplifier(0.7);
    auto a = reduce(sys, find_pseudo_vacuum(sys, {5, 3}));
    auto b = reduce(sys, find_pseudo_vacuum(sys, {9, 7}));
    for (std::size_t n = 0; n < 12; ++n) {
        EXPECT_EQ(a.b(n), b.b(n));
        EXPECT_EQ(a.h(n), b.h(n));
    }
}

TEST(Reduce, LaguerreExactSector) {
    double g = 0.8;
    auto sys = make_system({1, 1}, {1, 1}, g, [g](const Occupation& n) { return g * (n[0] + n[1] + 1); });
    auto js = reduce(sys, find_pseudo_vacuum(sys, {2, 0}));
    auto c = classify_ladder(js);
    ASSERT_TRUE(c.pd.has_value());
    EXPECT_EQ(c.pd->family, Family::Laguerre);
    auto ref = recurrence(*c.pd);
    for (std::size_t n = 0; n < 12; ++n) {
        EXPECT_NEAR(ref.b(n), js.b(n), 1e-12);
        EXPECT_NEAR(ref.h(n), js.h(n), 1e-12);
    }
}

TEST(Reduce, UpConverterIsFinite) {
    auto sys = upconverter();
    auto js = reduce(sys, find_pseudo_vacuum(sys, {3, 2}));
    EXPECT_EQ(js.dim, 6u);
    EXPECT_EQ(js.b(6), 0.0);
    EXPECT_GT(js.b(5), 0.0);
    EXPECT_EQ(classify_ladder(js).describe(js.dim), "unclassified, dim = 6");
}

TEST(Reduce, SingleModeHermite) {
    auto sys = make_system({1}, {1}, 0.6);
    auto js = reduce(sys, find_pseudo_vacuum(sys, {4}));
    for (std::size_t n = 1; n < 10; ++n) EXPECT_NEAR(js.b(n), 0.6 * std::sqrt(n), 1e-14);
    auto c = classify_ladder(js);
    ASSERT_TRUE(c.pd.has_value());
    EXPECT_EQ(c.pd->family, Family::Hermite);
    auto ref = recurrence(*c.pd);
    for (std::size_t n = 0; n < 10; ++n) EXPECT_NEAR(ref.b(n), js.b(n), 1e-12);
}

TEST(Reduce, JacobiClassification) {
    JacobiSystem js = recurrence(jacobi(-0.5, 2, 1.5, 2.5));
    auto c = classify_ladder(js);
    ASSERT_TRUE(c.pd.has_value());
    EXPECT_NEAR(c.mu, 1.5, 1e-8);
    EXPECT_NEAR(c.nu, 2.5, 1e-8);
    EXPECT_NEAR(c.pd->ja, -0.5, 1e-8);
}

TEST(Reduce, BSquaredMatchesOracleLadder) {
    for (const auto& sys : {amplifier(), upconverter(), squeezer()}) {
        Occupation start(sys.modes(), 3);
        auto sector = find_pseudo_vacuum(sys, start);
        auto js = reduce(sys, sector);
        SparseState v{{sector.pseudo_vacuum_occupation, 1.0}};
        for (std::size_t n = 1; n <= 10 && n < js.dim; ++n) {
            auto next = multimode_apply(sys, {TermKind::Astar}, v, 200);
            double nn = norm(next);
            EXPECT_NEAR(nn * nn, js.b(n) * js.b(n), 1e-10 * std::max(1.0, nn * nn));
            for (auto& [k, c] : next) c /= nn;
            v = next;
        }
    }
}

TEST(Reduce, ReducedEvolutionMatchesMultimode) {
    // e^{-iH_I t} on the pseudo-vacuum: ladder amplitudes equal multimode amplitudes up to the g phase
    auto sys = upconverter();
    auto sector = find_pseudo_vacuum(sys, {3, 2});
    auto js = reduce(sys, sector);
    auto basis = simplex_basis(2, 5);
    auto H = multimode_matrix(sys, {TermKind::HI}, basis);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.size());
    std::size_t pv = 0;
    for (std::size_t i = 0; i < basis.size(); ++i)
        if (basis[i] == sector.pseudo_vacuum_occupation) pv = i;
    v(pv) = 1.0;
    auto out_mm = expm_evolve(dense_operator(H), v, 0.9);
    auto out_l = expm_evolve(truncated_h(js, js.dim), std::vector<cplx>{1.0}, 0.9);
    for (std::size_t k = 0; k < js.dim; ++k) {
        auto occ = step(sys.l, sector.pseudo_vacuum_occupation, static_cast<long>(k));
        std::size_t idx = 0;
        for (std::size_t i = 0; i < basis.size(); ++i)
            if (basis[i] == occ) idx = i;
        EXPECT_NEAR(std::abs(out_mm(idx)), std::abs(out_l[k]), 1e-12);
    }
}
