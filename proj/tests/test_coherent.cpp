#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "orthodyn/coherent.hpp"

using namespace orthodyn;

TEST(Strip, PrintedStrips) {
    EXPECT_TRUE(std::isinf(strip_for(hermite(-2, 0, 1)).s));
    EXPECT_TRUE(std::isinf(strip_for(hermite(-2, 0, 1)).r));
    EXPECT_DOUBLE_EQ(strip_for(laguerre_canonical(1)).s, 0.5);
    EXPECT_TRUE(std::isinf(strip_for(legendre()).s));
}

TEST(ReproducingDensity, HermiteCanonical) {
    PropagatorContext ctx(hermite(-2, 0, 1));
    for (double y : {-1.0, 0.0, 0.3, 2.0}) EXPECT_NEAR(reproducing_density(ctx, y), std::exp(-y * y), 1e-14);
}

TEST(ReproducingDensity, LaguerreRanges) {
    PropagatorContext two(laguerre_canonical(2));
    EXPECT_NEAR(reproducing_density(two, 0.0), 2.0, 1e-14);
    EXPECT_THROW(reproducing_density(two, 0.6), StripError);
    PropagatorContext one(laguerre_canonical(1));
    EXPECT_THROW(reproducing_density(one, 0.0), Unsupported);
}

TEST(ReproducingDensity, WeightIdentity) {
    // int mu(y) e^{2yw} dy * rho(w) = 1 on the support
    for (const auto& pd : {hermite(-2, 0, 1), hermite(-1.5, 0.6, 0.8), laguerre_canonical(2), laguerre_canonical(3.5),
                           laguerre(1, -2, -1, 0.5), jacobi(0, 1, 2, 2.5), jacobi(-1, 1, 2, 2), jacobi(-0.5, 2, 1.5, 2.5),
                           jacobi(-1, 1, 1.2, 1.2)}) {
        PropagatorContext ctx(pd);
        double lo = std::isinf(pd.lo) ? -2.0 : pd.lo, hi = std::isinf(pd.hi) ? lo + 4.0 : pd.hi;
        double ylo = ctx.strip.r, yhi = ctx.strip.s;
        for (int i = 1; i <= 10; ++i) {
            double w = lo + (hi - lo) * i / 11.0;
            double val = integrate_line(
                [&](double y) {
                    if (!(y < yhi)) return 0.0;
                    double d = reproducing_density(ctx, y), e = std::exp(2 * y * w);
                    return (d == 0.0 || e == 0.0) ? 0.0 : d * e;
                },
                ylo, yhi, {0.0}, 1e-12);
            EXPECT_NEAR(val * ctx.sm.density(w), 1.0, 1e-6) << family_name(pd.family) << " mu=" << pd.mu << " w=" << w;
        }
    }
}

TEST(ReproducingDensity, GegenbauerAgreesWithWhittakerForm) {
    // the general form with mu slightly perturbed off the diagonal, against the Bessel form on it
    PropagatorContext geg(jacobi(-1, 1, 2, 2));
    PropagatorContext gen(jacobi(-1, 1, 2, 2 + 1e-9));
    for (double y : {-1.0, -0.2, 0.2, 1.0})
        EXPECT_NEAR(reproducing_density(geg, y), reproducing_density(gen, y), 1e-8 * reproducing_density(geg, y));
    EXPECT_NEAR(reproducing_density(geg, 0.0), reproducing_density(gen, 0.0), 1e-7);
    EXPECT_NEAR(reproducing_density(geg, 0.0), reproducing_density(geg, 1e-7), 1e-5);
    EXPECT_THROW(reproducing_density(PropagatorContext(jacobi(0, 1, 1.5, 1.2)), 0.1), Unsupported);
}

TEST(Kernel, Properties) {
    PropagatorContext ctx(hermite(-2, 0, 1));
    EXPECT_NEAR(std::abs(kernel(ctx, 0.7, 0.7) - 1.0), 0.0, 1e-15);
    cplx z(0.3, 0.4), v(-0.2, 0.9);
    EXPECT_LT(std::abs(kernel(ctx, z, v) - std::conj(kernel(ctx, v, z))), 1e-15);
    std::vector<cplx> pts{0.0, cplx(0.5, 0.1), cplx(-0.3, 0.2)};
    Eigen::MatrixXcd G(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) G(i, j) = kernel(ctx, pts[i], pts[j]);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(G).eigenvalues().minCoeff(), 0.0);
}

TEST(Kernel, RandomGramMatricesPositive) {
    std::mt19937 gen(31);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const auto& pd : {hermite(-2, 0, 1), laguerre_canonical(2), legendre()}) {
        PropagatorContext ctx(pd);
        for (int trial = 0; trial < 5; ++trial) {
            std::vector<cplx> pts(4);
            for (auto& p : pts) p = {u(gen), pd.family == Family::Laguerre ? -0.5 + 0.4 * u(gen) : u(gen)};
            Eigen::MatrixXcd G(4, 4);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j) G(i, j) = kernel(ctx, pts[i], pts[j]);
            EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(G).eigenvalues().minCoeff(), 0.0);
        }
    }
}

TEST(Holomorphic, BasisAndShift) {
    PropagatorContext ctx(laguerre_canonical(2.5));
    cplx z(0.4, -0.3);
    std::vector<cplx> e3{0, 0, 0, 1.0};
    EXPECT_LT(std::abs(holomorphic_transform(ctx, e3, z) - sigma_n(ctx, 3, z)), 1e-15);
    std::vector<cplx> psi{0.5, cplx(0, 0.5), 0.5, cplx(0.5, 0)};
    for (double t : {0.6, -1.1}) {
        auto moved = evolve(ctx, psi, t);
        // e^{-iHt} shifts the holomorphic picture by -t
        EXPECT_LT(std::abs(holomorphic_transform(ctx, moved, z) - holomorphic_transform(ctx, psi, z - t)), 1e-9);
    }
}

TEST(Holomorphic, SpectralFunctionInput) {
    PropagatorContext ctx(legendre());
    auto p2 = [&](double w) { return cplx(eval_poly(ctx.js, 2, w).value, 0.0); };
    cplx z(0.2, 0.5);
    EXPECT_LT(std::abs(holomorphic_transform(ctx, p2, z) - sigma_n(ctx, 2, z)), 1e-10);
}

TEST(Holomorphic, OrthonormalityInReproducingMeasure) {
    // |sigma_n|^2 mu decays like e^{-(x^2 + y^2)/2}, so both windows are [-8, 8]
    PropagatorContext ctx(hermite(-2, 0, 1));
    for (std::size_t m = 0; m <= 3; ++m)
        for (std::size_t n = 0; n <= 3; ++n) {
            cplx v = integrate_reproducing(
                ctx, [&](cplx z) { return sigma_n(ctx, m, z) * std::conj(sigma_n(ctx, n, z)); }, 8, -8, 8);
            EXPECT_LT(std::abs(v - (m == n ? 1.0 : 0.0)), 1e-4) << m << "," << n;
        }
}

TEST(Holomorphic, ReproducingProperty) {
    PropagatorContext ctx(hermite(-2, 0, 1));
    cplx v(0.3, -0.2);
    for (std::size_t n : {0u, 1u}) {
        cplx r = integrate_reproducing(ctx, [&](cplx z) { return kernel(ctx, z, v) * sigma_n(ctx, n, z); }, 8, -8, 8);
        EXPECT_LT(std::abs(r - sigma_n(ctx, n, v)), 1e-4) << n;
    }
}

TEST(MeanEnergy, KnownValues) {
    PropagatorContext h(hermite(-2, 0, 1));
    EXPECT_NEAR(mean_energy(h, cplx(5.0, 0.7)), 0.7, 1e-15);
    EXPECT_NEAR(mean_energy(h, cplx(-1.0, 0.7)), 0.7, 1e-15);
    EXPECT_NEAR(omega_density(h, 0.3), omega_density(h, -2.0), 1e-15);
    EXPECT_NEAR(omega_density(h, 0.3), -1.0, 1e-15);
    for (const auto& pd : {hermite(-1.5, 0.6, 0.8), laguerre_canonical(2.5), laguerre(1, -2, -1, 0.5), legendre(),
                           jacobi(-0.5, 2, 1.5, 2.5, 0.7)}) {
        PropagatorContext ctx(pd);
        EXPECT_NEAR(mean_energy(ctx, 0.0), moment(ctx.sm, 1), 1e-10) << family_name(pd.family);
    }
}

TEST(MeanEnergy, MatchesSeriesExpectation) {
    // <z|H|z>/<z|z> with coefficients conj(sigma_n(z)) and the tridiagonal action
    for (const auto& pd : {hermite(-1.5, 0.6, 0.8), laguerre_canonical(2.5), jacobi(-0.5, 2, 1.5, 2.5, 0.7)}) {
        PropagatorContext ctx(pd);
        cplx z(0.4, pd.family == Family::Laguerre ? -0.2 : 0.3);
        const std::size_t K = 80;
        std::vector<cplx> c(K);
        for (std::size_t n = 0; n < K; ++n) c[n] = std::conj(sigma_n(ctx, n, z));
        cplx num = 0.0, den = 0.0;
        for (std::size_t n = 0; n + 1 < K; ++n) {
            cplx hc = ctx.js.h(n) * c[n] + ctx.js.b(n + 1) * c[n + 1];
            if (n > 0) hc += ctx.js.b(n) * c[n - 1];
            num += std::conj(c[n]) * hc;
            den += std::norm(c[n]);
        }
        EXPECT_NEAR((num / den).real(), mean_energy(ctx, z), 1e-8) << family_name(pd.family);
        // omega density is -d<H>/dy
        double y = z.imag(), h = 1e-5;
        double d = (mean_energy(ctx, cplx(0, y + h)) - mean_energy(ctx, cplx(0, y - h))) / (2 * h);
        EXPECT_NEAR(omega_density(ctx, y), -d, 1e-7);
    }
}

TEST(Alpha, SpectralAnnihilation) {
    // sum_m <n|alpha|m> sigma_m(z) = z sigma_n(z)
    for (const auto& pd : {hermite(-2, 0, 1), hermite(-1.5, 0.6, 0.8), legendre(), jacobi(-0.5, 2, 1.5, 2.5, 0.7)}) {
        PropagatorContext ctx(pd);
        cplx z(0.3, 0.2);
        for (std::size_t n = 0; n <= 4; ++n) {
            cplx s = 0.0;
            for (std::size_t m = n + 1; m < 60; ++m) s += alpha_element(ctx, n, m) * sigma_n(ctx, m, z);
            EXPECT_LT(std::abs(s - z * sigma_n(ctx, n, z)), 1e-9) << family_name(pd.family) << " n=" << n;
        }
    }
}
