#include "ivr/dvr.hpp"
#include "ivr/errors.hpp"
#include "ivr/model.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

using namespace ivr;

TEST(Dvr, KineticMatrixElements)
{
    const DvrGrid g{1.0, 11.0, 101};
    const Mat T = kinetic_matrix(g, 1.0);
    const double dx = g.spacing();
    const double pi2 = std::numbers::pi * std::numbers::pi;
    EXPECT_NEAR(T(7, 7), pi2 / (6 * dx * dx), 1e-12);
    EXPECT_NEAR(T(7, 8), -1.0 / (dx * dx), 1e-12);
    EXPECT_NEAR(T(7, 9), 2.0 / (4 * 2 * dx * dx), 1e-12);
    EXPECT_EQ((T - T.transpose()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dvr, FirstDerivativeIsAntisymmetric)
{
    const Mat D = first_derivative_matrix(DvrGrid{1.0, 6.0, 64});
    EXPECT_LT((D + D.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(D.diagonal().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Dvr, InvalidGridRejected)
{
    EXPECT_THROW((DvrGrid{2.0, 1.0, 10}.validate()), InvalidArgument);
    EXPECT_THROW((DvrGrid{0.5, 1.0, 8}.validate()), InvalidArgument);
}

namespace {

BondEigenbasis harmonic(double mu, double w, int keep)
{
    // centred at R = 10 to keep the grid on R > 0
    return solve_bond(DvrGrid{2.0, 18.0, 161}, mu, [&](double r) { return 0.5 * mu * w * w * (r - 10) * (r - 10); },
                      1e9, keep);
}

} // namespace

TEST(Dvr, HarmonicOscillatorSpectrum)
{
    const auto b = harmonic(1.0, 1.0, 10);
    ASSERT_EQ(b.size(), 10);
    for (int n = 0; n < 10; ++n)
        EXPECT_NEAR(b.energies(n), n + 0.5, 1e-10);
    const Mat S = b.vectors.transpose() * b.vectors;
    EXPECT_LT((S - Mat::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dvr, HarmonicMomentumElements)
{
    const double mu = 2.0, w = 0.7;
    const auto b = harmonic(mu, w, 6);
    const Mat d = derivative_matrix(b);
    EXPECT_LT((d + d.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_NEAR(std::abs(d(0, 1)), std::sqrt(mu * w / 2), 1e-9);
    EXPECT_NEAR(d(0, 2), 0.0, 1e-9);
    const Mat p2 = momentum_squared_matrix(b);
    EXPECT_NEAR(p2(0, 0), mu * w / 2, 1e-9);
    EXPECT_NEAR(p2(1, 1), 3 * mu * w / 2, 1e-9);
    // kinetic energy is half the total for a harmonic level
    EXPECT_NEAR(p2(2, 2) / (2 * mu), 0.5 * b.energies(2), 1e-9);
}

TEST(Dvr, MorseAgreesWithAnalyticLevels)
{
    const auto s = default_surface();
    const auto [atoms, mc] = default_masses();
    const auto& p = s.morse[0];
    const auto b = solve_bond(DvrGrid{1.6, 12.0, 512}, mc.mu_zero_CS, [&](double r) { return p.value(r); }, p.D);
    const auto exact = morse_levels(p, mc.mu_zero_CS);
    EXPECT_EQ(b.n_bound, 45);
    ASSERT_EQ(b.size(), 45);
    for (int n = 0; n < 30; ++n)
        EXPECT_NEAR(b.energies(n), exact[n], 1e-9) << "level " << n;
    EXPECT_TRUE(b.warnings.empty());
}

TEST(Dvr, TruncationKeepsLowestStates)
{
    const auto full = harmonic(1.0, 1.0, -1);
    const auto cut = harmonic(1.0, 1.0, 4);
    ASSERT_EQ(cut.size(), 4);
    EXPECT_EQ(cut.n_bound, full.n_bound);
    for (int n = 0; n < 4; ++n)
        EXPECT_DOUBLE_EQ(cut.energies(n), full.energies(n));
}

TEST(Dvr, SmallBoxWarns)
{
    const auto s = default_surface();
    const auto& p = s.morse[0];
    const auto b = solve_bond(DvrGrid{1.6, 6.0, 200}, 27250.99, [&](double r) { return p.value(r); }, p.D);
    EXPECT_FALSE(b.warnings.empty());
}

TEST(Dvr, JsonRoundTrip)
{
    const auto b = harmonic(1.0, 1.0, 3);
    nlohmann::json j = b;
    const auto c = j.get<BondEigenbasis>();
    EXPECT_EQ(c.grid.N, b.grid.N);
    EXPECT_EQ(c.n_bound, b.n_bound);
    EXPECT_EQ((c.energies - b.energies).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ((c.vectors - b.vectors).cwiseAbs().maxCoeff(), 0.0);
}
