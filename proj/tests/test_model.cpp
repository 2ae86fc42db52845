#include "ivr/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ivr;

TEST(Model, MorseMinimumAndAsymptote)
{
    const MorseParams p{0.1, 1.2, 2.5};
    EXPECT_DOUBLE_EQ(p.value(2.5), 0.0);
    EXPECT_DOUBLE_EQ(p.derivative(2.5), 0.0);
    EXPECT_NEAR(p.value(60.0), 0.1, 1e-15);
}

TEST(Model, MorseDerivativeMatchesFiniteDifference)
{
    const MorseParams p{0.21238, 1.6251, 2.2559};
    for (double r : {1.8, 2.2, 2.9, 4.0}) {
        const double h = 1e-6;
        EXPECT_NEAR(p.derivative(r), (p.value(r + h) - p.value(r - h)) / (2 * h), 1e-8);
    }
}

TEST(Model, OnsetFixesConstant)
{
    const auto s = default_surface();
    EXPECT_NEAR(s.c0, -0.14518, 1e-12);
    EXPECT_NEAR(evaluate_potential(1e4, s.morse[1].R0, s), 0.100, 1e-12);
}

TEST(Model, ReferencePoints)
{
    const auto s = default_surface();
    EXPECT_NEAR(evaluate_potential(2.9759, 2.2559, s), -0.003794, 1e-6);
    EXPECT_NEAR(evaluate_potential(s.morse[0].R0, 1e4, s), 0.22720, 1e-12);
}

TEST(Model, GradientMatchesFiniteDifference)
{
    const auto s = default_surface();
    const double h = 1e-6;
    for (auto [r1, r2] : {std::pair{3.0, 2.2}, std::pair{4.5, 2.6}, std::pair{2.4, 1.9}}) {
        const auto g = potential_gradient(r1, r2, s);
        EXPECT_NEAR(g[0], (evaluate_potential(r1 + h, r2, s) - evaluate_potential(r1 - h, r2, s)) / (2 * h), 1e-8);
        EXPECT_NEAR(g[1], (evaluate_potential(r1, r2 + h, s) - evaluate_potential(r1, r2 - h, s)) / (2 * h), 1e-8);
    }
}

TEST(Model, ReducedMasses)
{
    const auto [atoms, mc] = default_masses();
    EXPECT_NEAR(mc.mu_zero_CS, 27250.99, 0.01);
    EXPECT_NEAR(mc.mu_zero_CO, 21397.16, 0.01);
    EXPECT_DOUBLE_EQ(mc.cross_mass, atoms.m_C);
    // the swapped pairing exchanges the bond masses of the full kinetic energy
    const auto std_mc = make_mass_convention(atoms, KineticPairing::Standard);
    EXPECT_DOUBLE_EQ(mc.mu_full_1, std_mc.mu_full_2);
    EXPECT_DOUBLE_EQ(mc.mu_full_2, std_mc.mu_full_1);
}

TEST(Model, AnalyticMorseLevels)
{
    const auto s = default_surface();
    const auto [atoms, mc] = default_masses();
    const auto cs = morse_levels(s.morse[0], mc.mu_zero_CS);
    ASSERT_EQ(cs.size(), 45u);
    EXPECT_EQ(morse_bound_count(s.morse[0], mc.mu_zero_CS), 45);
    EXPECT_NEAR(cs.back(), 0.085144, 1e-6);
    EXPECT_EQ(morse_bound_count(s.morse[1], mc.mu_zero_CO), 59);
    for (std::size_t i = 1; i < cs.size(); ++i)
        EXPECT_GT(cs[i], cs[i - 1]);
    // harmonic limit of the ground level
    const double w = morse_harmonic_frequency(s.morse[0], mc.mu_zero_CS);
    const double wx = s.morse[0].beta * s.morse[0].beta / (2 * mc.mu_zero_CS);
    EXPECT_NEAR(cs.front(), 0.5 * w - 0.25 * wx, 1e-15);
}

TEST(Model, NoBoundStates)
{
    EXPECT_TRUE(morse_levels(MorseParams{1e-9, 2.0, 2.0}, 1.0).empty());
}
