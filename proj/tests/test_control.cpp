#include "small_system.hpp"

#include "ivr/control.hpp"
#include "ivr/errors.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ivr;

namespace {

const ResonanceSet& res()
{
    static const ResonanceSet r = compute_resonances(small_system().cfg, small_system().sys, Solver::Direct);
    return r;
}

const std::vector<int> S{11, 10, 9, 8, 7, 6};
const std::vector<int> rows = all_indices(12);

} // namespace

TEST(Control, EigenpairAndPopulationAgree)
{
    for (auto mode : {ControlMode::Maximize, ControlMode::Minimize}) {
        const auto r = optimize(res(), S, 60.0, mode, rows);
        EXPECT_NEAR(r.c_opt.c.norm(), 1.0, 1e-12);
        EXPECT_LT(r.residual, 1e-10);
        EXPECT_GE(r.lambda, -1e-12);
        EXPECT_LE(r.lambda, 1.0 + 1e-8);
        EXPECT_NEAR(population(r.c_opt, res(), 60.0, rows), r.lambda, 1e-10);
        EXPECT_DOUBLE_EQ(r.lambda, mode == ControlMode::Maximize ? r.spectrum(r.spectrum.size() - 1) : r.spectrum(0));
        // phase convention: largest component real positive
        Eigen::Index k;
        r.c_opt.c.cwiseAbs().maxCoeff(&k);
        EXPECT_EQ(r.c_opt.c(k).imag(), 0.0);
        EXPECT_GT(r.c_opt.c(k).real(), 0.0);
    }
}

TEST(Control, VariationalSandwich)
{
    const double T = 100.0;
    const auto hi = optimize(res(), S, T, ControlMode::Maximize, rows);
    const CMat K = population_kernel(res(), T, rows, S);
    std::mt19937_64 rng(17);
    std::normal_distribution<double> n;
    for (int i = 0; i < 1000; ++i) {
        CVec c(S.size());
        for (auto& z : c)
            z = {n(rng), n(rng)};
        c.normalize();
        const double q = (c.adjoint() * K * c)(0).real();
        EXPECT_GE(q, hi.spectrum(0) - 1e-10);
        EXPECT_LE(q, hi.lambda + 1e-10);
    }
}

TEST(Control, BeatsEverySingleState)
{
    const double T = 100.0;
    const auto hi = optimize(res(), S, T, ControlMode::Maximize, rows);
    const auto lo = optimize(res(), S, T, ControlMode::Minimize, rows);
    for (int k : S) {
        const double p = population(Superposition{{k}, CVec::Ones(1)}, res(), T, rows);
        EXPECT_GE(hi.lambda, p - 1e-12);
        EXPECT_LE(lo.lambda, p + 1e-12);
    }
}

TEST(Control, ZeroTimeKernelIsIdentity)
{
    const auto r = optimize(res(), S, 0.0, ControlMode::Maximize, rows);
    EXPECT_NEAR(r.lambda, 1.0, 1e-12);
    EXPECT_LT((r.spectrum.array() - 1.0).abs().maxCoeff(), 1e-12);
    EXPECT_TRUE(r.degenerate);
}

TEST(Control, SingleStateSubset)
{
    const auto r = optimize(res(), {9}, 40.0, ControlMode::Maximize, rows);
    EXPECT_NEAR(std::abs(r.c_opt.c(0) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(r.lambda, population(Superposition{{9}, CVec::Ones(1)}, res(), 40.0, rows), 1e-12);
}

TEST(Control, ModeNames)
{
    EXPECT_EQ(parse_mode("max"), ControlMode::Maximize);
    EXPECT_EQ(parse_mode("minimize"), ControlMode::Minimize);
    EXPECT_EQ(to_string(ControlMode::Minimize), "min");
    EXPECT_THROW(parse_mode("sideways"), InvalidArgument);
}
