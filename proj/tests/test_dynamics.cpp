#include "small_system.hpp"

#include "ivr/dynamics.hpp"
#include "ivr/errors.hpp"
#include "ivr/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <random>

using namespace ivr;

namespace {

const ResonanceSet& res()
{
    static const ResonanceSet r = compute_resonances(small_system().cfg, small_system().sys, Solver::Direct);
    return r;
}

Superposition random_superposition(std::mt19937_64& rng, const std::vector<int>& S)
{
    std::normal_distribution<double> n;
    Superposition c;
    c.s_indices = S;
    c.c.resize(S.size());
    for (auto& z : c.c)
        z = {n(rng), n(rng)};
    c.c.normalize();
    return c;
}

const std::vector<int> S{11, 10, 9, 8, 7};

} // namespace

TEST(Dynamics, OverlapMatrixAtZeroIsIdentity)
{
    const auto rows = all_indices(12);
    const CMat M = overlap_matrix(res(), 0.0, rows, rows);
    EXPECT_LT((M - CMat::Identity(12, 12)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Dynamics, OverlapMatrixIsContraction)
{
    const auto rows = all_indices(12);
    for (double t : {3.0, 40.0, 700.0}) {
        const CMat M = overlap_matrix(res(), t, rows, S);
        const Vec sv = Eigen::JacobiSVD<CMat>(M).singularValues();
        EXPECT_LE(sv(0), 1.0 + 1e-8);
    }
}

TEST(Dynamics, OverlapMatrixMatchesPropagator)
{
    // <kappa|exp(-iHt)|kappa'> from the full H eigendecomposition
    const auto& s = small_system();
    const auto e = sym_eig(s.sys.H);
    const double t = 37.0, tau = t * units::au_per_fs;
    CVec ph(e.values.size());
    for (int g = 0; g < ph.size(); ++g)
        ph(g) = std::exp(std::complex<double>(0.0, -e.values(g) * tau));
    const CMat U = e.vectors.cast<std::complex<double>>() * ph.asDiagonal() * e.vectors.transpose();
    const auto rows = all_indices(12);
    const CMat M = overlap_matrix(res(), t, rows, rows);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            EXPECT_LT(std::abs(M(i, j) - U(s.sys.pb.q_flat[i], s.sys.pb.q_flat[j])), 1e-8);
}

TEST(Dynamics, PopulationIdentities)
{
    std::mt19937_64 rng(7);
    const auto rows = all_indices(12);
    for (int trial = 0; trial < 20; ++trial) {
        const auto c = random_superposition(rng, S);
        EXPECT_NEAR(population(c, res(), 0.0, rows), 1.0, 1e-12);
        const double t = std::uniform_real_distribution<double>(0.0, 1500.0)(rng);
        const double P = population(c, res(), t, rows);
        EXPECT_GE(P, -1e-12);
        EXPECT_LE(P, 1.0 + 1e-8);
        const auto [W, Pt] = overlap_measure(c, res(), t, rows);
        EXPECT_NEAR(P, W + Pt, 1e-12);
        const auto d = decompose(c, res(), t, rows);
        EXPECT_NEAR(P, d.direct + d.interference, 1e-12);
    }
}

TEST(Dynamics, SingleStateHasNoInterference)
{
    Superposition c{{9}, CVec::Ones(1)};
    const auto d = decompose(c, res(), 25.0, all_indices(12));
    EXPECT_EQ(d.interference, 0.0);
}

TEST(Dynamics, PhaseRandomizationInvariance)
{
    std::mt19937_64 rng(11);
    const auto c = random_superposition(rng, S);
    const auto rows = all_indices(12);
    ResonanceSet flipped = res();
    std::bernoulli_distribution coin(0.5);
    for (int g = 0; g < flipped.n_total(); ++g)
        if (coin(rng))
            flipped.a.col(g) *= -1.0;
    for (double t : {0.0, 10.0, 55.5, 400.0})
        EXPECT_NEAR(population(c, res(), t, rows), population(c, flipped, t, rows), 1e-12);
}

TEST(Dynamics, TimeReversalSymmetry)
{
    std::mt19937_64 rng(3);
    auto c = random_superposition(rng, S);
    c.c = c.c.real().cast<std::complex<double>>();
    c.c.normalize();
    const auto rows = all_indices(12);
    for (double t : {5.0, 80.0})
        EXPECT_NEAR(population(c, res(), t, rows), population(c, res(), -t, rows), 1e-12);
}

TEST(Dynamics, TraceMatchesPointwiseEvaluation)
{
    std::mt19937_64 rng(5);
    const auto c = random_superposition(rng, S);
    const auto rows = all_indices(12);
    const Vec t = time_grid(100.0, 0.5);
    ASSERT_EQ(t.size(), 201);
    const auto tr = population_trace(c, res(), t, rows, 2);
    for (int i : {0, 17, 200}) {
        EXPECT_NEAR(tr.P(i), population(c, res(), t(i), rows), 1e-13);
        EXPECT_NEAR(tr.P(i), tr.W(i) + tr.P_tilde(i), 1e-12);
    }
    EXPECT_NEAR(tr.W(0), 1.0, 1e-12);
    EXPECT_NEAR(tr.P_tilde(0), 0.0, 1e-12);
}

TEST(Dynamics, MeanEnergyMatchesHamiltonian)
{
    std::mt19937_64 rng(9);
    const auto c = random_superposition(rng, S);
    const auto& pb = small_system().sys.pb;
    CVec psi = CVec::Zero(48);
    for (std::size_t k = 0; k < S.size(); ++k)
        psi(pb.q_flat[S[k]]) = c.c(k);
    const double expect = (psi.adjoint() * small_system().sys.H.cast<std::complex<double>>() * psi)(0).real();
    EXPECT_NEAR(mean_energy(c, res()), expect, 1e-13);
}

TEST(Dynamics, FitRecoversSyntheticDecay)
{
    // P_inf is the plain 1 ps average, so the oracle is the analytic mean and an
    // independent brute-force least-squares t_delta
    PopulationTrace tr;
    tr.t_fs = time_grid(1500.0, 0.25);
    const double pinf = 0.4, td = 57.35;
    tr.P = (pinf + (1 - pinf) * (-tr.t_fs.array() / td).exp()).matrix();
    tr.W = tr.P;
    tr.P_tilde = Vec::Zero(tr.P.size());
    const auto fit = fit_decay(tr, 400.0, 1000.0);
    double mean = 0.0;
    int n = 0;
    for (int i = 0; i < tr.t_fs.size(); ++i)
        if (tr.t_fs(i) <= 1000.0) {
            mean += tr.P(i);
            ++n;
        }
    mean /= n;
    EXPECT_NEAR(fit.P_inf, mean, 1e-12);
    auto sse = [&](double tau) {
        double s = 0.0;
        for (int i = 0; i < tr.t_fs.size() && tr.t_fs(i) <= 400.0; ++i) {
            const double r = mean + (1 - mean) * std::exp(-tr.t_fs(i) / tau) - tr.P(i);
            s += r * r;
        }
        return s;
    };
    double best = 1.0, bv = sse(1.0);
    for (double tau = 1.0; tau < 200.0; tau += 1e-3)
        if (const double v = sse(tau); v < bv) {
            bv = v;
            best = tau;
        }
    EXPECT_NEAR(fit.t_delta, best, 2e-3);
    EXPECT_GT(fit.t_delta, 0.0);
}

TEST(Dynamics, FlatTraceIsDegenerate)
{
    PopulationTrace tr;
    tr.t_fs = time_grid(1500.0, 1.0);
    tr.P = Vec::Constant(tr.t_fs.size(), 0.999);
    tr.P(0) = 1.0;
    EXPECT_THROW(fit_decay(tr), DegenerateFit);
}

TEST(Dynamics, SuperpositionValidation)
{
    Superposition c{{0, 1}, CVec::Ones(2)};
    EXPECT_THROW(c.validate(12), InvalidArgument);
    c.c.normalize();
    EXPECT_NO_THROW(c.validate(12));
    c.s_indices = {0, 12};
    EXPECT_THROW(c.validate(12), InvalidArgument);
}

TEST(Dynamics, WavepacketNormIsConserved)
{
    const auto& s = small_system();
    std::mt19937_64 rng(13);
    const auto c = random_superposition(rng, S);
    const Mat X = eigenvectors_by_resolvent(res(), s.sys.pb, s.sys.V);
    for (double t : {0.0, 50.0, 500.0}) {
        const auto d = wavepacket_density(c, res(), res().vectors, s.bases.cs, s.bases.co, t);
        EXPECT_NEAR(d.norm, 1.0, 1e-10);
        EXPECT_GE(d.rho.minCoeff(), 0.0);
        const auto r = wavepacket_density(c, res(), X, s.bases.cs, s.bases.co, t);
        EXPECT_LT((r.rho - d.rho).cwiseAbs().maxCoeff(), 1e-8 * d.rho.maxCoeff());
    }
}
