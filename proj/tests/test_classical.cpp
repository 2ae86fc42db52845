#include "ivr/classical.hpp"
#include "ivr/model.hpp"
#include "ivr/pipeline.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ivr;

namespace {

ClassicalModel default_model() { return classical_model(RunConfig{}); }

} // namespace

TEST(Classical, FreeMotionIsStraight)
{
    ClassicalModel m = default_model();
    for (auto& p : m.surface.morse)
        p.D = 0.0;
    PhasePoint x{3.0, 2.0, 5.0, -3.0, 0.0};
    const PhasePoint x0 = x;
    for (int i = 0; i < 100; ++i)
        symplectic_step(x, 0.1, m);
    const double t = 10.0 * units::au_per_fs;
    EXPECT_NEAR(x.R1, x0.R1 + t * (m.a11 * x0.P1 + m.a12 * x0.P2), 1e-12);
    EXPECT_NEAR(x.R2, x0.R2 + t * (m.a22 * x0.P2 + m.a12 * x0.P1), 1e-12);
    EXPECT_DOUBLE_EQ(x.P1, x0.P1);
    EXPECT_DOUBLE_EQ(x.P2, x0.P2);
}

TEST(Classical, TimeReversible)
{
    const auto m = default_model();
    PhasePoint x = section_seed(RunConfig{}, m, 4.5, 0.0);
    const PhasePoint x0 = x;
    for (int i = 0; i < 4000; ++i)
        symplectic_step(x, 0.05, m);
    x.P1 = -x.P1;
    x.P2 = -x.P2;
    for (int i = 0; i < 4000; ++i)
        symplectic_step(x, 0.05, m);
    EXPECT_NEAR(x.R1, x0.R1, 1e-7);
    EXPECT_NEAR(x.R2, x0.R2, 1e-7);
    EXPECT_NEAR(-x.P1, x0.P1, 1e-4);
    EXPECT_NEAR(-x.P2, x0.P2, 1e-4);
}

TEST(Classical, EnergyDriftBelowTolerance)
{
    const RunConfig cfg;
    const auto m = default_model();
    for (double R1 : {cfg.stable_R1, cfg.chaotic_R1}) {
        const auto tr = integrate(section_seed(cfg, m, R1, 0.0), cfg.E_classical, 1200.0, m);
        EXPECT_FALSE(tr.dissociated);
        EXPECT_LT(tr.max_rel_drift, 1e-8);
    }
}

TEST(Classical, FourthOrderConvergence)
{
    const RunConfig cfg;
    const auto m = default_model();
    const auto seed = section_seed(cfg, m, cfg.chaotic_R1, 0.0);
    auto run = [&](double dt) {
        PhasePoint x = seed;
        const int n = static_cast<int>(std::lround(20.0 / dt));
        for (int i = 0; i < n; ++i)
            symplectic_step(x, dt, m);
        return x;
    };
    const auto ref = run(0.005), a = run(0.2), b = run(0.1);
    const double ea = std::hypot(a.R1 - ref.R1, a.R2 - ref.R2), eb = std::hypot(b.R1 - ref.R1, b.R2 - ref.R2);
    EXPECT_GT(ea / eb, 12.0);
}

TEST(Classical, BondEnergyBookkeeping)
{
    const RunConfig cfg;
    const auto m = default_model();
    IntegrateOptions io;
    io.record_every = 10;
    const auto tr = integrate(section_seed(cfg, m, cfg.chaotic_R1, 0.0), cfg.E_classical, 200.0, m, io);
    for (const auto& s : bond_energy_trace(tr, m))
        EXPECT_NEAR(s.E_cs + s.E_co + s.remainder, cfg.E_classical, 1e-8);
}

TEST(Classical, UncoupledBondsConserveEnergy)
{
    const RunConfig cfg;
    const auto m = ClassicalModel::from(cfg.surface(), cfg.convention(), false, false);
    PhasePoint x{3.3, 2.4, 4.0, -2.0, 0.0};
    const double e1 = m.bond_energy_cs(x), e2 = m.bond_energy_co(x);
    for (int i = 0; i < 10000; ++i)
        symplectic_step(x, 0.05, m);
    EXPECT_NEAR(m.bond_energy_cs(x), e1, 1e-9);
    EXPECT_NEAR(m.bond_energy_co(x), e2, 1e-9);
}

TEST(Classical, SmallOscillationPeriods)
{
    const auto m = default_model();
    EXPECT_NEAR(m.period_cs(), 27.45, 0.02 * 27.45);
    EXPECT_NEAR(m.period_co(), 18.10, 0.02 * 18.10);
    // numerical period of a small uncoupled CS oscillation
    const RunConfig cfg;
    const auto u = ClassicalModel::from(cfg.surface(), cfg.convention(), false, false);
    PhasePoint x{u.surface.morse[0].R0 + 1e-4, u.surface.morse[1].R0, 0.0, 0.0, 0.0};
    double last = -1.0, period = 0.0;
    int crossings = 0;
    double t = 0.0, prev = x.P1;
    while (crossings < 3) {
        symplectic_step(x, 0.01, u);
        t += 0.01;
        if (prev < 0.0 && x.P1 >= 0.0) {
            const double tc = t - 0.01 * x.P1 / (x.P1 - prev);
            if (last >= 0.0)
                period = tc - last;
            last = tc;
            ++crossings;
        }
        prev = x.P1;
    }
    EXPECT_NEAR(period, u.period_cs(), 1e-4 * u.period_cs());
}

TEST(Classical, LyapunovSeparatesRegularAndChaotic)
{
    const RunConfig cfg;
    const auto m = default_model();
    const auto st = lyapunov(section_seed(cfg, m, cfg.stable_R1, 0.0), cfg.E_classical, m);
    const auto ch = lyapunov(section_seed(cfg, m, cfg.chaotic_R1, 0.0), cfg.E_classical, m);
    EXPECT_GT(ch.lambda_t, 3.0 * st.lambda_t);
    EXPECT_EQ(st.t_fs.size(), st.Lambda.size());
    EXPECT_EQ(st.Lambda.size(), st.Lambda_smoothed.size());
}

TEST(Classical, SectionPointsLieOnShell)
{
    const RunConfig cfg;
    const auto m = default_model();
    SosOptions o;
    o.n_traj = 3;
    o.t_end_fs = 300.0;
    const auto sos = surface_of_section(cfg.E_classical, m, m.surface.morse[1].R0, o);
    ASSERT_FALSE(sos.states.empty());
    for (const auto& x : sos.states) {
        EXPECT_NEAR(x.R2, m.surface.morse[1].R0, 1e-9);
        EXPECT_NEAR(m.energy(x), cfg.E_classical, 1e-8);
        EXPECT_GT(m.a22 * x.P2 + m.a12 * x.P1, 0.0);
    }
}

TEST(Classical, SectionIsDeterministic)
{
    const RunConfig cfg;
    const auto m = default_model();
    SosOptions o;
    o.n_traj = 2;
    o.t_end_fs = 200.0;
    const auto a = surface_of_section(cfg.E_classical, m, m.surface.morse[1].R0, o);
    const auto b = surface_of_section(cfg.E_classical, m, m.surface.morse[1].R0, o);
    ASSERT_EQ(a.points.size(), b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i)
        EXPECT_EQ(a.points[i], b.points[i]);
}
