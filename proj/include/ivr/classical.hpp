#pragma once

#include "ivr/model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ivr {

struct PhasePoint
{
    double R1 = 0.0, R2 = 0.0; ///< bohr
    double P1 = 0.0, P2 = 0.0; ///< a.u.
    double t = 0.0;            ///< fs
};

/// H = a11 P1^2/2 + a22 P2^2/2 + a12 P1 P2 + V(R1, R2).
struct ClassicalModel
{
    SurfaceModel surface;
    double a11 = 0.0, a22 = 0.0, a12 = 0.0;
    bool include_v3 = true;

    static ClassicalModel from(const SurfaceModel& s, const MassConvention& m, bool cross = true, bool v3 = true);

    double potential(double R1, double R2) const;
    std::array<double, 2> gradient(double R1, double R2) const;
    double energy(const PhasePoint& x) const;
    /// Zeroth-order bond energies (diagonal masses of this H).
    double bond_energy_cs(const PhasePoint& x) const;
    double bond_energy_co(const PhasePoint& x) const;
    /// Small-oscillation period of each bond, fs.
    double period_cs() const;
    double period_co() const;
};

/// One fourth-order symplectic step (Suzuki composition of velocity Verlet).
void symplectic_step(PhasePoint& x, double dt_fs, const ClassicalModel& model);

/// Point on the section R2 = R2_section with given (R1, P1) and H = E; the
/// outgoing (larger) P2 root. Empty if the point is energetically forbidden.
std::optional<PhasePoint> on_shell(double R1, double P1, double E, const ClassicalModel& model,
                                   double R2_section);

/// Largest |P1| on the section at energy E for the given R1 (0 if forbidden).
double section_p1_limit(double R1, double E, const ClassicalModel& model, double R2_section);

struct IntegrateOptions
{
    double dt_fs = 0.05;
    int record_every = 1;
    double R_exit = 20.0; ///< bohr; trajectory stops and is flagged past this
};

struct Trajectory
{
    std::vector<PhasePoint> points;
    bool dissociated = false;
    double max_rel_drift = 0.0;
};

/// Adjusts P2 so that H = E (keeping its sign), then integrates to t_end.
Trajectory integrate(const PhasePoint& initial, double E, double t_end_fs, const ClassicalModel& model,
                     const IntegrateOptions& opt = {});

struct SosRecord
{
    double E = 0.0;
    double R2_section = 0.0;
    std::vector<std::array<double, 2>> points; ///< (R1, P1)
    std::vector<PhasePoint> states;            ///< full phase point at each crossing
};

struct SosOptions
{
    int n_traj = 20;
    double t_end_fs = 2000.0;
    double dt_fs = 0.05;
    std::uint64_t seed = 1;
};

/// Crossings of R2 = R2_section with dR2/dt > 0, placed exactly on the section by
/// a Henon step (R2 as the independent variable). Initial conditions are drawn
/// uniformly over the accessible section.
SosRecord surface_of_section(double E, const ClassicalModel& model, double R2_section, const SosOptions& opt);

struct LyapunovTrace
{
    std::vector<double> t_fs;
    std::vector<double> Lambda;          ///< ln d(t)/d0 accumulated over renormalizations
    std::vector<double> Lambda_smoothed; ///< moving average
    double d0 = 1e-8;
    double lambda_t = 0.0;               ///< Lambda(t_end)/t_end, 1/ps
};

struct LyapunovOptions
{
    double t_end_fs = 1200.0;
    double dt_fs = 0.05;
    double d0 = 1e-8;
    double renorm_factor = 1e3; ///< rescale the twin once d > renorm_factor * d0
    double smooth_fs = 50.0;
    int record_every = 20;
};

/// Twin-trajectory estimate with configuration-space distance.
LyapunovTrace lyapunov(const PhasePoint& seed, double E, const ClassicalModel& model, const LyapunovOptions& opt = {});

/// Finite-time exponent only (1/ps), no trace.
double finite_time_lyapunov(const PhasePoint& seed, const ClassicalModel& model, const LyapunovOptions& opt);

struct IslandOptions
{
    int n_R1 = 50;
    int n_P1 = 50;
    double threshold_per_ps = 5.0;
    LyapunovOptions lyap;
};

struct IslandEstimate
{
    double fraction = 0.0;
    int n_cells = 0;
    int n_regular = 0;
    std::vector<std::array<double, 3>> cells; ///< (R1, P1, lambda_t)
};

/// Area fraction of the accessible section occupied by regular motion, from
/// a uniform cell grid classified by finite-time Lyapunov exponent.
IslandEstimate island_fraction(double E, const ClassicalModel& model, double R2_section, const IslandOptions& opt,
                               int threads = 1);

struct BondEnergySample
{
    double t_fs, E_cs, E_co, remainder;
};

std::vector<BondEnergySample> bond_energy_trace(const Trajectory& traj, const ClassicalModel& model);

struct EnsembleOptions
{
    int n_traj = 200;
    double t_end_fs = 2000.0;
    double dt_fs = 0.05;
    int record_every = 20;
    double E_co_ground = 0.0; ///< CO energy left in the CO bond at t = 0
    std::uint64_t seed = 1;
};

struct EnsembleDecay
{
    std::vector<double> t_fs;
    std::vector<double> mean_E_cs;
    double E_inf = 0.0;
    double tau_fs = 0.0;
    double rms = 0.0;        ///< fit residual
    double amplitude = 0.0;  ///< mean_E_cs(0) - E_inf
    double mean_E_total = 0.0;
    bool resolved = false;   ///< tau shorter than the simulated window
};

/// CS-excited ensemble: R1 sampled uniformly in time along the CS orbit on the
/// cut R2 = R2^0 at E - E_co_ground, CO at rest at a turning point of its
/// ground-level orbit, P1 rescaled onto H = E.
EnsembleDecay ensemble_decay(double E, const ClassicalModel& model, const EnsembleOptions& opt, int threads = 1);

} // namespace ivr
