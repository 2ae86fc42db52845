#pragma once

#include "ivr/basis.hpp"
#include "ivr/feshbach.hpp"
#include "ivr/linalg.hpp"

#include <vector>

namespace ivr {

/// Preparation c over an ordered subset S of the working Q basis.
struct Superposition
{
    std::vector<int> s_indices;
    CVec c;

    void validate(int n_kappa) const;
};

struct PopulationTrace
{
    Vec t_fs;
    Vec P;
    Vec W;
    Vec P_tilde;
    Mat per_state; ///< n_times x |S|, |<kappa|Psi(t)>|^2
};

struct DecayFit
{
    double t_delta = 0.0;       ///< fs
    double P_inf = 0.0;
    double fit_window = 400.0;  ///< fs
    double average_window = 1000.0;
    double residual = 0.0;      ///< rms misfit over the fit window
};

struct Decomposition
{
    double direct;       ///< sum |c_k|^2 g_k
    double interference; ///< sum_{k != k'} c*_k' c_k f_k'k
};

std::vector<int> all_indices(int n);

/// M_{k k'}(t) = sum_gamma a_{k gamma} a*_{k' gamma} exp(-i E_gamma t), rows x cols.
CMat overlap_matrix(const ResonanceSet& res, double t_fs, const std::vector<int>& rows,
                    const std::vector<int>& cols);

/// K(T) = M^dagger M with M restricted to columns S.
CMat population_kernel(const ResonanceSet& res, double t_fs, const std::vector<int>& rows,
                       const std::vector<int>& S);

double population(const Superposition& c, const ResonanceSet& res, double t_fs, const std::vector<int>& rows);

Decomposition decompose(const Superposition& c, const ResonanceSet& res, double t_fs, const std::vector<int>& rows);

/// (W, P_tilde) with W = sum_k |c_k M_kk|^2.
std::pair<double, double> overlap_measure(const Superposition& c, const ResonanceSet& res, double t_fs,
                                          const std::vector<int>& rows);

PopulationTrace population_trace(const Superposition& c, const ResonanceSet& res, const Vec& t_fs,
                                 const std::vector<int>& rows, int threads = 1);

Vec time_grid(double t_end_fs, double dt_fs);

/// P_inf = mean of P over [0, average_window]; t_delta from one-parameter least squares
/// of P_inf + (1 - P_inf) exp(-t / t_delta) over [0, fit_window].
DecayFit fit_decay(const PopulationTrace& trace, double fit_window = 400.0, double average_window = 1000.0);

/// Amplitudes b_gamma = <gamma|Psi(0)> = sum_k c_k a_{k gamma}.
CVec exact_amplitudes(const Superposition& c, const ResonanceSet& res);

/// <Psi|H|Psi>, constant in time.
double mean_energy(const Superposition& c, const ResonanceSet& res);

struct DensityWindow
{
    double R1_min = 0.0, R1_max = 1e9;
    double R2_min = 0.0, R2_max = 1e9;
    int stride = 1;
};

struct WavepacketDensity
{
    double t_fs = 0.0;
    Vec R1;
    Vec R2;
    Mat rho;                   ///< R1 x R2, probability per bohr^2 on the output window
    double norm = 0.0;         ///< integral over the full DVR product grid
    double boundary_max = 0.0; ///< largest density on the outer grid lines
};

/// |Psi(t)|^2 on the DVR product grid. `vectors` are full eigenvectors in the product basis.
WavepacketDensity wavepacket_density(const Superposition& c, const ResonanceSet& res, const Mat& vectors,
                                     const BondEigenbasis& cs, const BondEigenbasis& co, double t_fs,
                                     const DensityWindow& window = {});

} // namespace ivr
