#pragma once

#include "ivr/basis.hpp"
#include "ivr/control.hpp"
#include "ivr/dvr.hpp"
#include "ivr/dynamics.hpp"
#include "ivr/model.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace ivr {

enum class Solver { Feshbach, Direct, Both };
enum class MeasureSet { Q, S };
enum class DensityVectors { Direct, Resolvent };

struct RunConfig
{
    // [model]
    double amu = units::amu;
    double m_O_amu = 15.9994, m_C_amu = 12.011, m_S_amu = 32.06;
    KineticPairing pairing = KineticPairing::Swapped;
    std::array<MorseParams, 3> morse = default_surface().morse;
    double E_d = 0.100;

    // [dvr]
    DvrGrid cs_grid{1.6, 12.0, 512};
    DvrGrid co_grid{1.4, 30.0, 1024};
    int cs_max_states = -1;
    int co_max_states = -1;

    // [basis]
    HamiltonianOptions hamiltonian;
    QBasis q_basis = QBasis::Product;
    PartitionKind partition = PartitionKind::CoGround;

    // [resonances]
    Solver solver = Solver::Feshbach;
    double cluster_gap = 1e-7;

    // [control]
    std::string subset = "top9"; ///< "topN" or comma list of Q indices
    double T_fs = 100.0;
    ControlMode mode = ControlMode::Maximize;
    MeasureSet measure = MeasureSet::Q;

    // [evolve]
    double t_end_fs = 1500.0;
    double dt_fs = 0.25;
    double fit_window_fs = 400.0;
    double average_window_fs = 1000.0;
    std::vector<double> snapshots_fs{0.0, 50.0, 100.0};
    DensityWindow window{1.6, 8.0, 1.4, 4.0, 4};
    DensityVectors density_vectors = DensityVectors::Direct;

    // [classical]
    double E_classical = 0.097964;
    double cl_dt_fs = 0.05;
    double lyap_t_end_fs = 1200.0;
    double d0 = 1e-8;
    double smooth_fs = 50.0;
    int sos_n_traj = 20;
    double sos_t_end_fs = 2000.0;
    int island_n = 50;
    double island_threshold = 5.0;
    double stable_R1 = 3.0, stable_P1 = 0.0;
    double chaotic_R1 = 4.5, chaotic_P1 = 0.0;
    int ensemble_n_traj = 200;
    double ensemble_t_end_fs = 2000.0;

    // [run]
    std::uint64_t seed = 1;
    int threads = 1;

    SurfaceModel surface() const;
    AtomMasses masses() const;
    MassConvention convention() const;

    /// Resolved config, one "section.key = value" per entry, sorted.
    std::map<std::string, std::string> canonical() const;
    /// FNV-1a hash of the canonical entries whose section is in `sections` (all if empty).
    std::uint64_t hash(const std::vector<std::string>& sections = {}) const;
    std::string hash_hex(const std::vector<std::string>& sections = {}) const;
};

/// Defaults, then the INI file (if non-empty path), then "section.key=value" overrides.
/// Unknown sections/keys and invalid values raise ConfigError.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Applies one "section.key=value" assignment.
void apply_setting(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Schema listing for documentation: key, default, description.
std::vector<std::array<std::string, 3>> config_schema();

/// Q indices of the control subset.
std::vector<int> resolve_subset(const RunConfig& cfg, const PartitionedBasis& pb);

} // namespace ivr
