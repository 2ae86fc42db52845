#include "ivr/pipeline.hpp"

#include "ivr/errors.hpp"
#include "ivr/io.hpp"

#include <filesystem>

namespace ivr {

BondBases build_bases(const RunConfig& cfg)
{
    const SurfaceModel s = cfg.surface();
    const MassConvention mc = cfg.convention();
    BondBases b;
    b.cs = solve_bond(cfg.cs_grid, mc.mu_zero_CS, [&](double r) { return s.morse[0].value(r); }, s.morse[0].D,
                      cfg.cs_max_states);
    b.co = solve_bond(cfg.co_grid, mc.mu_zero_CO, [&](double r) { return s.morse[1].value(r); }, s.morse[1].D,
                      cfg.co_max_states);
    return b;
}

QuantumSystem build_system(const RunConfig& cfg, const BondBases& b)
{
    QuantumSystem sys;
    sys.H = full_hamiltonian(b.cs, b.co, cfg.surface(), cfg.convention(), cfg.hamiltonian);
    sys.pb = build_partition(b.cs, b.co, sys.H, cfg.partition, cfg.q_basis);
    sys.V = coupling_elements(sys.pb, sys.H);
    return sys;
}

ResonanceSet compute_resonances(const RunConfig& cfg, const QuantumSystem& sys, Solver solver,
                                const std::string& cache_dir)
{
    const std::string tag = solver == Solver::Direct ? "direct" : "feshbach";
    std::string path;
    if (!cache_dir.empty()) {
        ensure_directory(cache_dir);
        path = (std::filesystem::path(cache_dir) /
                ("resonances-" + tag + "-" + cfg.hash_hex({"model", "dvr", "basis"}) + "-" +
                 format_number(cfg.cluster_gap) + ".bin"))
                   .string();
        if (auto rs = load_resonances(path); rs && rs->n_total() == sys.pb.n_total())
            return *rs;
    }
    ResonanceSet rs;
    if (solver == Solver::Direct) {
        rs = direct_resonances(sys.pb, sys.H, cfg.cluster_gap);
    } else {
        rs = find_all_resonances(sys.pb, sys.V, cfg.threads);
        polish_clusters(rs, sys.pb, sys.V, sys.H, cfg.cluster_gap);
    }
    if (!path.empty())
        save_resonances(path, rs);
    return rs;
}

std::vector<int> measure_rows(const RunConfig& cfg, const PartitionedBasis& pb, const std::vector<int>& S)
{
    if (cfg.measure == MeasureSet::S)
        return S;
    std::vector<int> all(pb.n_kappa());
    for (int k = 0; k < pb.n_kappa(); ++k)
        all[k] = k;
    return all;
}

ClassicalModel classical_model(const RunConfig& cfg)
{
    return ClassicalModel::from(cfg.surface(), cfg.convention(), cfg.hamiltonian.include_cross,
                                cfg.hamiltonian.include_v3);
}

PhasePoint section_seed(const RunConfig& cfg, const ClassicalModel& m, double R1, double P1)
{
    auto x = on_shell(R1, P1, cfg.E_classical, m, m.surface.morse[1].R0);
    if (!x)
        throw InvalidArgument("section seed (R1, P1) is energetically forbidden");
    return *x;
}

} // namespace ivr
