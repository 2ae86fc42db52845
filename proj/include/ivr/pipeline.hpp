#pragma once

#include "ivr/basis.hpp"
#include "ivr/classical.hpp"
#include "ivr/config.hpp"
#include "ivr/dvr.hpp"
#include "ivr/feshbach.hpp"

#include <string>

namespace ivr {

struct BondBases
{
    BondEigenbasis cs;
    BondEigenbasis co;
};

struct QuantumSystem
{
    Mat H;
    PartitionedBasis pb;
    CouplingBlock V;
};

BondBases build_bases(const RunConfig& cfg);

QuantumSystem build_system(const RunConfig& cfg, const BondBases& b);

/// Resonances from the requested solver (Both is treated as Feshbach; its
/// near-degenerate clusters are polished against H). If
/// `cache_dir` is non-empty the result is read from / written to a file keyed by
/// the config hash.
ResonanceSet compute_resonances(const RunConfig& cfg, const QuantumSystem& sys, Solver solver,
                                const std::string& cache_dir = {});

/// Rows of the population measure: all of Q, or S itself.
std::vector<int> measure_rows(const RunConfig& cfg, const PartitionedBasis& pb, const std::vector<int>& S);

ClassicalModel classical_model(const RunConfig& cfg);

/// Section seed on R2 = R2^0 at energy E with outgoing P2.
PhasePoint section_seed(const RunConfig& cfg, const ClassicalModel& m, double R1, double P1);

} // namespace ivr
