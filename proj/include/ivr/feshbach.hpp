#pragma once

#include "ivr/basis.hpp"
#include "ivr/linalg.hpp"

#include <string>
#include <vector>

namespace ivr {

inline constexpr double pole_guard = 1e-12;

struct ResonanceSet
{
    std::string solver;
    Vec E;                       ///< N_T exact eigenvalues, ascending
    Mat a;                       ///< N_kappa x N_T overlaps <kappa|gamma> (working Q basis)
    Vec C_abs;                   ///< |C_gamma|
    std::vector<int> iterations; ///< solver iterations per root (0 for direct)
    Vec residual;                ///< ||(E - H_eff(E)) D|| per root, or ||H x - E x|| for direct
    Mat vectors;                 ///< full eigenvectors in the product basis (direct path only)
    std::vector<int> anchor;     ///< P index whose pole the root was resolved against, or -1
    Vec offset;                  ///< exact E - E_beta_hat(anchor); E itself may round onto the pole

    /// E_gamma - E_beta_hat(b), exact when b is the anchor pole.
    double pole_distance(int g, int b, const Vec& poles) const
    {
        if (!anchor.empty() && anchor[g] == b)
            return offset(g);
        return E(g) - poles(b);
    }

    int n_total() const { return static_cast<int>(E.size()); }
    int n_kappa() const { return static_cast<int>(a.rows()); }
};

/// H_eff(E) = QHQ + sum_beta V(:,beta) V(:,beta)^T / (E - E_beta_hat). Throws
/// PoleProximity within pole_guard of any E_beta_hat.
Mat effective_hamiltonian(double E, const PartitionedBasis& pb, const CouplingBlock& V);

/// Shift matrix Delta(E) from the linear solve [E - PHP] X = PHQ in the product basis.
Mat shift_by_linear_solve(double E, const PartitionedBasis& pb, const Mat& H);

enum class RootSelection { Nearest, FixedIndex };

struct ScOptions
{
    RootSelection selection = RootSelection::Nearest;
    int index = 0;       ///< branch for FixedIndex
    int max_iter = 200;
    double tol = 1e-12;
};

struct ScRoot
{
    double E;
    Vec D; ///< unit eigenvector of H_eff(E)
    int iterations;
};

/// Plain fixed-point iteration E <- eig(H_eff(E)), with 2-cycle damping.
ScRoot self_consistent_root(double seed, const PartitionedBasis& pb, const CouplingBlock& V,
                            const ScOptions& opt = {});

/// Every eigenvalue of H through the effective Hamiltonian. Roots are located
/// by Sylvester-inertia counting between poles and resolved on a fixed branch
/// with safeguarded Newton. Throws IncompleteSpectrum if the count is off.
ResonanceSet find_all_resonances(const PartitionedBasis& pb, const CouplingBlock& V, int threads = 1);

/// One dense diagonalization of the full H. Near-degenerate clusters (gap < cluster_gap)
/// are refined in extended precision.
ResonanceSet direct_resonances(const PartitionedBasis& pb, const Mat& H, double cluster_gap = 1e-7);

/// Q states of the working basis expressed in the product basis.
Mat q_embedding(const PartitionedBasis& pb);

/// Full eigenvectors (product basis) rebuilt from Q components: the P part is
/// (E_gamma - PHP)^{-1} PHQ |gamma_Q>. `columns` empty means all roots.
Mat eigenvectors_by_resolvent(const ResonanceSet& res, const PartitionedBasis& pb, const CouplingBlock& V,
                              const std::vector<int>& columns = {});

/// Near-degenerate roots (gap < cluster_gap) carry an intra-cluster rotation set by
/// rounding in the partitioned representation. Rebuilds their full vectors and
/// re-resolves each cluster against H in extended precision. Returns clusters touched.
int polish_clusters(ResonanceSet& rs, const PartitionedBasis& pb, const CouplingBlock& V, const Mat& H,
                    double cluster_gap);

/// |C|^2 (1 + sum_beta (D.V_beta)^2 / (E - E_beta)^2) equals 1 for a correctly normalized root.
double normalization_identity(double E, const Vec& D, double C_abs, const PartitionedBasis& pb,
                              const CouplingBlock& V);

/// Same identity for root g of a Feshbach set, using the exact pole offset.
double normalization_identity(const ResonanceSet& rs, int g, const PartitionedBasis& pb, const CouplingBlock& V);

} // namespace ivr
