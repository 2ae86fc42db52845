#pragma once

#include "ivr/dvr.hpp"
#include "ivr/linalg.hpp"
#include "ivr/model.hpp"

#include <vector>

namespace ivr {

/// Which kinetic pieces enter the coupling. `Exact` adds the diagonal p^2
/// corrections k_i p_i^2, k_i = (1/mu_full_i - 1/mu_zero_i)/2, so that the zeroth-order
/// plus coupling terms sum to the full H. `Bare` keeps only V3 and the
/// p1 p2 cross term.
enum class Couplings { Exact, Bare };

/// Q working basis: pure products, or eigenvectors of QHQ.
enum class QBasis { Product, Diagonalized };

/// Q = products with the CO bond in its ground state, or with the CS bond in its ground state.
enum class PartitionKind { CoGround, CsGround };

struct HamiltonianOptions
{
    Couplings couplings = Couplings::Bare;
    bool include_v3 = true;
    bool include_cross = true;
};

struct ProductIndex
{
    int m; ///< CS quantum number
    int n; ///< CO quantum number
};

struct PartitionedBasis
{
    int n_cs = 0;
    int n_co = 0;
    QBasis q_basis = QBasis::Product;
    std::vector<ProductIndex> q_indices;
    std::vector<ProductIndex> p_indices;
    std::vector<int> q_flat; ///< flat product index m * n_co + n
    std::vector<int> p_flat;
    Vec E_kappa;             ///< zeroth-order Q energies (bond sums, or QHQ eigenvalues)
    Mat QHQ;                 ///< Q block in the working Q basis
    Vec E_beta_hat;          ///< PHP eigenvalues, ascending
    Mat U_P;                 ///< product P states -> PHP eigenstates (columns)
    Mat U_Q;                 ///< product Q states -> QHQ eigenstates; empty for QBasis::Product

    int n_kappa() const { return static_cast<int>(q_flat.size()); }
    int n_beta() const { return static_cast<int>(p_flat.size()); }
    int n_total() const { return n_cs * n_co; }
    int flat(int m, int n) const { return m * n_co + n; }
};

struct CouplingBlock
{
    Mat V; ///< N_kappa x N_beta, <kappa|QHP|beta>
};

/// Full Hamiltonian in the product basis |m> x |n>, flat index m * n_co + n.
Mat full_hamiltonian(const BondEigenbasis& cs, const BondEigenbasis& co, const SurfaceModel& surface,
                     const MassConvention& masses, const HamiltonianOptions& opt = {});

/// Splits the product space, prediagonalizes PHP (and QHQ if requested).
PartitionedBasis build_partition(const BondEigenbasis& cs, const BondEigenbasis& co, const Mat& H,
                                 PartitionKind kind = PartitionKind::CoGround,
                                 QBasis q_basis = QBasis::Product);

/// V(kappa|beta) from the full H, rotated into the working Q basis and PHP eigenbasis.
CouplingBlock coupling_elements(const PartitionedBasis& pb, const Mat& H);

/// Rows of H restricted to an index list (helper for block extraction).
Mat submatrix(const Mat& H, const std::vector<int>& rows, const std::vector<int>& cols);

} // namespace ivr
