#pragma once

#include <Eigen/Dense>

namespace ivr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

struct SymEig
{
    Vec values; ///< ascending
    Mat vectors; ///< columns
};

/// Dense symmetric eigendecomposition (LAPACK divide and conquer). Only the
/// lower triangle of `a` is referenced. Throws EigensolverFailure.
SymEig sym_eig(const Mat& a);

/// Eigenvalues only.
Vec sym_eigvals(const Mat& a);

/// Rayleigh-Ritz of symmetric `a` on span(Z) in extended precision. Z is
/// re-orthonormalized and replaced by the Ritz vectors; values receives the Ritz values.
void rayleigh_ritz_extended(const Mat& a, Mat& Z, Vec& values);

/// Re-resolves eigenvectors inside clusters of eigenvalues closer than `gap` with
/// an extended-precision Rayleigh-Ritz step on the cluster subspace. Returns the
/// number of clusters touched.
int refine_clusters(const Mat& a, SymEig& eig, double gap);

} // namespace ivr
