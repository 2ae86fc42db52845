#include "ivr/linalg.hpp"

#include "ivr/errors.hpp"

#include <lapacke.h>

#include <string>

namespace ivr {

namespace {

SymEig run_syevd(const Mat& a, char jobz)
{
    if (a.rows() != a.cols())
        throw InvalidArgument("sym_eig: matrix not square");
    const lapack_int n = static_cast<lapack_int>(a.rows());
    SymEig out;
    out.vectors = a;
    out.values.resize(n);
    if (n == 0)
        return out;
    const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, jobz, 'L', n, out.vectors.data(), n,
                                           out.values.data());
    if (info != 0)
        throw EigensolverFailure("dsyevd failed, info = " + std::to_string(info));
    if (jobz == 'N')
        out.vectors.resize(0, 0);
    return out;
}

} // namespace

SymEig sym_eig(const Mat& a) { return run_syevd(a, 'V'); }

Vec sym_eigvals(const Mat& a) { return run_syevd(a, 'N').values; }

void rayleigh_ritz_extended(const Mat& a, Mat& Zd, Vec& values)
{
    using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index k = Zd.cols();
    LMat Z = Zd.cast<long double>();
    // modified Gram-Schmidt, twice
    for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index c = 0; c < k; ++c) {
            for (Eigen::Index p = 0; p < c; ++p)
                Z.col(c) -= Z.col(p).dot(Z.col(c)) * Z.col(p);
            Z.col(c) /= Z.col(c).norm();
        }
    LMat AZ = LMat::Zero(a.rows(), k);
    for (Eigen::Index c = 0; c < k; ++c)
        for (Eigen::Index l = 0; l < a.cols(); ++l) {
            const long double z = Z(l, c);
            for (Eigen::Index r = 0; r < a.rows(); ++r)
                AZ(r, c) += static_cast<long double>(a(r, l)) * z;
        }
    LMat S = Z.transpose() * AZ;
    S = 0.5L * (S + S.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<LMat> es(S);
    Zd = (Z * es.eigenvectors()).cast<double>();
    values = es.eigenvalues().cast<double>();
}

int refine_clusters(const Mat& a, SymEig& eig, double gap)
{
    const Eigen::Index n = eig.values.size();
    int touched = 0;
    Eigen::Index i = 0;
    while (i < n) {
        Eigen::Index j = i + 1;
        while (j < n && eig.values(j) - eig.values(j - 1) < gap)
            ++j;
        const Eigen::Index k = j - i;
        if (k > 1) {
            Mat Z = eig.vectors.middleCols(i, k);
            Vec v;
            rayleigh_ritz_extended(a, Z, v);
            eig.vectors.middleCols(i, k) = Z;
            eig.values.segment(i, k) = v;
            ++touched;
        }
        i = j;
    }
    return touched;
}

} // namespace ivr
