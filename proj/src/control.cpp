#include "ivr/control.hpp"

#include "ivr/errors.hpp"

#include <complex>

namespace ivr {

ControlResult optimize(const ResonanceSet& res, const std::vector<int>& S, double T_fs, ControlMode mode,
                       const std::vector<int>& rows)
{
    if (S.empty())
        throw InvalidArgument("optimize: empty subset");
    if (T_fs < 0.0)
        throw InvalidArgument("optimize: negative target time");
    const CMat K0 = population_kernel(res, T_fs, rows, S);
    const CMat K = 0.5 * (K0 + K0.adjoint());
    Eigen::SelfAdjointEigenSolver<CMat> es(K);
    if (es.info() != Eigen::Success)
        throw EigensolverFailure("optimize: Hermitian eigensolver failed");

    const Eigen::Index n = K.rows();
    const Eigen::Index pick = mode == ControlMode::Maximize ? n - 1 : 0;
    ControlResult r;
    r.mode = mode;
    r.T_fs = T_fs;
    r.spectrum = es.eigenvalues();
    r.lambda = r.spectrum(pick);
    if (n > 1) {
        const double gap = mode == ControlMode::Maximize ? r.spectrum(n - 1) - r.spectrum(n - 2)
                                                         : r.spectrum(1) - r.spectrum(0);
        r.degenerate = gap < 1e-8;
    }
    CVec c = es.eigenvectors().col(pick);
    Eigen::Index big;
    c.cwiseAbs().maxCoeff(&big);
    c *= std::polar(1.0, -std::arg(c(big)));
    c(big) = std::abs(c(big));
    c.normalize();
    r.residual = (K * c - r.lambda * c).norm();
    r.c_opt = Superposition{S, c};
    return r;
}

ControlMode parse_mode(const std::string& s)
{
    if (s == "max" || s == "maximize")
        return ControlMode::Maximize;
    if (s == "min" || s == "minimize")
        return ControlMode::Minimize;
    throw InvalidArgument("unknown control mode '" + s + "'");
}

std::string to_string(ControlMode m) { return m == ControlMode::Maximize ? "max" : "min"; }

} // namespace ivr
