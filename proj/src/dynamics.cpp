#include "ivr/dynamics.hpp"

#include "ivr/errors.hpp"
#include "ivr/model.hpp"
#include "ivr/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <cmath>
#include <complex>
#include <numeric>

namespace ivr {

namespace {

using cd = std::complex<double>;

Mat rows_of(const Mat& a, const std::vector<int>& idx)
{
    Mat out(idx.size(), a.cols());
    for (std::size_t i = 0; i < idx.size(); ++i)
        out.row(i) = a.row(idx[i]);
    return out;
}

CVec phases(const Vec& E, double t_fs)
{
    const double t = t_fs * units::au_per_fs;
    CVec p(E.size());
    for (Eigen::Index g = 0; g < E.size(); ++g)
        p(g) = std::polar(1.0, -E(g) * t);
    return p;
}

// M restricted to columns S, applied to c: (M c)_k for k in rows
CVec evolve_q(const Superposition& c, const ResonanceSet& res, double t_fs, const std::vector<int>& rows)
{
    const CVec b = exact_amplitudes(c, res);
    const CVec bt = b.cwiseProduct(phases(res.E, t_fs));
    return rows_of(res.a, rows).cast<cd>() * bt;
}

} // namespace

void Superposition::validate(int n_kappa) const
{
    if (s_indices.empty() || static_cast<Eigen::Index>(s_indices.size()) != c.size())
        throw InvalidArgument("superposition: index list and coefficients differ in length");
    for (int k : s_indices)
        if (k < 0 || k >= n_kappa)
            throw InvalidArgument("superposition: index outside Q");
    if (std::abs(c.squaredNorm() - 1.0) > 1e-12)
        throw InvalidArgument("superposition: coefficients not normalized");
}

std::vector<int> all_indices(int n)
{
    std::vector<int> v(n);
    std::iota(v.begin(), v.end(), 0);
    return v;
}

CMat overlap_matrix(const ResonanceSet& res, double t_fs, const std::vector<int>& rows, const std::vector<int>& cols)
{
    const CMat L = rows_of(res.a, rows).cast<cd>() * phases(res.E, t_fs).asDiagonal();
    return L * rows_of(res.a, cols).transpose().cast<cd>();
}

CMat population_kernel(const ResonanceSet& res, double t_fs, const std::vector<int>& rows, const std::vector<int>& S)
{
    const CMat M = overlap_matrix(res, t_fs, rows, S);
    return M.adjoint() * M;
}

CVec exact_amplitudes(const Superposition& c, const ResonanceSet& res)
{
    c.validate(res.n_kappa());
    // b_gamma = sum_k c_k a*_{k gamma}; a is real
    return rows_of(res.a, c.s_indices).transpose().cast<cd>() * c.c;
}

double population(const Superposition& c, const ResonanceSet& res, double t_fs, const std::vector<int>& rows)
{
    return evolve_q(c, res, t_fs, rows).squaredNorm();
}

Decomposition decompose(const Superposition& c, const ResonanceSet& res, double t_fs, const std::vector<int>& rows)
{
    c.validate(res.n_kappa());
    const CMat M = overlap_matrix(res, t_fs, rows, c.s_indices);
    const CMat f = M.adjoint() * M; // f_{k'k} = sum_k'' M*_{k''k'} M_{k''k}; g_k = f_kk
    Decomposition d{0.0, 0.0};
    const Eigen::Index n = c.c.size();
    for (Eigen::Index k = 0; k < n; ++k)
        d.direct += std::norm(c.c(k)) * f(k, k).real();
    for (Eigen::Index kp = 0; kp < n; ++kp)
        for (Eigen::Index k = 0; k < n; ++k)
            if (k != kp)
                d.interference += (std::conj(c.c(kp)) * c.c(k) * f(kp, k)).real();
    return d;
}

std::pair<double, double> overlap_measure(const Superposition& c, const ResonanceSet& res, double t_fs,
                                          const std::vector<int>& rows)
{
    c.validate(res.n_kappa());
    const CVec b = phases(res.E, t_fs);
    double W = 0.0;
    for (std::size_t k = 0; k < c.s_indices.size(); ++k) {
        const auto ak = res.a.row(c.s_indices[k]);
        cd Mkk = 0.0;
        for (Eigen::Index g = 0; g < b.size(); ++g)
            Mkk += ak(g) * ak(g) * b(g);
        W += std::norm(c.c(k) * Mkk);
    }
    const double P = population(c, res, t_fs, rows);
    return {W, P - W};
}

Vec time_grid(double t_end_fs, double dt_fs)
{
    if (!(dt_fs > 0.0) || t_end_fs < 0.0)
        throw InvalidArgument("time grid needs dt > 0 and t_end >= 0");
    const int n = static_cast<int>(std::floor(t_end_fs / dt_fs + 1e-9)) + 1;
    Vec t(n);
    for (int i = 0; i < n; ++i)
        t(i) = i * dt_fs;
    return t;
}

PopulationTrace population_trace(const Superposition& c, const ResonanceSet& res, const Vec& t_fs,
                                 const std::vector<int>& rows, int threads)
{
    c.validate(res.n_kappa());
    const Eigen::Index nt = t_fs.size();
    const int ns = static_cast<int>(c.s_indices.size());
    PopulationTrace tr;
    tr.t_fs = t_fs;
    tr.P.resize(nt);
    tr.W.resize(nt);
    tr.P_tilde.resize(nt);
    tr.per_state.resize(nt, ns);

    const Mat A = rows_of(res.a, rows);
    const Mat AS = rows_of(res.a, c.s_indices);
    const CVec b = exact_amplitudes(c, res);
    // position of each S member inside the measured rows, -1 if not measured
    std::vector<int> s_in_rows(ns, -1);
    for (int k = 0; k < ns; ++k)
        for (std::size_t r = 0; r < rows.size(); ++r)
            if (rows[r] == c.s_indices[k])
                s_in_rows[k] = static_cast<int>(r);
    const Mat AS2 = AS.cwiseProduct(AS);

    parallel_for(static_cast<int>(nt), threads, [&](int i) {
        const CVec ph = phases(res.E, t_fs(i));
        const CVec q = A.cast<cd>() * b.cwiseProduct(ph);
        const CVec diagM = AS2.cast<cd>() * ph;
        double W = 0.0;
        for (int k = 0; k < ns; ++k)
            W += std::norm(c.c(k) * diagM(k));
        tr.P(i) = q.squaredNorm();
        tr.W(i) = W;
        tr.P_tilde(i) = tr.P(i) - W;
        const CVec qs = AS.cast<cd>() * b.cwiseProduct(ph);
        for (int k = 0; k < ns; ++k)
            tr.per_state(i, k) = std::norm(qs(k));
    });
    return tr;
}

DecayFit fit_decay(const PopulationTrace& trace, double fit_window, double average_window)
{
    const Vec& t = trace.t_fs;
    const Vec& P = trace.P;
    if (t.size() < 2 || t(t.size() - 1) < average_window - 1e-9)
        throw InvalidArgument("fit_decay: trace shorter than the averaging window");
    DecayFit fit;
    fit.fit_window = fit_window;
    fit.average_window = average_window;
    double sum = 0.0;
    int n = 0;
    double Pmin = 1.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (t(i) <= average_window + 1e-9) {
            sum += P(i);
            ++n;
        }
        if (t(i) <= fit_window + 1e-9)
            Pmin = std::min(Pmin, P(i));
    }
    fit.P_inf = sum / n;
    if (Pmin >= 0.99)
        throw DegenerateFit("population never drops below 0.99 inside the fit window");

    auto sse = [&](double log_td) {
        const double td = std::exp(log_td);
        double s = 0.0;
        for (Eigen::Index i = 0; i < t.size() && t(i) <= fit_window + 1e-9; ++i) {
            const double r = fit.P_inf + (1.0 - fit.P_inf) * std::exp(-t(i) / td) - P(i);
            s += r * r;
        }
        return s;
    };
    // coarse log scan, then Brent inside the best bracket
    const double lo = std::log(0.01), hi = std::log(1e5);
    const int scan = 200;
    int best = 0;
    double best_v = sse(lo);
    for (int k = 1; k <= scan; ++k) {
        const double v = sse(lo + (hi - lo) * k / scan);
        if (v < best_v) {
            best_v = v;
            best = k;
        }
    }
    const double a = lo + (hi - lo) * std::max(0, best - 1) / scan;
    const double b = lo + (hi - lo) * std::min(scan, best + 1) / scan;
    const auto r = boost::math::tools::brent_find_minima(sse, a, b, 52);
    fit.t_delta = std::exp(r.first);
    int m = 0;
    for (Eigen::Index i = 0; i < t.size() && t(i) <= fit_window + 1e-9; ++i)
        ++m;
    fit.residual = std::sqrt(r.second / m);
    return fit;
}

double mean_energy(const Superposition& c, const ResonanceSet& res)
{
    const CVec b = exact_amplitudes(c, res);
    return (b.cwiseAbs2().transpose() * res.E).value() / b.squaredNorm();
}

WavepacketDensity wavepacket_density(const Superposition& c, const ResonanceSet& res, const Mat& vectors,
                                     const BondEigenbasis& cs, const BondEigenbasis& co, double t_fs,
                                     const DensityWindow& window)
{
    const int ns = cs.size(), no = co.size();
    if (vectors.rows() != ns * no || vectors.cols() != res.n_total())
        throw InvalidArgument("wavepacket_density: eigenvector matrix has the wrong shape");
    const CVec b = exact_amplitudes(c, res).cwiseProduct(phases(res.E, t_fs));
    const CVec d = vectors.cast<cd>() * b; // product-basis coefficients, flat m * no + n
    CMat Dmn(ns, no);
    for (int m = 0; m < ns; ++m)
        for (int n = 0; n < no; ++n)
            Dmn(m, n) = d(m * no + n);
    const CMat psi = cs.vectors.cast<cd>() * Dmn * co.vectors.transpose().cast<cd>();
    const double dA = cs.grid.spacing() * co.grid.spacing();
    const Mat rho_full = psi.cwiseAbs2() / dA;

    WavepacketDensity out;
    out.t_fs = t_fs;
    out.norm = rho_full.sum() * dA;
    const Eigen::Index N1 = rho_full.rows(), N2 = rho_full.cols();
    out.boundary_max = std::max({rho_full.row(0).maxCoeff(), rho_full.row(N1 - 1).maxCoeff(),
                                 rho_full.col(0).maxCoeff(), rho_full.col(N2 - 1).maxCoeff()});

    std::vector<int> i1, i2;
    const int st = std::max(1, window.stride);
    for (int i = 0; i < N1; i += st)
        if (cs.grid.point(i) >= window.R1_min && cs.grid.point(i) <= window.R1_max)
            i1.push_back(i);
    for (int j = 0; j < N2; j += st)
        if (co.grid.point(j) >= window.R2_min && co.grid.point(j) <= window.R2_max)
            i2.push_back(j);
    out.R1.resize(i1.size());
    out.R2.resize(i2.size());
    out.rho.resize(i1.size(), i2.size());
    for (std::size_t a = 0; a < i1.size(); ++a) {
        out.R1(a) = cs.grid.point(i1[a]);
        for (std::size_t bb = 0; bb < i2.size(); ++bb)
            out.rho(a, bb) = rho_full(i1[a], i2[bb]);
    }
    for (std::size_t bb = 0; bb < i2.size(); ++bb)
        out.R2(bb) = co.grid.point(i2[bb]);
    return out;
}

} // namespace ivr
