#include "ivr/feshbach.hpp"

#include "ivr/errors.hpp"
#include "ivr/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace ivr {

namespace {

void check_pole(double E, const Vec& poles)
{
    if (poles.size() == 0)
        return;
    const double gap = (poles.array() - E).abs().minCoeff();
    if (gap < pole_guard) {
        std::ostringstream os;
        os.precision(17);
        os << "trial energy " << E << " within " << gap << " of a P-space pole";
        throw PoleProximity(os.str());
    }
}

// g(s) = lambda_m(H_eff(E)) - E at E = base + sign * s. When `anchor` is a pole
// index, its denominator is taken as exactly sign * s so that roots hugging a
// pole are resolved in relative terms.
struct Branch
{
    const Mat& QHQ;
    const Mat& V;
    const Vec& poles;
    int anchor;
    double base;
    double sign;
    int m;

    struct Eval
    {
        double g;
        double dg; ///< dg/dE
        Vec D;
    };

    Eval operator()(double s) const
    {
        Vec den = (base - poles.array()).matrix() + Vec::Constant(poles.size(), sign * s);
        if (anchor >= 0)
            den(anchor) = sign * s;
        const Vec w = den.cwiseInverse();
        const Mat Heff = QHQ + V * w.asDiagonal() * V.transpose();
        SymEig e = sym_eig(Heff);
        Eval out;
        out.D = e.vectors.col(m);
        out.g = (e.values(m) - base) - sign * s;
        const Vec proj = V.transpose() * out.D;
        out.dg = -(proj.cwiseProduct(w)).squaredNorm() - 1.0;
        return out;
    }
};

struct Root
{
    double E;
    Vec a;
    double C;
    int iterations;
    double residual;
    int anchor = -1; ///< index into the active poles
    double offset = 0.0;
};

Root solve_branch(const Mat& QHQ, const Mat& V, const Vec& poles, int ia, int ib, double La, double Lb, int m)
{
    const double L = Lb - La;
    Branch br{QHQ, V, poles, ia, La, 1.0, m};
    if (br(0.5 * L).g > 0.0) {
        // root lies in (mid, b): anchor at the right edge
        br.anchor = ib;
        br.base = Lb;
        br.sign = -1.0;
    }
    double slo = 0.0, shi = 0.5 * L, s = 0.25 * L;
    int it = 0;
    bool done = false;
    for (; it < 400 && !done; ++it) {
        const auto ev = br(s);
        const bool near = br.sign > 0 ? ev.g > 0.0 : ev.g < 0.0;
        (near ? slo : shi) = s;
        // Newton on f = s g(s); df/ds = g + s sign dg/dE
        const double f = s * ev.g, fp = ev.g + s * br.sign * ev.dg;
        const double sn = fp != 0.0 ? s - f / fp : -1.0;
        if (std::abs(sn - s) <= 1e-13 * s || shi - slo <= 4e-16 * shi) {
            if (slo < sn && sn < shi)
                s = sn;
            done = true;
        } else if (slo < sn && sn < shi) {
            s = sn;
        } else if (slo == 0.0) {
            s = shi * 1e-4;
        } else if (shi / slo > 4.0) {
            s = std::sqrt(slo * shi);
        } else {
            s = 0.5 * (slo + shi);
        }
    }
    if (!done)
        throw NoConvergence("root bracketing did not converge on branch " + std::to_string(m));
    const auto ev = br(s);
    const double C = std::sqrt(-1.0 / ev.dg);
    Root r{br.base + br.sign * s, C * ev.D, C, it, std::abs(ev.g)};
    if (br.anchor >= 0) {
        r.anchor = br.anchor;
        r.offset = br.sign * s;
    }
    return r;
}

// number of eigenvalues of H strictly below pole j
int count_at_pole(const Mat& QHQ, const Mat& V, const Vec& poles, int j)
{
    const int nk = static_cast<int>(QHQ.rows());
    Vec w = (poles(j) - poles.array()).matrix();
    w(j) = 1.0;
    w = w.cwiseInverse();
    w(j) = 0.0;
    Mat A = QHQ + V * w.asDiagonal() * V.transpose();
    A.diagonal().array() -= poles(j);
    // compress onto the complement of v_j
    Eigen::HouseholderQR<Mat> qr(V.col(j));
    const Mat Q = qr.householderQ() * Mat::Identity(nk, nk);
    const Mat Z = Q.rightCols(nk - 1);
    const Vec ev = sym_eigvals(Z.transpose() * A * Z);
    return j + 1 + static_cast<int>((ev.array() < 0.0).count());
}

} // namespace

Mat effective_hamiltonian(double E, const PartitionedBasis& pb, const CouplingBlock& V)
{
    check_pole(E, pb.E_beta_hat);
    const Vec w = (E - pb.E_beta_hat.array()).inverse().matrix();
    Mat H = pb.QHQ + V.V * w.asDiagonal() * V.V.transpose();
    return 0.5 * (H + H.transpose());
}

Mat shift_by_linear_solve(double E, const PartitionedBasis& pb, const Mat& H)
{
    check_pole(E, pb.E_beta_hat);
    Mat A = -submatrix(H, pb.p_flat, pb.p_flat);
    A.diagonal().array() += E;
    const Mat X = A.partialPivLu().solve(submatrix(H, pb.p_flat, pb.q_flat));
    Mat Delta = submatrix(H, pb.q_flat, pb.p_flat) * X;
    if (pb.q_basis == QBasis::Diagonalized)
        Delta = pb.U_Q.transpose() * Delta * pb.U_Q;
    return 0.5 * (Delta + Delta.transpose());
}

ScRoot self_consistent_root(double seed, const PartitionedBasis& pb, const CouplingBlock& V, const ScOptions& opt)
{
    double E = seed;
    double E_prev = std::numeric_limits<double>::quiet_NaN();
    for (int it = 1; it <= opt.max_iter; ++it) {
        SymEig e = sym_eig(effective_hamiltonian(E, pb, V));
        Eigen::Index idx = opt.index;
        if (opt.selection == RootSelection::Nearest)
            (e.values.array() - E).abs().minCoeff(&idx);
        else if (opt.index < 0 || opt.index >= e.values.size())
            throw InvalidArgument("self_consistent_root: branch index out of range");
        double E_next = e.values(idx);
        if (std::abs(E_next - E) < opt.tol)
            return ScRoot{E_next, e.vectors.col(idx), it};
        // 2-cycle: the new value falls back toward the one before last
        if (std::isfinite(E_prev) && std::abs(E_next - E_prev) < 0.5 * std::abs(E_next - E))
            E_next = 0.5 * (E_next + E);
        E_prev = E;
        E = E_next;
    }
    throw NoConvergence("self-consistent iteration from seed " + std::to_string(seed) + " did not converge in " +
                        std::to_string(opt.max_iter) + " iterations");
}

ResonanceSet find_all_resonances(const PartitionedBasis& pb, const CouplingBlock& Vb, int threads)
{
    const int nk = pb.n_kappa(), nb = pb.n_beta();
    const Mat& V = Vb.V;

    // P states without any coupling are exact eigenstates with no Q weight
    std::vector<int> active, inert;
    for (int b = 0; b < nb; ++b)
        (V.col(b).norm() < 1e-14 ? inert : active).push_back(b);
    const int na = static_cast<int>(active.size());
    Mat Va(nk, na);
    Vec poles(na);
    for (int j = 0; j < na; ++j) {
        Va.col(j) = V.col(active[j]);
        poles(j) = pb.E_beta_hat(active[j]);
    }
    for (int j = 1; j < na; ++j)
        if (!(poles(j) > poles(j - 1)))
            throw IncompleteSpectrum("coupled P-space poles are degenerate; inertia counting needs distinct poles");

    std::vector<int> count(na + 2);
    count[0] = 0;
    count[na + 1] = nk + na;
    parallel_for(na, threads, [&](int j) { count[j + 1] = count_at_pole(pb.QHQ, Va, poles, j); });

    const double bound = sym_eigvals(pb.QHQ).cwiseAbs().maxCoeff() +
                         (na ? poles.cwiseAbs().maxCoeff() : 0.0) +
                         (na ? Eigen::JacobiSVD<Mat>(Va).singularValues()(0) : 0.0) + 1.0;

    // one task per root: (interval, branch)
    struct Task
    {
        int interval, branch;
    };
    std::vector<Task> tasks;
    for (int i = 0; i <= na; ++i) {
        const int k = count[i + 1] - count[i];
        const int k0 = count[i] - i;
        if (k < 0 || k0 < 0 || k0 + k > nk)
            throw IncompleteSpectrum("inconsistent inertia counts near pole " + std::to_string(i));
        for (int r = 0; r < k; ++r)
            tasks.push_back({i, k0 + r});
    }
    if (static_cast<int>(tasks.size()) != nk + na)
        throw IncompleteSpectrum("inertia counting located " + std::to_string(tasks.size()) + " of " +
                                 std::to_string(nk + na) + " roots");

    std::vector<Root> roots(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), threads, [&](int t) {
        const int i = tasks[t].interval;
        const int ia = i - 1, ib = i < na ? i : -1;
        const double La = ia >= 0 ? poles(ia) : -bound;
        const double Lb = ib >= 0 ? poles(ib) : bound;
        roots[t] = solve_branch(pb.QHQ, Va, poles, ia, ib, La, Lb, tasks[t].branch);
    });
    for (int b : inert)
        roots.push_back(Root{pb.E_beta_hat(b), Vec::Zero(nk), 0.0, 0, 0.0, -1, 0.0});

    std::vector<int> order(roots.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return roots[x].E < roots[y].E; });

    ResonanceSet rs;
    rs.solver = "feshbach";
    const int nt = static_cast<int>(roots.size());
    rs.E.resize(nt);
    rs.a.resize(nk, nt);
    rs.C_abs.resize(nt);
    rs.residual.resize(nt);
    rs.iterations.resize(nt);
    rs.anchor.assign(nt, -1);
    rs.offset = Vec::Zero(nt);
    for (int g = 0; g < nt; ++g) {
        const Root& r = roots[order[g]];
        if (r.anchor >= 0) {
            rs.anchor[g] = active[r.anchor];
            rs.offset(g) = r.offset;
        }
        rs.E(g) = r.E;
        rs.a.col(g) = r.a;
        rs.C_abs(g) = r.C;
        rs.residual(g) = r.residual;
        rs.iterations[g] = r.iterations;
    }
    if (nt != pb.n_total())
        throw IncompleteSpectrum("found " + std::to_string(nt) + " roots, expected " + std::to_string(pb.n_total()));
    return rs;
}

ResonanceSet direct_resonances(const PartitionedBasis& pb, const Mat& H, double cluster_gap)
{
    SymEig e = sym_eig(H);
    refine_clusters(H, e, cluster_gap);
    ResonanceSet rs;
    rs.solver = "direct";
    rs.E = e.values;
    rs.a = submatrix(e.vectors, pb.q_flat, [&] {
        std::vector<int> all(e.values.size());
        std::iota(all.begin(), all.end(), 0);
        return all;
    }());
    if (pb.q_basis == QBasis::Diagonalized)
        rs.a = pb.U_Q.transpose() * rs.a;
    rs.C_abs = rs.a.colwise().norm().transpose();
    rs.iterations.assign(e.values.size(), 0);
    const Mat R = H * e.vectors - e.vectors * e.values.asDiagonal();
    rs.residual = R.colwise().norm().transpose();
    rs.vectors = std::move(e.vectors);
    return rs;
}

Mat q_embedding(const PartitionedBasis& pb)
{
    Mat Y = Mat::Zero(pb.n_total(), pb.n_kappa());
    if (pb.q_basis == QBasis::Diagonalized) {
        for (int k = 0; k < pb.n_kappa(); ++k)
            for (int j = 0; j < pb.n_kappa(); ++j)
                Y(pb.q_flat[j], k) = pb.U_Q(j, k);
    } else {
        for (int k = 0; k < pb.n_kappa(); ++k)
            Y(pb.q_flat[k], k) = 1.0;
    }
    return Y;
}

Mat eigenvectors_by_resolvent(const ResonanceSet& res, const PartitionedBasis& pb, const CouplingBlock& V,
                              const std::vector<int>& columns)
{
    std::vector<int> cols = columns;
    if (cols.empty()) {
        cols.resize(res.n_total());
        std::iota(cols.begin(), cols.end(), 0);
    }
    const int nc = static_cast<int>(cols.size());
    Mat A(res.n_kappa(), nc);
    for (int c = 0; c < nc; ++c)
        A.col(c) = res.a.col(cols[c]);
    // uncoupled P eigenstates (E on a deflated pole) carry no Q weight
    const Vec vnorm = V.V.colwise().norm().transpose();
    std::vector<Eigen::Index> pole(nc, -1);
    for (int c = 0; c < nc; ++c)
        for (Eigen::Index b = 0; b < vnorm.size(); ++b)
            if (vnorm(b) < 1e-14 && res.E(cols[c]) == pb.E_beta_hat(b)) {
                pole[c] = b;
                A.col(c).setZero();
                break;
            }
    Mat X = q_embedding(pb) * A;
    // P part in the PHP eigenbasis: V^T a / (E - E_beta)
    Mat B = V.V.transpose() * A;
    for (int c = 0; c < nc; ++c)
        for (Eigen::Index b = 0; b < B.rows(); ++b)
            B(b, c) = vnorm(b) < 1e-14 ? 0.0 : B(b, c) / res.pole_distance(cols[c], int(b), pb.E_beta_hat);
    const Mat XP = pb.U_P * B;
    for (int j = 0; j < pb.n_beta(); ++j)
        X.row(pb.p_flat[j]) += XP.row(j);
    for (int c = 0; c < nc; ++c)
        if (pole[c] >= 0) {
            X.col(c).setZero();
            for (int j = 0; j < pb.n_beta(); ++j)
                X(pb.p_flat[j], c) = pb.U_P(j, pole[c]);
        }
    return X;
}

int polish_clusters(ResonanceSet& rs, const PartitionedBasis& pb, const CouplingBlock& V, const Mat& H,
                    double cluster_gap)
{
    const int n = rs.n_total();
    const Mat Y = q_embedding(pb);
    int touched = 0;
    int i = 0;
    while (i < n) {
        int j = i + 1;
        while (j < n && rs.E(j) - rs.E(j - 1) < cluster_gap)
            ++j;
        if (j - i > 1) {
            std::vector<int> cols(j - i);
            std::iota(cols.begin(), cols.end(), i);
            Mat Z = eigenvectors_by_resolvent(rs, pb, V, cols);
            Vec vals;
            rayleigh_ritz_extended(H, Z, vals);
            // P part in the PHP eigenbasis
            Mat Yp(pb.n_beta(), j - i);
            for (int b = 0; b < pb.n_beta(); ++b)
                Yp.row(b) = Z.row(pb.p_flat[b]);
            Yp = pb.U_P.transpose() * Yp;
            for (int c = 0; c < j - i; ++c) {
                rs.E(i + c) = vals(c);
                rs.a.col(i + c) = Y.transpose() * Z.col(c);
                rs.C_abs(i + c) = rs.a.col(i + c).norm();
                if (rs.anchor.empty())
                    continue;
                // the rotation can move a root onto another pole: re-anchor at the
                // dominant P component, whose exact distance is (V^T a)_b / y_b
                Eigen::Index b;
                const double yb = Yp.col(c).cwiseAbs().maxCoeff(&b);
                const double vb = V.V.col(b).dot(rs.a.col(i + c));
                if (yb > 0.0 && vb != 0.0 && std::abs(vals(c) - pb.E_beta_hat(b)) < cluster_gap) {
                    rs.anchor[i + c] = int(b);
                    rs.offset(i + c) = vb / Yp(b, c);
                } else {
                    rs.anchor[i + c] = -1;
                    rs.offset(i + c) = 0.0;
                }
            }
            ++touched;
        }
        i = j;
    }
    return touched;
}

double normalization_identity(double E, const Vec& D, double C_abs, const PartitionedBasis& pb,
                              const CouplingBlock& V)
{
    const Vec proj = V.V.transpose() * D;
    double sum = 0.0;
    for (Eigen::Index b = 0; b < proj.size(); ++b)
        if (proj(b) != 0.0) {
            const double r = proj(b) / (E - pb.E_beta_hat(b));
            sum += r * r;
        }
    return C_abs * C_abs * (1.0 + sum);
}

double normalization_identity(const ResonanceSet& rs, int g, const PartitionedBasis& pb, const CouplingBlock& V)
{
    const double C = rs.C_abs(g);
    if (C == 0.0)
        return 1.0;
    const Vec proj = V.V.transpose() * (rs.a.col(g) / C);
    double sum = 0.0;
    for (Eigen::Index b = 0; b < proj.size(); ++b)
        if (proj(b) != 0.0) {
            const double r = proj(b) / rs.pole_distance(g, int(b), pb.E_beta_hat);
            sum += r * r;
        }
    return C * C * (1.0 + sum);
}

} // namespace ivr
