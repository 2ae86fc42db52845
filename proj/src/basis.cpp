#include "ivr/basis.hpp"

#include "ivr/errors.hpp"

namespace ivr {

Mat submatrix(const Mat& H, const std::vector<int>& rows, const std::vector<int>& cols)
{
    Mat out(rows.size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < rows.size(); ++i)
            out(i, j) = H(rows[i], cols[j]);
    return out;
}

Mat full_hamiltonian(const BondEigenbasis& cs, const BondEigenbasis& co, const SurfaceModel& surface,
                     const MassConvention& masses, const HamiltonianOptions& opt)
{
    const int ns = cs.size(), no = co.size();
    const int Ns = cs.grid.N, No = co.grid.N;
    const int nt = ns * no;
    Mat H = Mat::Zero(nt, nt);

    // static part: <mn|V3(R1+R2) + c0|m'n'> by product-grid quadrature
    Mat Vg(Ns, No);
    const Vec xs = cs.grid.points(), xo = co.grid.points();
    for (int j = 0; j < No; ++j)
        for (int i = 0; i < Ns; ++i)
            Vg(i, j) = (opt.include_v3 ? surface.morse[2].value(xs(i) + xo(j)) : 0.0) + surface.c0;

    Mat Phi2(Ns, ns * ns);
    for (int m = 0; m < ns; ++m)
        for (int mp = 0; mp < ns; ++mp)
            Phi2.col(m * ns + mp) = cs.vectors.col(m).cwiseProduct(cs.vectors.col(mp));
    Mat Psi2(No, no * no);
    for (int n = 0; n < no; ++n)
        for (int np = 0; np < no; ++np)
            Psi2.col(n * no + np) = co.vectors.col(n).cwiseProduct(co.vectors.col(np));

    const Mat W = Phi2.transpose() * Vg; // (m m') x j
    const Mat R = W * Psi2;              // (m m') x (n n')
    for (int m = 0; m < ns; ++m)
        for (int mp = 0; mp < ns; ++mp)
            for (int n = 0; n < no; ++n)
                for (int np = 0; np < no; ++np)
                    H(m * no + n, mp * no + np) = R(m * ns + mp, n * no + np);

    for (int m = 0; m < ns; ++m)
        for (int n = 0; n < no; ++n)
            H(m * no + n, m * no + n) += cs.energies(m) + co.energies(n);

    // -P1 P2 / m_C with P = -i d  ->  + d1 (x) d2 / m_C
    if (opt.include_cross) {
        const Mat d1 = derivative_matrix(cs), d2 = derivative_matrix(co);
        for (int m = 0; m < ns; ++m)
            for (int mp = 0; mp < ns; ++mp) {
                const double f = d1(m, mp) / masses.cross_mass;
                if (f == 0.0)
                    continue;
                H.block(m * no, mp * no, no, no) += f * d2;
            }
    }

    if (opt.couplings == Couplings::Exact) {
        const double k1 = 0.5 * (1.0 / masses.mu_full_1 - 1.0 / cs.mu);
        const double k2 = 0.5 * (1.0 / masses.mu_full_2 - 1.0 / co.mu);
        const Mat p1 = momentum_squared_matrix(cs), p2 = momentum_squared_matrix(co);
        for (int m = 0; m < ns; ++m)
            for (int mp = 0; mp < ns; ++mp)
                for (int n = 0; n < no; ++n)
                    H(m * no + n, mp * no + n) += k1 * p1(m, mp);
        for (int m = 0; m < ns; ++m)
            H.block(m * no, m * no, no, no) += k2 * p2;
    }

    return 0.5 * (H + H.transpose());
}

PartitionedBasis build_partition(const BondEigenbasis& cs, const BondEigenbasis& co, const Mat& H,
                                 PartitionKind kind, QBasis q_basis)
{
    PartitionedBasis pb;
    pb.n_cs = cs.size();
    pb.n_co = co.size();
    pb.q_basis = q_basis;
    if (H.rows() != pb.n_total())
        throw InvalidArgument("build_partition: H dimension does not match the bond bases");

    for (int m = 0; m < pb.n_cs; ++m)
        for (int n = 0; n < pb.n_co; ++n) {
            const bool in_q = kind == PartitionKind::CoGround ? n == 0 : m == 0;
            (in_q ? pb.q_indices : pb.p_indices).push_back({m, n});
            (in_q ? pb.q_flat : pb.p_flat).push_back(pb.flat(m, n));
        }

    const Mat QHQ = submatrix(H, pb.q_flat, pb.q_flat);
    if (q_basis == QBasis::Diagonalized) {
        SymEig e = sym_eig(QHQ);
        pb.E_kappa = e.values;
        pb.U_Q = e.vectors;
        pb.QHQ = e.values.asDiagonal();
    } else {
        pb.E_kappa.resize(pb.n_kappa());
        for (int k = 0; k < pb.n_kappa(); ++k)
            pb.E_kappa(k) = cs.energies(pb.q_indices[k].m) + co.energies(pb.q_indices[k].n);
        pb.QHQ = QHQ;
    }

    SymEig ep = sym_eig(submatrix(H, pb.p_flat, pb.p_flat));
    pb.E_beta_hat = ep.values;
    pb.U_P = ep.vectors;
    return pb;
}

CouplingBlock coupling_elements(const PartitionedBasis& pb, const Mat& H)
{
    Mat V = submatrix(H, pb.q_flat, pb.p_flat) * pb.U_P;
    if (pb.q_basis == QBasis::Diagonalized)
        V = pb.U_Q.transpose() * V;
    return CouplingBlock{V};
}

} // namespace ivr
