#include "ivr/dvr.hpp"

#include "ivr/errors.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numbers>

namespace ivr {

Vec DvrGrid::points() const
{
    Vec x(N);
    for (int i = 0; i < N; ++i)
        x(i) = point(i);
    return x;
}

void DvrGrid::validate() const
{
    if (N < 16)
        throw InvalidArgument("DVR grid needs N >= 16");
    if (!(R_max > R_min) || !(R_min > 0.0))
        throw InvalidArgument("DVR grid needs 0 < R_min < R_max");
}

Mat kinetic_matrix(const DvrGrid& grid, double mu)
{
    grid.validate();
    const double dx = grid.spacing();
    const double pref = 1.0 / (mu * dx * dx);
    Mat T(grid.N, grid.N);
    for (int i = 0; i < grid.N; ++i)
        for (int j = 0; j < grid.N; ++j) {
            const int d = i - j;
            if (d == 0)
                T(i, j) = pref * std::numbers::pi * std::numbers::pi / 6.0;
            else
                T(i, j) = pref * ((d % 2) ? -1.0 : 1.0) / double(d * d);
        }
    return T;
}

Mat first_derivative_matrix(const DvrGrid& grid)
{
    grid.validate();
    const double dx = grid.spacing();
    Mat D = Mat::Zero(grid.N, grid.N);
    for (int i = 0; i < grid.N; ++i)
        for (int j = 0; j < grid.N; ++j) {
            const int d = i - j;
            if (d != 0)
                D(i, j) = ((d % 2) ? -1.0 : 1.0) / (d * dx);
        }
    return D;
}

BondEigenbasis solve_bond(const DvrGrid& grid, double mu, const std::function<double(double)>& potential,
                          double limit, int max_states)
{
    if (!(mu > 0.0))
        throw InvalidArgument("solve_bond: mu must be positive");
    Mat H = kinetic_matrix(grid, mu);
    for (int i = 0; i < grid.N; ++i) {
        const double v = potential(grid.point(i));
        if (!std::isfinite(v))
            throw InvalidArgument("solve_bond: potential not finite on grid");
        H(i, i) += v;
    }
    SymEig eig = sym_eig(H);

    BondEigenbasis b;
    b.grid = grid;
    b.mu = mu;
    b.limit = limit;
    while (b.n_bound < grid.N && eig.values(b.n_bound) < limit)
        ++b.n_bound;
    int keep = b.n_bound;
    if (max_states >= 0 && max_states < keep)
        keep = max_states;
    b.energies = eig.values.head(keep);
    b.vectors = eig.vectors.leftCols(keep);

    if (b.n_bound > 0) {
        // box contamination: weight of the top bound state in the outer 5% of the
        // grid on the dissociative side (the short-R end sits inside the repulsive wall)
        const int edge = std::max(1, grid.N / 20);
        const double w = eig.vectors.col(b.n_bound - 1).tail(edge).squaredNorm();
        if (w > 1e-3)
            b.warnings.push_back("highest bound state has " + std::to_string(w) +
                                 " of its norm in the outer 5% of the grid");
    }
    return b;
}

Mat derivative_matrix(const BondEigenbasis& basis)
{
    const Mat D = first_derivative_matrix(basis.grid);
    Mat d = basis.vectors.transpose() * D * basis.vectors;
    // antisymmetrize away rounding
    return 0.5 * (d - d.transpose());
}

Mat momentum_squared_matrix(const BondEigenbasis& basis)
{
    // -d^2/dR^2 = 2 mu T
    const Mat K = kinetic_matrix(basis.grid, 0.5);
    Mat p2 = basis.vectors.transpose() * K * basis.vectors;
    return 0.5 * (p2 + p2.transpose());
}

void to_json(nlohmann::json& j, const BondEigenbasis& b)
{
    std::vector<double> e(b.energies.data(), b.energies.data() + b.energies.size());
    std::vector<std::vector<double>> v;
    for (int c = 0; c < b.vectors.cols(); ++c)
        v.emplace_back(b.vectors.col(c).data(), b.vectors.col(c).data() + b.vectors.rows());
    j = nlohmann::json{{"grid", {{"R_min", b.grid.R_min}, {"R_max", b.grid.R_max}, {"N", b.grid.N}}},
                       {"mu", b.mu},
                       {"limit", b.limit},
                       {"n_bound", b.n_bound},
                       {"energies", e},
                       {"vectors", v},
                       {"warnings", b.warnings}};
}

void from_json(const nlohmann::json& j, BondEigenbasis& b)
{
    b.grid.R_min = j.at("grid").at("R_min").get<double>();
    b.grid.R_max = j.at("grid").at("R_max").get<double>();
    b.grid.N = j.at("grid").at("N").get<int>();
    b.mu = j.at("mu").get<double>();
    b.limit = j.at("limit").get<double>();
    b.n_bound = j.at("n_bound").get<int>();
    const auto e = j.at("energies").get<std::vector<double>>();
    b.energies = Eigen::Map<const Vec>(e.data(), Eigen::Index(e.size()));
    const auto v = j.at("vectors").get<std::vector<std::vector<double>>>();
    b.vectors.resize(b.grid.N, Eigen::Index(v.size()));
    for (std::size_t c = 0; c < v.size(); ++c)
        b.vectors.col(Eigen::Index(c)) = Eigen::Map<const Vec>(v[c].data(), Eigen::Index(v[c].size()));
    b.warnings = j.value("warnings", std::vector<std::string>{});
}

} // namespace ivr
