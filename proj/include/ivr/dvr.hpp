#pragma once

#include "ivr/linalg.hpp"

#include <nlohmann/json_fwd.hpp>

#include <functional>
#include <string>
#include <vector>

namespace ivr {

struct DvrGrid
{
    double R_min = 0.0;
    double R_max = 0.0;
    int N = 0;

    double spacing() const { return (R_max - R_min) / (N - 1); }
    double point(int i) const { return R_min + i * spacing(); }
    Vec points() const;
    void validate() const;
};

struct BondEigenbasis
{
    DvrGrid grid;
    double mu = 0.0;
    double limit = 0.0;   ///< dissociation threshold the bound count is taken against
    Vec energies;         ///< bound (and kept) states only, ascending
    Mat vectors;          ///< N x n grid amplitudes, orthonormal columns
    int n_bound = 0;      ///< states with E < limit before any truncation
    std::vector<std::string> warnings;

    int size() const { return static_cast<int>(energies.size()); }
};

/// Colbert-Miller sinc-DVR kinetic energy on a uniform grid.
Mat kinetic_matrix(const DvrGrid& grid, double mu);

/// Sinc-DVR representation of d/dR (antisymmetric).
Mat first_derivative_matrix(const DvrGrid& grid);

/// Eigenpairs of T + diag(V) with E < limit. `max_states` < 0 keeps all bound
/// states, otherwise the lowest max_states of them.
BondEigenbasis solve_bond(const DvrGrid& grid, double mu, const std::function<double(double)>& potential,
                          double limit, int max_states = -1);

/// d with <m|p|m'> = -i d(m,m').
Mat derivative_matrix(const BondEigenbasis& basis);

/// <m|p^2|m'> = <m|-d^2/dR^2|m'>.
Mat momentum_squared_matrix(const BondEigenbasis& basis);

void to_json(nlohmann::json& j, const BondEigenbasis& b);
void from_json(const nlohmann::json& j, BondEigenbasis& b);

} // namespace ivr
