#pragma once

#include "ivr/dynamics.hpp"

#include <string>

namespace ivr {

enum class ControlMode { Maximize, Minimize };

struct ControlResult
{
    ControlMode mode = ControlMode::Maximize;
    double T_fs = 0.0;
    Superposition c_opt;
    double lambda = 0.0;
    Vec spectrum;          ///< all eigenvalues of the Hermitized K(T), ascending
    bool degenerate = false;
    double residual = 0.0; ///< ||K c - lambda c||
};

/// Extremal eigenvector of K(T) over S. The largest-magnitude component is made real positive.
ControlResult optimize(const ResonanceSet& res, const std::vector<int>& S, double T_fs, ControlMode mode,
                       const std::vector<int>& rows);

ControlMode parse_mode(const std::string& s);
std::string to_string(ControlMode m);

} // namespace ivr
