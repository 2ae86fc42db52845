#pragma once

#include <array>

// Regression targets for the OCS model (highest CS level first).
namespace ivr::reference {

inline constexpr std::array<double, 9> cs_top_levels{0.0851446, 0.0850268, 0.0848265, 0.0845437, 0.0841783,
                                                     0.0837303, 0.0831998, 0.0825867, 0.0818910};
inline constexpr double co_ground = 0.00360475;
inline constexpr int cs_bound = 45;
inline constexpr int co_bound = 59;

// |c_k|^2 of the optimized superpositions at T = 100 fs
inline constexpr std::array<double, 9> weights_max{0.00084, 0.02994, 0.05380, 0.38716, 0.09127,
                                                   0.06411, 0.07216, 0.23455, 0.06616};
inline constexpr std::array<double, 9> weights_min{0.01915, 0.14467, 0.01097, 0.00713, 0.00449,
                                                   0.04183, 0.41392, 0.19699, 0.16082};

inline constexpr double t_delta_max = 57.35; // fs
inline constexpr double t_delta_min = 8.60;
inline constexpr double P_inf_max = 0.4;
inline constexpr double P_inf_min = 0.3;
inline constexpr double transferred_50_max = 0.24;
inline constexpr double transferred_50_min = 0.82;
inline constexpr double retained_1500_max = 0.55;
inline constexpr double retained_1500_min = 0.22;
inline constexpr double E_plus = 0.09849;
inline constexpr double E_minus = 0.09743;
inline constexpr double E0 = 0.097964;

inline constexpr double lambda_stable = 1.46; // 1/ps
inline constexpr double lambda_chaotic = 17.41;
inline constexpr double island_fraction = 1.0 / 3.0;
inline constexpr double period_cs = 27.45; // fs
inline constexpr double period_co = 18.10;

} // namespace ivr::reference
