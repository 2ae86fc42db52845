#pragma once

#include <array>
#include <utility>
#include <vector>

namespace ivr {

/// Atomic units throughout: hartree, bohr, electron masses.
namespace units {
inline constexpr double amu = 1822.888;             ///< electron masses per dalton
inline constexpr double fs_per_au = 0.02418884;     ///< femtoseconds per atomic time unit
inline constexpr double au_per_fs = 1.0 / fs_per_au;
} // namespace units

struct AtomMasses
{
    double m_O;
    double m_C;
    double m_S;

    double total() const { return m_O + m_C + m_S; }
};

/// Which reduced mass multiplies which bond momentum in the full kinetic energy.
/// `Standard`: P1 (CS) with mu(C,S), P2 (CO) with mu(C,O).
/// `Swapped`: P1 with mu(O,C) and P2 with mu(S,C).
enum class KineticPairing { Standard, Swapped };

struct MassConvention
{
    double mu_full_1;  ///< mass dividing P1^2/2 in the full H
    double mu_full_2;  ///< mass dividing P2^2/2 in the full H
    double mu_zero_CS; ///< frozen-CO reduced mass of the zeroth-order CS bond
    double mu_zero_CO; ///< frozen-CS reduced mass of the zeroth-order CO bond
    double cross_mass; ///< mass in the -P1 P2 / m term
};

struct MorseParams
{
    double D;    ///< well depth, hartree
    double beta; ///< range, 1/bohr
    double R0;   ///< equilibrium distance, bohr

    double value(double r) const;
    double derivative(double r) const;
};

/// Sum of three Morse functions V1(R1) + V2(R2) + V3(R1 + R2) + c0.
struct SurfaceModel
{
    std::array<MorseParams, 3> morse; ///< 0: CS, 1: CO, 2: R3 = R1 + R2
    double c0;                        ///< additive constant
    double E_d;                       ///< CS dissociation onset V(inf, R2^0)

    /// Builds the model and fixes c0 so that V(inf, R2^0) equals E_d.
    static SurfaceModel with_onset(const std::array<MorseParams, 3>& morse, double E_d);
};

/// Modified Morse-sum surface with the published parameter table and E_d = 0.100.
SurfaceModel default_surface();

AtomMasses default_atom_masses();
MassConvention make_mass_convention(const AtomMasses& m, KineticPairing pairing);

/// Returns the default masses and the matching mass convention (swapped pairing).
std::pair<AtomMasses, MassConvention> default_masses();

double evaluate_potential(double R1, double R2, const SurfaceModel& surface);

/// Gradient (dV/dR1, dV/dR2).
std::array<double, 2> potential_gradient(double R1, double R2, const SurfaceModel& surface);

/// Analytic Morse spectrum E_n = w(n+1/2) - wx(n+1/2)^2 measured from the well bottom,
/// restricted to levels below D on the rising branch.
std::vector<double> morse_levels(const MorseParams& p, double mu);

/// floor(sqrt(2 mu D)/beta - 1/2) + 1
int morse_bound_count(const MorseParams& p, double mu);

/// Harmonic angular frequency beta sqrt(2 D / mu).
double morse_harmonic_frequency(const MorseParams& p, double mu);

} // namespace ivr
