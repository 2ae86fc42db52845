#include "ivr/model.hpp"

#include <cmath>

namespace ivr {

double MorseParams::value(double r) const
{
    const double e = std::exp(-beta * (r - R0));
    return D * (1.0 - e) * (1.0 - e);
}

double MorseParams::derivative(double r) const
{
    const double e = std::exp(-beta * (r - R0));
    return 2.0 * D * beta * e * (1.0 - e);
}

SurfaceModel SurfaceModel::with_onset(const std::array<MorseParams, 3>& morse, double E_d)
{
    // V(inf, R2^0) = D1 + D3 + c0
    return SurfaceModel{morse, E_d - (morse[0].D + morse[2].D), E_d};
}

SurfaceModel default_surface()
{
    return SurfaceModel::with_onset({MorseParams{0.08518, 1.5, 2.9759},
                                     MorseParams{0.21238, 1.6251, 2.2559},
                                     MorseParams{0.16, 1.1589, 2.8037}},
                                    0.100);
}

AtomMasses default_atom_masses()
{
    return AtomMasses{15.9994 * units::amu, 12.011 * units::amu, 32.06 * units::amu};
}

MassConvention make_mass_convention(const AtomMasses& m, KineticPairing pairing)
{
    const double M = m.total();
    const double mu_CS = m.m_C * m.m_S / (m.m_C + m.m_S);
    const double mu_CO = m.m_C * m.m_O / (m.m_C + m.m_O);
    MassConvention c{};
    if (pairing == KineticPairing::Standard) {
        c.mu_full_1 = mu_CS;
        c.mu_full_2 = mu_CO;
    } else {
        c.mu_full_1 = mu_CO;
        c.mu_full_2 = mu_CS;
    }
    c.mu_zero_CS = m.m_S * (m.m_C + m.m_O) / M;
    c.mu_zero_CO = m.m_O * (m.m_C + m.m_S) / M;
    c.cross_mass = m.m_C;
    return c;
}

std::pair<AtomMasses, MassConvention> default_masses()
{
    const AtomMasses m = default_atom_masses();
    return {m, make_mass_convention(m, KineticPairing::Swapped)};
}

double evaluate_potential(double R1, double R2, const SurfaceModel& s)
{
    return s.morse[0].value(R1) + s.morse[1].value(R2) + s.morse[2].value(R1 + R2) + s.c0;
}

std::array<double, 2> potential_gradient(double R1, double R2, const SurfaceModel& s)
{
    const double g3 = s.morse[2].derivative(R1 + R2);
    return {s.morse[0].derivative(R1) + g3, s.morse[1].derivative(R2) + g3};
}

double morse_harmonic_frequency(const MorseParams& p, double mu)
{
    return p.beta * std::sqrt(2.0 * p.D / mu);
}

int morse_bound_count(const MorseParams& p, double mu)
{
    return static_cast<int>(std::floor(std::sqrt(2.0 * mu * p.D) / p.beta - 0.5)) + 1;
}

std::vector<double> morse_levels(const MorseParams& p, double mu)
{
    const double w = morse_harmonic_frequency(p, mu);
    const double wx = p.beta * p.beta / (2.0 * mu);
    std::vector<double> out;
    for (int n = 0;; ++n) {
        const double x = n + 0.5;
        // dE/dn = w - 2 wx x must stay positive
        if (w - 2.0 * wx * x <= 0.0)
            break;
        const double e = w * x - wx * x * x;
        if (e >= p.D)
            break;
        out.push_back(e);
    }
    return out;
}

} // namespace ivr
