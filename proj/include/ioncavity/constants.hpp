#pragma once

// Fundamental constants (CODATA 2018, SI). k_B and e are exact since the
// 2019 SI redefinition.

namespace ioncavity::constants {

inline constexpr double boltzmann = 1.380649e-23;            // J/K, exact
inline constexpr double elementary_charge = 1.602176634e-19; // C, exact
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m
inline constexpr double atomic_mass_unit = 1.66053906660e-27;   // kg

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

} // namespace ioncavity::constants
