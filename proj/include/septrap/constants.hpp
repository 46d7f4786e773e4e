#pragma once

// Physical constants used throughout the simulator. All values CODATA 2018,
// rounded to 10 significant digits. Reproducing the coupling-strength targets
// to the percent level requires one consistent set, so nothing here may be
// overridden at run time.

namespace septrap::constants {

inline constexpr double pi = 3.141592653589793;
inline constexpr double two_pi = 2.0 * pi;

inline constexpr double hbar = 1.054571817e-34;              // J s
inline constexpr double elementary_charge = 1.602176634e-19; // C
inline constexpr double epsilon0 = 8.854187813e-12;          // F / m
inline constexpr double atomic_mass_unit = 1.660539067e-27;  // kg

// 9Be+ nominal mass in atomic mass units.
inline constexpr double be9_mass_u = 9.012;

} // namespace septrap::constants
