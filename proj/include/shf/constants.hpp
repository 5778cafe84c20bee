#pragma once

// Physical constants (CODATA 2018 exact/recommended values) and the unit
// conventions used throughout the library.
//
// Internal computations are SI: tesla, joule, metre, second.  The public API
// speaks the units experimentalists use for this system: angstrom for
// positions, millitesla for fields, kilohertz for splittings, GHz/T and MHz/T
// for Zeeman/gyromagnetic coefficients.  All conversions live here so no
// other file hard-codes a factor.

namespace shf {

// Bohr magneton, J/T.
inline constexpr double mu_bohr = 9.2740100783e-24;

// Planck constant, J*s (exact by SI definition).
inline constexpr double planck_h = 6.62607015e-34;

// mu_0 / 4pi, T*m/A (exact in the pre-2019 sense; error is ~1e-10 relative,
// far below every tolerance used here).
inline constexpr double mu0_over_4pi = 1e-7;

// Bohr magneton over Planck constant: Hz/T.  ~13.996 GHz/T.
inline constexpr double mu_bohr_over_h = mu_bohr / planck_h;

// Unit conversions.
inline constexpr double angstrom = 1e-10;   // m
inline constexpr double millitesla = 1e-3;  // T
inline constexpr double microsecond = 1e-6; // s

inline constexpr double hz_to_khz = 1e-3;
inline constexpr double hz_to_ghz = 1e-9;
inline constexpr double mhz_per_tesla = 1e6; // gyromagnetic ratios arrive as MHz/T

} // namespace shf
