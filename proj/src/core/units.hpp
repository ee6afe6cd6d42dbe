#pragma once

// Physical constants (SI unless noted) and unit helpers. All internal rates
// and frequencies are angular (rad/s); conversions from cyclic frequencies
// happen at the interface boundaries.

namespace pulselab {

inline constexpr double two_pi = 6.283185307179586476925286766559;

namespace constants {

inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double k_boltzmann = 1.380649e-23;    // J/K
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double atomic_mass_unit = 1.66053906660e-27;  // kg

inline constexpr double mass_sr88 = 87.9056121 * atomic_mass_unit;  // kg

// Atomic units.
inline constexpr double bohr_radius = 5.29177210903e-11;   // m
inline constexpr double atomic_time = 2.4188843265857e-17; // s
inline constexpr double hartree_ghz = 6.579683920502e6;    // E_h/h in GHz
inline constexpr double fine_structure_inv = 137.035999084;

}  // namespace constants

// Angular frequency from a cyclic frequency in Hz.
inline constexpr double from_hz(double f_hz) { return two_pi * f_hz; }
inline constexpr double to_hz(double omega) { return omega / two_pi; }

}  // namespace pulselab
