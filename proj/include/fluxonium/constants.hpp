// constants.hpp: physical constants (CODATA 2018) and unit helpers.
//
// Energies are stored as frequencies in Hz (E/h) throughout the library.
// Conversions to joules, rad/s and external units happen only at the edges.

#pragma once

#include <cmath>
#include <numbers>

namespace fluxonium {

namespace constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

inline constexpr double h = 6.62607015e-34;         // J s
inline constexpr double hbar = h / two_pi;          // J s
inline constexpr double k_b = 1.380649e-23;         // J / K
inline constexpr double e = 1.602176634e-19;        // C
inline constexpr double phi0 = h / (2.0 * e);       // Wb
inline constexpr double reduced_phi0 = phi0 / two_pi;
inline constexpr double epsilon0 = 8.8541878128e-12;  // F / m
inline constexpr double r_k = h / (e * e);          // Ohm

// Aluminium gap, 180 ueV.
inline constexpr double aluminium_gap = 180e-6 * e;  // J

}  // namespace constants

/// Frequency in Hz to energy in J.
inline constexpr double hz_to_joule(double f) { return constants::h * f; }

/// Frequency in Hz to angular frequency in rad/s.
inline constexpr double hz_to_angular(double f) { return constants::two_pi * f; }

inline constexpr double angular_to_hz(double w) { return w / constants::two_pi; }

/// hbar * omega / (k_B * T): the Boltzmann exponent of a quantum at omega.
inline double boltzmann_exponent(double omega, double temperature) {
    return constants::hbar * omega / (constants::k_b * temperature);
}

/// coth(x) that stays finite in the large-x limit.
inline double coth(double x) {
    if (std::abs(x) > 20.0) return x > 0 ? 1.0 : -1.0;
    return 1.0 / std::tanh(x);
}

/// Bose-Einstein occupation n_B(omega, T).
inline double bose_occupation(double omega, double temperature) {
    return 1.0 / std::expm1(boltzmann_exponent(omega, temperature));
}

}  // namespace fluxonium
