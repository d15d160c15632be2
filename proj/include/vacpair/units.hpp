#pragma once

#include <numbers>

#include "error.hpp"

namespace vacpair
{
namespace constants
{
inline constexpr double c_light = 299792458.0;  // m/s
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2 * std::numbers::pi;
inline constexpr double micron = 1e-6;  // m
}  // namespace constants

//! Vacuum wavelength [um] to angular frequency [rad/s].
inline double wavelength_to_omega(double lambda_um)
{
    if (!(lambda_um > 0))
        throw Error(ErrorCode::NonPositive, "wavelength must be positive");
    return constants::two_pi * constants::c_light / (lambda_um * constants::micron);
}

//! Angular frequency [rad/s] to vacuum wavelength [um].
inline double omega_to_wavelength(double omega)
{
    if (!(omega > 0))
        throw Error(ErrorCode::NonPositive, "frequency must be positive");
    return constants::two_pi * constants::c_light / omega / constants::micron;
}

inline double um_to_m(double x) { return x * constants::micron; }
inline double m_to_um(double x) { return x / constants::micron; }

}  // namespace vacpair
