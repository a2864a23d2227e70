#pragma once

// Internal units: ps for time, rad/ps for angular frequency, ps^-1 for rates.

namespace bispec::units {

inline constexpr double hbar_eV_ps = 6.582119569e-4;
inline constexpr double eV_to_rad_per_ps = 1519.267;
inline constexpr double c_cm_per_ps = 0.0299792458;

// How a wavenumber (cm^-1) is turned into rad/ps.
enum class WavenumberConvention {
    Angular, // omega = 2 pi c nu~
    Linear   // omega = c nu~, no 2 pi; default for PDC pump widths
};

double wavenumber_to_rad_per_ps(double cm_inv, WavenumberConvention conv = WavenumberConvention::Angular);
double ev_to_rad_per_ps(double ev);

} // namespace bispec::units
