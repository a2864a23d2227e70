#include "bispec/units.hpp"
#include "bispec/types.hpp"

namespace bispec {

const char* to_string(Param p)
{
    switch (p) {
    case Param::Gamma: return "gamma";
    case Param::Omega0: return "omega0";
    case Param::J: return "J";
    }
    return "?";
}

Param param_from_string(const std::string& s)
{
    if (s == "gamma" || s == "Gamma") return Param::Gamma;
    if (s == "omega0" || s == "omega_0" || s == "w0") return Param::Omega0;
    if (s == "J") return Param::J;
    throw InvalidArgument("unknown parameter '" + s + "'");
}

namespace units {

double wavenumber_to_rad_per_ps(double cm_inv, WavenumberConvention conv)
{
    double w = c_cm_per_ps * cm_inv;
    return conv == WavenumberConvention::Angular ? 2.0 * pi * w : w;
}

double ev_to_rad_per_ps(double ev) { return ev * eV_to_rad_per_ps; }

} // namespace units
} // namespace bispec
