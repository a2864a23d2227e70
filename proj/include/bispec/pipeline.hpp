#pragma once

#include "bispec/fisher.hpp"
#include "bispec/units.hpp"

namespace bispec {

struct PdcOptions {
    units::WavenumberConvention convention = units::WavenumberConvention::Linear;
    double alpha_over_hbar = 0.01;
    int n_modes = 0;          // 0 selects the truncation rule
    bool grid_refine = true;  // halve dt until Q_biph moves by less than refine_tol
    double refine_tol = 1e-3;
    int max_refine = 16;
    bool with_v0 = true;      // include the 1-LOCC optimum in the report
    bool postselect = false;  // drop the vacuum before scattering
    ConvolutionMethod method = ConvolutionMethod::Exponential;
};

struct PdcPoint {
    double T_qent = 0;            // ps
    double sigma_p_cm = 0;        // cm^-1
    double sigma_p = 0;           // rad/ps
    double entropy = 0;
    FisherReport report;
    SchmidtFactors factors;
    int grid_n = 0;
    double grid_dt = 0;
    int refine = 1;
};

// Signal grid for a PDC state: Hermite-Gauss extent with a step resolving the matter decay.
TimeGrid pdc_signal_grid(const SchmidtFactors& f, int n_modes, const MatterSystem& ms, int refine);

PdcSchmidt build_pdc(const MatterSystem& ms, double sigma_p_cm, double T_qent, const PdcOptions& opt,
                     int refine = 1);

PdcPoint evaluate_pdc_point(const MatterSystem& ms, Param theta, double sigma_p_cm, double T_qent,
                            const PdcOptions& opt);

} // namespace bispec
