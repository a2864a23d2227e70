#pragma once

#include <functional>
#include <memory>

#include "bispec/grid.hpp"

namespace bispec {

struct EnvelopeParams {
    double tau = 1.0;  // width (ps); Hermite-Gauss scale k
    double t_ar = 0.0; // centre for gaussian and hermite_gauss
    int n = 0;         // Hermite-Gauss index
};

Envelope make_envelope(EnvelopeKind kind, const EnvelopeParams& p, const TimeGrid& grid);
Envelope make_custom_envelope(const TimeGrid& grid, const cvec& amp);

// Closed-form value of a standard envelope at time t.
cplx envelope_value(EnvelopeKind kind, const EnvelopeParams& p, double t);

// Normalised Hermite functions psi_0..psi_nmax at x.
rvec hermite_functions(int nmax, double x);

struct GaussianJSA {
    double a = 0, b = 0, c = 0;   // (rad/ps)^-2
    double alpha_over_hbar = 0.01;
    double sigma_p = 0;           // rad/ps
    double T_S = 0, T_I = 0, T_qent = 0; // ps
};

inline constexpr double pdc_gamma = 0.04822;

GaussianJSA pdc_gaussian_jsa(double sigma_p, double T_qent, double alpha_over_hbar = 0.01);

// Value of the Gaussian joint spectral amplitude at (w_S, w_I).
cplx gaussian_jsa_value(const GaussianJSA& jsa, double w_s, double w_i);

struct SchmidtFactors {
    double mu = 0;
    double kappa_S = 0, kappa_I = 0; // ps
    cplx r0 = 0;
};

SchmidtFactors schmidt_factors(const GaussianJSA& jsa);

// Number of modes so that |mu|^(2N) < tol, capped.
int schmidt_truncation(double mu, double tol = 1e-10, int cap = 256);

struct SchmidtState {
    cvec r;
    std::vector<Envelope> signal_modes;
    std::vector<Envelope> idler_modes;
    double norm_const = 1.0;
    bool has_vacuum = false;

    int n_modes() const { return static_cast<int>(r.size()); }
    double weight_sum() const { return r.squaredNorm(); }
};

// Grid wide and fine enough for Hermite-Gauss modes up to nmax with time scale k.
TimeGrid hermite_grid(double k, int nmax, double dt_max = 0.0, int refine = 1);

struct PdcSchmidt {
    SchmidtState state;
    SchmidtFactors factors;
};

// n_modes <= 0 selects the truncation rule. Idler modes go on their own grid
// when one is supplied, otherwise on a grid built from kappa_I.
PdcSchmidt pdc_schmidt(const GaussianJSA& jsa, int n_modes, const TimeGrid& signal_grid);
PdcSchmidt pdc_schmidt(const GaussianJSA& jsa, int n_modes, const TimeGrid& signal_grid,
                       const TimeGrid& idler_grid);

// Truncated Schmidt sum in the frequency domain against the closed-form Gaussian,
// on a square frequency grid with at least n_grid points per axis. Returns the absolute L2 error.
double mehler_l2_error(const GaussianJSA& jsa, int n_modes, int n_grid = 128);

double entanglement_entropy(const SchmidtState& s);
double entanglement_entropy(const std::vector<double>& weights);

SchmidtState tfm_state(double theta_t, double k1, double k2, double alpha_over_hbar,
                       const TimeGrid& signal_grid, const TimeGrid& idler_grid);

// Single-mode product state with weight 1 and no vacuum.
SchmidtState product_state(const Envelope& signal);

// Same modes and weights with the vacuum dropped and weights renormalised.
SchmidtState postselect(const SchmidtState& s);

} // namespace bispec
