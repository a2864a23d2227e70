#pragma once

#include <memory>

#include "bispec/convolution.hpp"
#include "bispec/probe.hpp"

namespace bispec {

struct ScatterOptions {
    ConvolutionMethod method = ConvolutionMethod::Exponential;
    bool keep_fields = true;    // store phi and dphi samples
    bool analytic_tail = true;  // integrate the fields beyond the grid end exactly
};

struct ScatteredState {
    std::shared_ptr<const SchmidtState> src; // may be empty for synthetic states
    MatterSystem ms;
    Param theta = Param::Gamma;

    cvec r;
    double norm_const = 1.0;
    bool has_vacuum = false;

    std::vector<Envelope> phi, dphi;
    cmat eps_gram;  // <eps_m|eps_n>
    cmat deps_gram; // <eps_m|d eps_n>
    cmat G, D, E;   // <phi_m|phi_n>, <phi_m|d phi_n>, <d phi_m|d phi_n>
    double loss = 0, dloss = 0; // g g_perp and its derivative
    double N = 0, N_theta = 0;

    int n_modes() const { return static_cast<int>(r.size()); }
    // Weights |r_n|^2 / norm_const.
    rvec p() const;
    double p_vac() const { return has_vacuum ? 1.0 / norm_const : 0.0; }
    // Norm of the detected branch, 1 - N, and its derivative.
    double s() const { return 1.0 - N; }
    double ds() const { return -N_theta; }
};

// eps = int f_M(t - s) xi(s) ds on the grid of xi.
Envelope distort(const Envelope& xi, const MatterSystem& ms,
                 ConvolutionMethod method = ConvolutionMethod::Exponential);

ScatteredState scatter_schmidt(const SchmidtState& src, const MatterSystem& ms, Param theta,
                               const ScatterOptions& opt = {});

// Fill N, N_theta from the Gram data already present in s.
void finish_scattered(ScatteredState& s);

struct IdlerSigma {
    cmat sigma;
    cmat dsigma;
};

IdlerSigma idler_sigma(const ScatteredState& s);

} // namespace bispec
