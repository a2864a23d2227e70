#pragma once

#include <string>

#include "bispec/scatter.hpp"

namespace bispec {

// 4 (<d psi|d psi> - |<psi|d psi>|^2)
double qfi_pure(double dd, cplx sd);

// Symmetric logarithmic derivative, L rho + rho L = 2 drho, on the support of rho.
cmat sld(const cmat& rho, const cmat& drho, double rel_tol = 1e-12);
// Tr(rho L^2) with L from sld().
double qfi_sld(const cmat& rho, const cmat& drho, double rel_tol = 1e-12);
// Spectral three-term formula: eigenvalue changes, eigenvector motion and the cross term.
double qfi_mixed_spectral(const cmat& rho, const cmat& drho, double rel_tol = 1e-12);

// QFI of the detected (no-loss) branch, normalised by 1 - N.
double biphoton_qfi(const ScatteredState& s);
double idler_qfi(const ScatteredState& s);

struct XOperator {
    cmat x;       // x_mn = r_m conj(r_n) <phi_n|d phi_m> / norm_const
    cplx trace_x; // sum_n p_n <phi_n|d phi_n>
};

XOperator x_operator(const ScatteredState& s);
// <Psi|d Psi> of the normalised detected branch, from the Gram data.
cplx branch_overlap(const ScatteredState& s);

struct BranchCfi {
    double cfi = 0;        // measurement-optimal CFI summed over outcomes
    double mixing_cfi = 0; // classical Fisher information of the outcome probabilities
};

// Idler measured in the basis V|xi_x>, signal measured optimally per outcome.
BranchCfi locc_detail(const ScatteredState& s, const cmat& V);
double locc_cfi(const ScatteredState& s, const cmat& V);

// Signal measured first in W applied to the symmetric orthonormalisation of its modes.
BranchCfi s2i_detail(const ScatteredState& s, const cmat& W);
double s2i_cfi(const ScatteredState& s, const cmat& W);

// QFI of the signal photon alone, built explicitly in an orthonormal basis.
double reduced_signal_qfi(const ScatteredState& s);
// The same quantity from V = 1 minus the pairwise correction; exact for G = I.
double reduced_signal_qfi_pairwise(const ScatteredState& s);

// Traceless matrix whose zero diagonal under V saturates the biphoton QFI.
cmat optimal_target(const ScatteredState& s);
cmat optimal_unitary(const ScatteredState& s);

// Unitary V with V^H A V of vanishing diagonal, for traceless A.
cmat zero_diagonal_unitary(const cmat& A, double tol = 1e-10);

struct FisherReport {
    Param theta = Param::Gamma;
    double q_total = 0, c_classical = 0, q_idler = 0, q_biph = 0, q_reduced = 0;
    double c_locc_identity = 0, c_locc_v0 = 0, c_s2i = 0;
    double kappa = 0, varsigma = 0;
    double N = 0, N_theta = 0;
    int n_modes = 0;
};

// Three-term decomposition only.
FisherReport total_qfi(const ScatteredState& s);
// Everything, including the measurement CFIs and ratios.
FisherReport fisher_report(const ScatteredState& s, bool with_v0 = true);
void ratios(FisherReport& r);

struct PostselectCheck {
    double q_pdc = 0, q_ps = 0, lambda = 0, predicted = 0, residual = 0;
};

// Q_PS against Q_PDC / Lambda - (4 / Lambda^2) |sum |r_n|^2 <phi_n|d phi_n>|^2.
PostselectCheck postselect_relation(const ScatteredState& s_pdc, const ScatteredState& s_ps);

} // namespace bispec
