#pragma once

#include <iosfwd>

#include "bispec/grid.hpp"
#include "bispec/matter.hpp"

namespace bispec {

// Outgoing single photon in an orthonormal basis whose element 0 is the input
// pulse. With phi = xi - g eps, the amplitudes are C_k = g <b_k|eps>, so the
// outgoing coefficients are (1 - C_0, -C_1, -C_2, ...).
struct ModalSet {
    std::vector<Envelope> basis; // empty for the analytic routes
    cvec C;
    cvec D;                      // d C_k / d theta
    double M = 1.0;              // detection probability
    double M_theta = 0.0;
    double tail_D2 = 0.0;        // estimated sum of |D_k|^2 beyond the truncation
    cplx tail_X = 0.0;           // estimated truncation remainder of X
    double tail_error = 0.0;     // bound on the error of tail_D2 itself
    int k_max() const { return static_cast<int>(C.size()) - 1; }
};

struct OnePhoton {
    Envelope phi;
    double M = 1.0;
};

OnePhoton one_photon_scatter(const Envelope& xi, const MatterSystem& ms);

// Weighted-Laguerre functions l_k(t) = exp(-t/2tau) L_k(t/tau) / sqrt(tau), k = 0..k_max.
std::vector<Envelope> wl_basis(double tau, int k_max, const TimeGrid& grid);
rvec wl_values(double tau, int k_max, double t);

// Closed forms, Delta = 0 and Gamma_perp = 0 only. k_max <= 0 picks the order
// at which the geometric tail is negligible (at least 32).
ModalSet wl_modal_amplitudes(double tau, const MatterSystem& ms, Param p, int k_max = 0);
// Quadrature on a fine grid with one Richardson step; any Delta and Gamma_perp.
ModalSet wl_modal_quadrature(double tau, const MatterSystem& ms, Param p, int k_max = 32,
                             bool keep_basis = false);

// Square pulse of width tau: Fourier basis on [0, tau) and on [tau, tau + 40/Gamma).
// j_max harmonics per interval; the 1/j^2 tail is added analytically.
ModalSet square_modal_amplitudes(double tau, const MatterSystem& ms, Param p, int j_max = 2000000);

// 4 sum |D_k|^2 - 4 (Im X)^2 / M + M_theta^2 / (1 - M).
double modal_qfi(const ModalSet& set, double tail_tol = 1e-6);

// Closed-form QFIs with the full-rate convention, Delta = 0, Gamma_perp = 0.
double exponential_qfi_closed(double tau, double gamma);
double square_qfi_gamma_closed(double tau, double gamma);
double square_qfi_omega_exact(double tau, double gamma);
// Form 8/(G^4 tau^2) [2e^{-2x} + e^{-x}(x^2 + 7x - 4) + (2 + 4x^2 - 7x)], x = G tau, as usually quoted.
double square_qfi_omega_quoted(double tau, double gamma);

enum class PulseFamily { Exponential, Square };

struct TauSweepRow {
    double tau = 0;
    double q_gamma = 0, q_omega = 0;
    double closed_gamma = 0, closed_omega = 0;
};

std::vector<TauSweepRow> qfi_tau_sweep(PulseFamily fam, const MatterSystem& ms, const std::vector<double>& taus);
void write_tau_sweep_csv(std::ostream& os, const std::vector<TauSweepRow>& rows);

} // namespace bispec
