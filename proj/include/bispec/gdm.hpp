#pragma once

#include <array>
#include <functional>

#include "bispec/grid.hpp"
#include "bispec/matter.hpp"

namespace bispec {

// Input pulse as a function of time; breakpoints mark kinks or jumps.
struct Drive {
    std::function<cplx(double)> f;
    std::vector<double> breakpoints;

    static Drive zero();
    static Drive from_envelope(const Envelope& e); // linear interpolation
    static Drive analytic(std::function<cplx(double)> f, std::vector<double> breaks = {});
    cplx operator()(double t) const { return f ? f(t) : cplx(0.0); }
};

enum class InputKind { Fock, Coherent, PACS };

struct GDMInput {
    InputKind kind = InputKind::Fock;
    int N = 1;   // photon number (Fock) or number of added photons (PACS)
    Drive xi;    // single-photon wavepacket (Fock, PACS)
    Drive alpha; // coherent amplitude (Coherent, PACS)
    cplx beta = 0.0; // <xi|alpha>, only used for PACS initial conditions
};

// (N+1)^2 blocks of d x d two-sided operators rho^{m,n}, m indexing the ket side.
struct GDMState {
    int N = 0;
    int d = 2;
    std::vector<cmat> blocks;
    double t = 0;

    cmat& at(int m, int n) { return blocks[m * (N + 1) + n]; }
    const cmat& at(int m, int n) const { return blocks[m * (N + 1) + n]; }
};

// Matter operators on {g, e} (TLS) or {g, a, b} (CD) for one side of the evolution.
struct MatterOps {
    cmat H;  // system Hamiltonian in the rotating frame
    cmat L;  // coupling to the probe mode
    cmat Lb; // coupling to the environment (upper-bound mode)
};

MatterOps matter_ops(const MatterSystem& ms);

struct GDMOptions {
    double T_final = 0;  // 0 selects 80 / Gamma
    double atol = 1e-10;
    double rtol = 1e-8;
    double h = 0;        // stencil step, 0 selects the default
    bool richardson = true;
    bool upper_bound = false; // environment dissipator when Gamma_perp > 0
};

GDMState gdm_initial(const GDMInput& in, int d);

// Right-hand sides. ket and bra carry the two parameter values.
void fock_rhs(const GDMState& s, const MatterOps& ket, const MatterOps& bra, cplx xi, bool upper,
              GDMState& ds);
void coherent_rhs(const GDMState& s, const MatterOps& ket, const MatterOps& bra, cplx alpha, bool upper,
                  GDMState& ds);
void pacs_rhs(const GDMState& s, const MatterOps& ket, const MatterOps& bra, cplx alpha, cplx xi,
              bool upper, GDMState& ds);

// Tr of the terminal block at time T.
cplx gdm_overlap(const MatterSystem& ket, const MatterSystem& bra, const GDMInput& in, double T,
                 const GDMOptions& opt);
// Full state at time T for diagnostics.
GDMState gdm_evolve(const MatterSystem& ket, const MatterSystem& bra, const GDMInput& in, double T,
                    const GDMOptions& opt);

// (t, Tr rho^{N,N}(t)) at n_samples evenly spaced times in [0, T], for debugging.
std::vector<std::pair<double, cplx>> gdm_trajectory(const MatterSystem& ket, const MatterSystem& bra,
                                                    const GDMInput& in, double T, const GDMOptions& opt,
                                                    int n_samples);

struct LikelihoodSurface {
    std::array<std::array<cplx, 3>, 3> values{}; // [i][j] at (theta + (i-1)h, theta + (j-1)h)
    double h = 0;
    double theta = 0;
};

LikelihoodSurface integrate(const MatterSystem& ms, Param p, const GDMInput& in, double h,
                            const GDMOptions& opt);

// 4 d1 d2 log|values| at the centre, by the mixed central difference.
double gdm_qfi(const LikelihoodSurface& s);

struct GDMResult {
    double qfi = 0;        // Richardson extrapolation of the two steps
    double qfi_half = 0;   // at step h/2
    double qfi_coarse = 0; // at step h
    double h = 0;
};

double default_stencil_step(const MatterSystem& ms, Param p);

// Surfaces at step h and h/2, combined to cancel the O(h^2) stencil error.
GDMResult gdm_qfi_richardson(const MatterSystem& ms, Param p, const GDMInput& in, const GDMOptions& opt);

} // namespace bispec
