#pragma once

#include <Eigen/Dense>

#include "bispec/types.hpp"

namespace bispec {

enum class MatterKind { TLS, CD };

// Half: the excited amplitude decays at (Gamma + Gamma_perp)/2 and the outgoing
// field is xi - Gamma eps. Full: the amplitude decays at Gamma + Gamma_perp and
// the outgoing field is xi - 2 Gamma eps.
enum class RateConvention { Half, Full };

struct MatterSystem {
    MatterKind kind = MatterKind::TLS;
    double gamma = 0.15;
    double gamma_perp = 0.0;
    RateConvention convention = RateConvention::Half;
    // TLS
    double delta = 0.0;
    // CD, site frequencies relative to the carrier are omega_a - omega_bar_S
    double omega_a = 0.0, omega_b = 0.0, J = 0.0;
    double dip_a = 1.0, dip_b = 1.0;
    double omega_bar_S = 0.0;

    static MatterSystem tls(double gamma, double gamma_perp, double delta,
                            RateConvention conv = RateConvention::Half);
    static MatterSystem cd(double gamma, double gamma_perp, double omega_a, double omega_b, double J,
                           double dip_a, double dip_b, double omega_bar_S,
                           RateConvention conv = RateConvention::Half);

    void validate() const;
    int dim() const { return kind == MatterKind::TLS ? 1 : 2; }
    double rate_scale() const { return convention == RateConvention::Full ? 2.0 : 1.0; }

    // Coupling g in phi = xi - g eps, and its derivative.
    double coupling() const { return rate_scale() * gamma; }
    double d_coupling(Param p) const { return p == Param::Gamma ? rate_scale() : 0.0; }
    // Product g g_perp weighting the loss branch, and its derivative.
    double loss_product() const { double s = rate_scale(); return s * s * gamma * gamma_perp; }
    double d_loss_product(Param p) const
    {
        double s = rate_scale();
        return p == Param::Gamma ? s * s * gamma_perp : 0.0;
    }

    bool supports(Param p) const { return p != Param::J || kind == MatterKind::CD; }
    double get(Param p) const;
    MatterSystem with(Param p, double value) const;
};

struct ExcitonicData {
    double theta = 0;
    double omega_alpha = 0, omega_beta = 0;
    double delta_alpha = 0, delta_beta = 0;
    double lambda_alpha = 0, lambda_beta = 0;
};

ExcitonicData excitonic(const MatterSystem& ms);

// Linear response in state-space form: y' = M y + w xi, eps = w^T y, so that
// f(t) = w^T exp(M t) w. dM is the derivative of M with respect to the parameter.
struct StateSpace {
    cmat M;
    cmat dM;
    cvec w;
};

StateSpace state_space(const MatterSystem& ms, Param p);
cmat generator(const MatterSystem& ms);

cplx char_fn(const MatterSystem& ms, double t);
cplx char_fn_deriv(const MatterSystem& ms, Param p, double t);

// Site-basis reference for the CD closed form, through a general matrix exponential.
cplx char_fn_reference(const MatterSystem& ms, double t);

Eigen::Matrix2cd expm2(const Eigen::Matrix2cd& m);
// Derivative of exp(m + s dm) at s = 0.
Eigen::Matrix2cd expm2_deriv(const Eigen::Matrix2cd& m, const Eigen::Matrix2cd& dm);

} // namespace bispec
