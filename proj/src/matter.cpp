#include "bispec/matter.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace bispec {

MatterSystem MatterSystem::tls(double gamma, double gamma_perp, double delta, RateConvention conv)
{
    MatterSystem m;
    m.kind = MatterKind::TLS;
    m.gamma = gamma;
    m.gamma_perp = gamma_perp;
    m.delta = delta;
    m.convention = conv;
    m.validate();
    return m;
}

MatterSystem MatterSystem::cd(double gamma, double gamma_perp, double omega_a, double omega_b, double J,
                              double dip_a, double dip_b, double omega_bar_S, RateConvention conv)
{
    MatterSystem m;
    m.kind = MatterKind::CD;
    m.gamma = gamma;
    m.gamma_perp = gamma_perp;
    m.omega_a = omega_a;
    m.omega_b = omega_b;
    m.J = J;
    m.dip_a = dip_a;
    m.dip_b = dip_b;
    m.omega_bar_S = omega_bar_S;
    m.convention = conv;
    m.validate();
    return m;
}

void MatterSystem::validate() const
{
    if (!(gamma > 0)) throw InvalidArgument("matter: gamma must be positive");
    if (!(gamma_perp >= 0)) throw InvalidArgument("matter: gamma_perp must be non-negative");
    if (kind == MatterKind::CD) {
        if (omega_a == omega_b && J == 0.0)
            throw InvalidArgument("matter: degenerate homodimer with J = 0");
        if (dip_a == 0.0) throw InvalidArgument("matter: dip_a is the reference dipole and must be nonzero");
    }
}

double MatterSystem::get(Param p) const
{
    switch (p) {
    case Param::Gamma: return gamma;
    case Param::Omega0: return kind == MatterKind::TLS ? delta : omega_a;
    case Param::J:
        if (kind != MatterKind::CD) throw InvalidArgument("parameter J requires a CD system");
        return J;
    }
    return 0.0;
}

MatterSystem MatterSystem::with(Param p, double v) const
{
    MatterSystem m = *this;
    switch (p) {
    case Param::Gamma: m.gamma = v; break;
    case Param::Omega0:
        if (kind == MatterKind::TLS) {
            m.delta = v;
        } else {
            double d = v - omega_a;
            m.omega_a += d;
            m.omega_b += d;
        }
        break;
    case Param::J:
        if (kind != MatterKind::CD) throw InvalidArgument("parameter J requires a CD system");
        m.J = v;
        break;
    }
    return m;
}

ExcitonicData excitonic(const MatterSystem& ms)
{
    if (ms.kind != MatterKind::CD) throw InvalidArgument("excitonic: CD system required");
    ms.validate();
    ExcitonicData x;
    double d = ms.omega_a - ms.omega_b;
    if (d == 0.0)
        x.theta = (ms.J > 0 ? 1.0 : -1.0) * pi / 4;
    else
        x.theta = 0.5 * std::atan(2 * ms.J / d);
    double c = std::cos(x.theta), s = std::sin(x.theta), s2 = std::sin(2 * x.theta);
    x.omega_alpha = ms.omega_a * c * c + ms.omega_b * s * s + ms.J * s2;
    x.omega_beta = ms.omega_a * s * s + ms.omega_b * c * c - ms.J * s2;
    x.delta_alpha = x.omega_alpha - ms.omega_bar_S;
    x.delta_beta = x.omega_beta - ms.omega_bar_S;
    double rb = ms.dip_b / ms.dip_a;
    x.lambda_alpha = c + s * rb;
    x.lambda_beta = -s + c * rb;
    return x;
}

namespace {

double decay(const MatterSystem& ms) { return 0.5 * ms.rate_scale() * (ms.gamma + ms.gamma_perp); }

Eigen::Vector2d site_dipoles(const MatterSystem& ms) { return {1.0, ms.dip_b / ms.dip_a}; }

Eigen::Matrix2cd site_generator(const MatterSystem& ms)
{
    Eigen::Vector2d w = site_dipoles(ms);
    Eigen::Matrix2cd H;
    H << ms.omega_a - ms.omega_bar_S, ms.J, ms.J, ms.omega_b - ms.omega_bar_S;
    return -I * H - decay(ms) * (w * w.transpose()).cast<cplx>();
}

Eigen::Matrix2cd site_generator_deriv(const MatterSystem& ms, Param p)
{
    Eigen::Vector2d w = site_dipoles(ms);
    Eigen::Matrix2cd d;
    switch (p) {
    case Param::Gamma: d = -0.5 * ms.rate_scale() * (w * w.transpose()).cast<cplx>(); break;
    case Param::Omega0: d = -I * Eigen::Matrix2cd::Identity(); break;
    case Param::J: d << 0.0, -I, -I, 0.0; break;
    }
    return d;
}

// sinh(v)/v and its derivative with respect to u = v^2, as entire functions of u.
void shc(cplx u, cplx& C, cplx& S, cplx& dS)
{
    cplx v = std::sqrt(u);
    C = std::cosh(v);
    if (std::abs(v) < 1e-4)
        S = 1.0 + u / 6.0 + u * u / 120.0;
    else
        S = std::sinh(v) / v;
    if (std::abs(u) < 1e-2)
        dS = 1.0 / 6.0 + u / 60.0 + u * u / 1680.0 + u * u * u / 90720.0;
    else
        dS = (C - S) / (2.0 * u);
}

} // namespace

cmat generator(const MatterSystem& ms)
{
    if (ms.kind == MatterKind::TLS) {
        cmat M(1, 1);
        M(0, 0) = -decay(ms) - I * ms.delta;
        return M;
    }
    return site_generator(ms);
}

StateSpace state_space(const MatterSystem& ms, Param p)
{
    if (!ms.supports(p)) throw InvalidArgument(std::string("parameter ") + to_string(p) + " not applicable to TLS");
    StateSpace s;
    s.M = generator(ms);
    if (ms.kind == MatterKind::TLS) {
        s.w = cvec::Ones(1);
        s.dM.resize(1, 1);
        s.dM(0, 0) = p == Param::Gamma ? cplx(-0.5 * ms.rate_scale()) : -I;
    } else {
        s.w = site_dipoles(ms).cast<cplx>();
        s.dM = site_generator_deriv(ms, p);
    }
    return s;
}

Eigen::Matrix2cd expm2(const Eigen::Matrix2cd& m)
{
    cplx mean = 0.5 * (m(0, 0) + m(1, 1));
    Eigen::Matrix2cd K = m - mean * Eigen::Matrix2cd::Identity();
    cplx u = K(0, 0) * K(0, 0) + K(0, 1) * K(1, 0);
    cplx C, S, dS;
    shc(u, C, S, dS);
    return std::exp(mean) * (C * Eigen::Matrix2cd::Identity() + S * K);
}

Eigen::Matrix2cd expm2_deriv(const Eigen::Matrix2cd& m, const Eigen::Matrix2cd& dm)
{
    cplx mean = 0.5 * (m(0, 0) + m(1, 1));
    cplx dmean = 0.5 * (dm(0, 0) + dm(1, 1));
    Eigen::Matrix2cd K = m - mean * Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd dK = dm - dmean * Eigen::Matrix2cd::Identity();
    cplx u = K(0, 0) * K(0, 0) + K(0, 1) * K(1, 0);
    cplx du = 2.0 * K(0, 0) * dK(0, 0) + dK(0, 1) * K(1, 0) + K(0, 1) * dK(1, 0);
    cplx C, S, dS;
    shc(u, C, S, dS);
    Eigen::Matrix2cd Id = Eigen::Matrix2cd::Identity();
    Eigen::Matrix2cd E = C * Id + S * K;
    Eigen::Matrix2cd dE = (0.5 * S * du) * Id + (dS * du) * K + S * dK;
    return std::exp(mean) * (dmean * E + dE);
}

cplx char_fn(const MatterSystem& ms, double t)
{
    if (t < 0) throw InvalidArgument("char_fn: t < 0 (causal response)");
    if (ms.kind == MatterKind::TLS) return std::exp((-decay(ms) - I * ms.delta) * t);
    ExcitonicData x = excitonic(ms);
    Eigen::Vector2d lam(x.lambda_alpha, x.lambda_beta);
    Eigen::Matrix2cd M;
    M << -I * x.delta_alpha, 0.0, 0.0, -I * x.delta_beta;
    M -= decay(ms) * (lam * lam.transpose()).cast<cplx>();
    Eigen::Vector2cd l = lam.cast<cplx>();
    return l.transpose() * expm2(M * t) * l;
}

cplx char_fn_deriv(const MatterSystem& ms, Param p, double t)
{
    if (t < 0) throw InvalidArgument("char_fn_deriv: t < 0 (causal response)");
    if (!ms.supports(p)) throw InvalidArgument(std::string("parameter ") + to_string(p) + " not applicable to TLS");
    if (ms.kind == MatterKind::TLS) {
        cplx f = char_fn(ms, t);
        return p == Param::Gamma ? -0.5 * ms.rate_scale() * t * f : -I * t * f;
    }
    Eigen::Vector2cd w = site_dipoles(ms).cast<cplx>();
    Eigen::Matrix2cd dE = expm2_deriv(site_generator(ms) * t, site_generator_deriv(ms, p) * t);
    return w.transpose() * dE * w;
}

cplx char_fn_reference(const MatterSystem& ms, double t)
{
    if (ms.kind == MatterKind::TLS) return std::exp(generator(ms)(0, 0) * t);
    Eigen::Matrix2cd E = (site_generator(ms) * t).exp();
    Eigen::Vector2cd w = site_dipoles(ms).cast<cplx>();
    return w.transpose() * E * w;
}

} // namespace bispec
