#include "bispec/probe.hpp"

#include <algorithm>
#include <cmath>

namespace bispec {

rvec hermite_functions(int nmax, double x)
{
    rvec h(nmax + 1);
    h(0) = std::pow(pi, -0.25) * std::exp(-0.5 * x * x);
    if (nmax >= 1) h(1) = std::sqrt(2.0) * x * h(0);
    for (int n = 1; n < nmax; ++n)
        h(n + 1) = std::sqrt(2.0 / (n + 1)) * x * h(n) - std::sqrt(double(n) / (n + 1)) * h(n - 1);
    return h;
}

cplx envelope_value(EnvelopeKind kind, const EnvelopeParams& p, double t)
{
    const double tau = p.tau;
    switch (kind) {
    case EnvelopeKind::Exponential:
        return t < 0 ? 0.0 : std::exp(-t / (2 * tau)) / std::sqrt(tau);
    case EnvelopeKind::Gaussian: {
        double u = (t - p.t_ar) / tau;
        return std::pow(pi, -0.25) / std::sqrt(tau) * std::exp(-0.5 * u * u);
    }
    case EnvelopeKind::Square:
        if (t < 0 || t > tau) return 0.0;
        return 1.0 / std::sqrt(tau);
    case EnvelopeKind::HermiteGauss:
        return hermite_functions(p.n, (t - p.t_ar) / tau)(p.n) / std::sqrt(tau);
    case EnvelopeKind::Custom:
        break;
    }
    throw InvalidArgument("envelope_value: unknown kind");
}

namespace {

double captured_fraction(EnvelopeKind kind, const EnvelopeParams& p, const TimeGrid& g)
{
    const double tau = p.tau;
    switch (kind) {
    case EnvelopeKind::Exponential:
        return std::exp(-std::max(g.t_min, 0.0) / tau) - std::exp(-std::max(g.t_max, 0.0) / tau);
    case EnvelopeKind::Gaussian:
        return 0.5 * (std::erf((g.t_max - p.t_ar) / tau) - std::erf((g.t_min - p.t_ar) / tau));
    case EnvelopeKind::Square: {
        double lo = std::max(g.t_min, 0.0), hi = std::min(g.t_max, tau);
        return hi > lo ? (hi - lo) / tau : 0.0;
    }
    default:
        return 1.0;
    }
}

} // namespace

Envelope make_envelope(EnvelopeKind kind, const EnvelopeParams& p, const TimeGrid& grid)
{
    if (!(p.tau > 0)) throw InvalidArgument("make_envelope: tau must be positive");
    if (kind == EnvelopeKind::Custom) throw InvalidArgument("make_envelope: use make_custom_envelope");
    if (kind == EnvelopeKind::HermiteGauss && p.n < 0) throw InvalidArgument("make_envelope: negative mode index");

    Envelope e;
    e.grid = grid;
    e.kind = kind;
    e.order = kind == EnvelopeKind::HermiteGauss ? p.n : 0;
    e.amp.resize(grid.n);
    for (int i = 0; i < grid.n; ++i) e.amp(i) = envelope_value(kind, p, grid.t(i));
    if (kind == EnvelopeKind::Square) {
        // half height on the sample that sits on the falling edge
        for (int i = 0; i < grid.n; ++i)
            if (std::abs(grid.t(i) - p.tau) < 1e-9 * grid.dt) e.amp(i) *= 0.5;
    }

    double frac = captured_fraction(kind, p, grid);
    double tn = norm2(e);
    if (kind == EnvelopeKind::HermiteGauss) frac = tn;
    if (frac < 1.0 - 1e-6 || !(tn > 0))
        throw InvalidArgument("make_envelope: grid-too-short (captured norm " + std::to_string(frac) + ")");
    e.amp /= std::sqrt(tn);
    return e;
}

Envelope make_custom_envelope(const TimeGrid& grid, const cvec& amp)
{
    if (amp.size() != grid.n) throw InvalidArgument("make_custom_envelope: size mismatch");
    Envelope e;
    e.grid = grid;
    e.amp = amp;
    e.kind = EnvelopeKind::Custom;
    return e;
}

GaussianJSA pdc_gaussian_jsa(double sigma_p, double T_qent, double alpha_over_hbar)
{
    if (!(sigma_p > 0)) throw InvalidArgument("pdc_gaussian_jsa: sigma_p must be positive");
    if (!(T_qent > 0)) throw InvalidArgument("pdc_gaussian_jsa: T_qent must be positive");
    GaussianJSA j;
    j.sigma_p = sigma_p;
    j.T_qent = T_qent;
    j.T_S = 0.12 * T_qent;
    j.T_I = 1.12 * T_qent;
    j.alpha_over_hbar = alpha_over_hbar;
    double p = std::isinf(sigma_p) ? 0.0 : 1.0 / (2 * sigma_p * sigma_p);
    j.a = p + pdc_gamma * j.T_S * j.T_S;
    j.b = p + pdc_gamma * j.T_S * j.T_I;
    j.c = p + pdc_gamma * j.T_I * j.T_I;
    return j;
}

cplx gaussian_jsa_value(const GaussianJSA& j, double ws, double wi)
{
    // cross term exp(-2 b w_S w_I), so that mu < 0 for b > 0
    double e = j.a * ws * ws + 2 * j.b * ws * wi + j.c * wi * wi;
    return -I * j.alpha_over_hbar / (std::sqrt(2 * pi) * j.sigma_p) * std::exp(-e);
}

SchmidtFactors schmidt_factors(const GaussianJSA& j)
{
    if (!(j.a > 0 && j.c > 0 && j.a * j.c - j.b * j.b > 0))
        throw InvalidArgument("schmidt_factors: JSA not elliptic");
    SchmidtFactors f;
    double sac = std::sqrt(j.a * j.c);
    // stable form of (-sqrt(ac) + sqrt(ac - b^2)) / b
    f.mu = -j.b / (sac + std::sqrt(j.a * j.c - j.b * j.b));
    double m2 = f.mu * f.mu;
    f.kappa_S = std::sqrt(2 * j.a * (1 - m2) / (1 + m2));
    f.kappa_I = std::sqrt(2 * j.c * (1 - m2) / (1 + m2));
    f.r0 = -I * j.alpha_over_hbar * std::sqrt((1 + m2) / (4 * sac * j.sigma_p * j.sigma_p));
    return f;
}

int schmidt_truncation(double mu, double tol, int cap)
{
    double m = std::abs(mu);
    if (m == 0.0) return 1;
    int n = static_cast<int>(std::ceil(std::log(tol) / (2 * std::log(m))));
    return std::clamp(n, 1, cap);
}

TimeGrid hermite_grid(double k, int nmax, double dt_max, int refine)
{
    double s = std::sqrt(2.0 * nmax + 1);
    double half = k * (s + 8.0);
    double dt = k / (8.0 * s);
    if (dt_max > 0) dt = std::min(dt, dt_max);
    dt /= std::max(refine, 1);
    int n = static_cast<int>(std::ceil(2 * half / dt)) + 1;
    return TimeGrid::make(-half, half, n);
}

namespace {

// (-i)^n psi_n(t/k)/sqrt(k): Fourier image of the frequency mode sqrt(k) psi_n(k w).
std::vector<Envelope> time_hermite_modes(int nmodes, double k, const TimeGrid& g)
{
    std::vector<Envelope> modes(nmodes);
    for (int n = 0; n < nmodes; ++n) {
        modes[n].grid = g;
        modes[n].kind = EnvelopeKind::HermiteGauss;
        modes[n].order = n;
        modes[n].amp.resize(g.n);
    }
    const cplx ph[4] = {1.0, -I, -1.0, I};
    for (int i = 0; i < g.n; ++i) {
        rvec h = hermite_functions(nmodes - 1, g.t(i) / k);
        for (int n = 0; n < nmodes; ++n) modes[n].amp(i) = ph[n % 4] * h(n) / std::sqrt(k);
    }
    return modes;
}

} // namespace

PdcSchmidt pdc_schmidt(const GaussianJSA& jsa, int n_modes, const TimeGrid& signal_grid)
{
    SchmidtFactors f = schmidt_factors(jsa);
    int n = n_modes > 0 ? n_modes : schmidt_truncation(f.mu);
    return pdc_schmidt(jsa, n, signal_grid, hermite_grid(f.kappa_I, n - 1));
}

PdcSchmidt pdc_schmidt(const GaussianJSA& jsa, int n_modes, const TimeGrid& signal_grid,
                       const TimeGrid& idler_grid)
{
    PdcSchmidt out;
    out.factors = schmidt_factors(jsa);
    const SchmidtFactors& f = out.factors;
    int n = f.mu == 0.0 ? 1 : (n_modes > 0 ? n_modes : schmidt_truncation(f.mu));

    SchmidtState& s = out.state;
    s.r.resize(n);
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
        s.r(i) = f.r0 * p;
        p *= f.mu;
    }
    s.signal_modes = time_hermite_modes(n, f.kappa_S, signal_grid);
    s.idler_modes = time_hermite_modes(n, f.kappa_I, idler_grid);
    s.has_vacuum = true;
    s.norm_const = 1.0 + s.r.squaredNorm();
    return out;
}

double mehler_l2_error(const GaussianJSA& jsa, int n_modes, int n_grid)
{
    SchmidtFactors f = schmidt_factors(jsa);
    int n = f.mu == 0.0 ? 1 : n_modes;
    double s = std::sqrt(2.0 * n + 1) + 6.0;
    // at least six samples per local wavelength of the highest mode
    n_grid = std::max(n_grid, static_cast<int>(std::ceil(2 * s * 6 * std::sqrt(2.0 * n + 1) / pi)) + 1);
    double ws_max = s / f.kappa_S, wi_max = s / f.kappa_I;
    double dws = 2 * ws_max / (n_grid - 1), dwi = 2 * wi_max / (n_grid - 1);

    std::vector<rvec> hs(n_grid), hi(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        hs[i] = hermite_functions(n - 1, f.kappa_S * (-ws_max + i * dws)) * std::sqrt(f.kappa_S);
        hi[i] = hermite_functions(n - 1, f.kappa_I * (-wi_max + i * dwi)) * std::sqrt(f.kappa_I);
    }
    cvec r(n);
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
        r(k) = f.r0 * p;
        p *= f.mu;
    }
    double err2 = 0.0;
    for (int i = 0; i < n_grid; ++i) {
        for (int j = 0; j < n_grid; ++j) {
            cplx sum = 0.0;
            for (int k = 0; k < n; ++k) sum += r(k) * hs[i](k) * hi[j](k);
            cplx ref = gaussian_jsa_value(jsa, -ws_max + i * dws, -wi_max + j * dwi);
            err2 += std::norm(sum - ref);
        }
    }
    return std::sqrt(err2 * dws * dwi);
}

double entanglement_entropy(const std::vector<double>& w)
{
    double tot = 0.0;
    for (double x : w) tot += x;
    if (!(tot > 0)) throw InvalidArgument("entanglement_entropy: all weights zero");
    double S = 0.0;
    for (double x : w) {
        double p = x / tot;
        if (p > 0) S -= p * std::log(p);
    }
    return std::max(S, 0.0);
}

double entanglement_entropy(const SchmidtState& s)
{
    std::vector<double> w(s.n_modes());
    for (int i = 0; i < s.n_modes(); ++i) w[i] = std::norm(s.r(i));
    return entanglement_entropy(w);
}

SchmidtState tfm_state(double theta_t, double k1, double k2, double alpha_over_hbar,
                       const TimeGrid& signal_grid, const TimeGrid& idler_grid)
{
    if (theta_t < 0 || theta_t > pi) throw InvalidArgument("tfm_state: theta_t outside [0, pi]");
    SchmidtState s;
    s.r.resize(2);
    s.r(0) = alpha_over_hbar * std::cos(theta_t);
    s.r(1) = alpha_over_hbar * std::sin(theta_t);
    auto sig = time_hermite_modes(2, k1, signal_grid);
    auto idl = time_hermite_modes(2, k2, idler_grid);
    s.signal_modes = {sig[0], sig[1]};
    s.idler_modes = {idl[1], idl[0]};
    s.has_vacuum = true;
    s.norm_const = 1.0 + s.r.squaredNorm();
    return s;
}

SchmidtState product_state(const Envelope& signal)
{
    SchmidtState s;
    s.r = cvec::Ones(1);
    s.signal_modes = {signal};
    s.idler_modes = {signal};
    s.has_vacuum = false;
    s.norm_const = 1.0;
    return s;
}

SchmidtState postselect(const SchmidtState& s)
{
    SchmidtState p = s;
    double lam = s.r.squaredNorm();
    if (!(lam > 0)) throw InvalidArgument("postselect: zero two-photon weight");
    p.r /= std::sqrt(lam);
    p.has_vacuum = false;
    p.norm_const = 1.0;
    return p;
}

} // namespace bispec
