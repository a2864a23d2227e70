#include "bispec/gdm.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint.hpp>

namespace bispec {

namespace odeint = boost::numeric::odeint;

Drive Drive::zero() { return Drive{}; }

Drive Drive::analytic(std::function<cplx(double)> f, std::vector<double> breaks)
{
    Drive d;
    d.f = std::move(f);
    d.breakpoints = std::move(breaks);
    return d;
}

Drive Drive::from_envelope(const Envelope& e)
{
    TimeGrid g = e.grid;
    cvec a = e.amp;
    Drive d;
    d.f = [g, a](double t) -> cplx {
        if (t < g.t_min || t > g.t_max) return 0.0;
        double x = (t - g.t_min) / g.dt;
        int i = std::min(static_cast<int>(x), g.n - 2);
        double f = x - i;
        return (1 - f) * a(i) + f * a(i + 1);
    };
    d.breakpoints = {g.t_min, g.t_max};
    return d;
}

MatterOps matter_ops(const MatterSystem& ms)
{
    ms.validate();
    MatterOps op;
    double s = ms.rate_scale();
    if (ms.kind == MatterKind::TLS) {
        op.H = cmat::Zero(2, 2);
        op.H(1, 1) = ms.delta;
        op.L = cmat::Zero(2, 2);
        op.L(0, 1) = std::sqrt(s * ms.gamma);
        op.Lb = cmat::Zero(2, 2);
        op.Lb(0, 1) = std::sqrt(s * ms.gamma_perp);
        return op;
    }
    double rb = ms.dip_b / ms.dip_a;
    op.H = cmat::Zero(3, 3);
    op.H(1, 1) = ms.omega_a - ms.omega_bar_S;
    op.H(2, 2) = ms.omega_b - ms.omega_bar_S;
    op.H(1, 2) = op.H(2, 1) = ms.J;
    op.L = cmat::Zero(3, 3);
    op.L(0, 1) = std::sqrt(s * ms.gamma);
    op.L(0, 2) = std::sqrt(s * ms.gamma) * rb;
    op.Lb = cmat::Zero(3, 3);
    op.Lb(0, 1) = std::sqrt(s * ms.gamma_perp);
    op.Lb(0, 2) = std::sqrt(s * ms.gamma_perp) * rb;
    return op;
}

GDMState gdm_initial(const GDMInput& in, int d)
{
    GDMState s;
    s.N = in.kind == InputKind::Coherent ? 0 : in.N;
    if (s.N < 0) throw InvalidArgument("gdm: negative photon number");
    s.d = d;
    const int M = s.N + 1;
    s.blocks.assign(M * M, cmat::Zero(d, d));
    // <alpha,n|alpha,m> for |alpha,m> = A^dag^m |alpha> / sqrt(m!); delta_mn without alpha
    cplx b = in.kind == InputKind::PACS ? in.beta : cplx(0.0);
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    auto binom = [&](int n, int k) { return fact(n) / (fact(k) * fact(n - k)); };
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < M; ++n) {
            cplx c = 0.0;
            for (int k = 0; k <= std::min(m, n); ++k)
                c += binom(n, k) * binom(m, k) * fact(k) * std::pow(std::conj(b), m - k) * std::pow(b, n - k);
            c /= std::sqrt(fact(m) * fact(n));
            s.at(m, n)(0, 0) = c;
        }
    return s;
}

namespace {

// D12[L] sigma = L1 sigma L2^H - L1^H L1 sigma / 2 - sigma L2^H L2 / 2
void add_dissipator(const cmat& L1, const cmat& L2, const cmat& sig, cmat& out)
{
    out += L1 * sig * L2.adjoint() - 0.5 * (L1.adjoint() * L1 * sig) - 0.5 * (sig * L2.adjoint() * L2);
}

void general_rhs(const GDMState& s, const MatterOps& k, const MatterOps& b, cplx alpha, cplx xi, bool upper,
                 GDMState& ds)
{
    const int M = s.N + 1;
    ds.N = s.N;
    ds.d = s.d;
    ds.blocks.resize(M * M);
    cmat L1h = k.L.adjoint(), L2h = b.L.adjoint();
    for (int m = 0; m < M; ++m)
        for (int n = 0; n < M; ++n) {
            const cmat& sig = s.at(m, n);
            cmat out = -I * (k.H * sig - sig * b.H);
            add_dissipator(k.L, b.L, sig, out);
            if (upper) add_dissipator(k.Lb, b.Lb, sig, out);
            if (alpha != 0.0) out += alpha * (sig * L2h - L1h * sig) - std::conj(alpha) * (sig * b.L - k.L * sig);
            if (xi != 0.0) {
                if (m > 0) {
                    const cmat& lo = s.at(m - 1, n);
                    out += std::sqrt(double(m)) * xi * (lo * L2h - L1h * lo);
                }
                if (n > 0) {
                    const cmat& lo = s.at(m, n - 1);
                    out += std::sqrt(double(n)) * std::conj(xi) * (k.L * lo - lo * b.L);
                }
            }
            ds.at(m, n) = out;
        }
}

using flat_t = std::vector<cplx>;

void pack(const GDMState& s, flat_t& x)
{
    x.clear();
    for (const auto& b : s.blocks)
        for (int j = 0; j < b.cols(); ++j)
            for (int i = 0; i < b.rows(); ++i) x.push_back(b(i, j));
}

void unpack(const flat_t& x, GDMState& s)
{
    size_t p = 0;
    for (auto& b : s.blocks)
        for (int j = 0; j < b.cols(); ++j)
            for (int i = 0; i < b.rows(); ++i) b(i, j) = x[p++];
}

} // namespace

void fock_rhs(const GDMState& s, const MatterOps& ket, const MatterOps& bra, cplx xi, bool upper, GDMState& ds)
{
    general_rhs(s, ket, bra, 0.0, xi, upper, ds);
}

void coherent_rhs(const GDMState& s, const MatterOps& ket, const MatterOps& bra, cplx alpha, bool upper,
                  GDMState& ds)
{
    general_rhs(s, ket, bra, alpha, 0.0, upper, ds);
}

void pacs_rhs(const GDMState& s, const MatterOps& ket, const MatterOps& bra, cplx alpha, cplx xi, bool upper,
              GDMState& ds)
{
    general_rhs(s, ket, bra, alpha, xi, upper, ds);
}

namespace {

// Integrates to each time in `samples` in turn; observe(t, state) is called at each.
template <class Obs>
GDMState evolve_sampled(const MatterSystem& ket, const MatterSystem& bra, const GDMInput& in,
                        const std::vector<double>& samples, const GDMOptions& opt, Obs observe)
{
    if (opt.upper_bound == false && (ket.gamma_perp > 0 || bra.gamma_perp > 0))
        throw InvalidArgument("gdm: Gamma_perp > 0 requires the upper-bound mode");
    MatterOps k = matter_ops(ket), b = matter_ops(bra);
    const int d = k.H.rows();
    GDMState s = gdm_initial(in, d);
    GDMState tmp = s, dtmp = s;
    const bool use_xi = in.kind != InputKind::Coherent;
    const bool use_alpha = in.kind != InputKind::Fock;

    auto sys = [&](const flat_t& x, flat_t& dx, double t) {
        unpack(x, tmp);
        cplx xi = use_xi ? in.xi(t) : cplx(0.0);
        cplx al = use_alpha ? in.alpha(t) : cplx(0.0);
        general_rhs(tmp, k, b, al, xi, opt.upper_bound, dtmp);
        pack(dtmp, dx);
    };

    const double T = samples.back();
    std::vector<double> stops = {0.0};
    for (const Drive* dr : {&in.xi, &in.alpha})
        for (double t : dr->breakpoints)
            if (t > 0 && t < T) stops.push_back(t);
    for (double t : samples) stops.push_back(t);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    flat_t x;
    pack(s, x);
    auto stepper = odeint::make_controlled(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<flat_t>());
    size_t next = 0;
    while (next < samples.size() && samples[next] <= 0) observe(0.0, s), ++next;
    for (size_t i = 0; i + 1 < stops.size(); ++i) {
        double t0 = stops[i], t1 = stops[i + 1];
        double dt0 = std::min(1e-3 * (t1 - t0), 1e-2 / std::max(ket.gamma, 1e-12));
        odeint::integrate_adaptive(stepper, sys, x, t0, t1, dt0);
        while (next < samples.size() && samples[next] <= t1) {
            unpack(x, s);
            observe(t1, s);
            ++next;
        }
    }
    for (const auto& v : x)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw NumericalError("gdm: integrator diverged");
    unpack(x, s);
    s.t = T;
    return s;
}

} // namespace

GDMState gdm_evolve(const MatterSystem& ket, const MatterSystem& bra, const GDMInput& in, double T,
                    const GDMOptions& opt)
{
    if (!(T > 0)) throw InvalidArgument("gdm: final time must be positive");
    return evolve_sampled(ket, bra, in, {T}, opt, [](double, const GDMState&) {});
}

std::vector<std::pair<double, cplx>> gdm_trajectory(const MatterSystem& ket, const MatterSystem& bra,
                                                    const GDMInput& in, double T, const GDMOptions& opt,
                                                    int n_samples)
{
    if (n_samples < 2 || !(T > 0)) throw InvalidArgument("gdm_trajectory: need T > 0 and two samples");
    std::vector<double> ts(n_samples);
    for (int i = 0; i < n_samples; ++i) ts[i] = T * i / (n_samples - 1);
    std::vector<std::pair<double, cplx>> out;
    evolve_sampled(ket, bra, in, ts, opt,
                   [&](double t, const GDMState& s) { out.emplace_back(t, s.at(s.N, s.N).trace()); });
    return out;
}

cplx gdm_overlap(const MatterSystem& ket, const MatterSystem& bra, const GDMInput& in, double T,
                 const GDMOptions& opt)
{
    GDMState s = gdm_evolve(ket, bra, in, T, opt);
    return s.at(s.N, s.N).trace();
}

LikelihoodSurface integrate(const MatterSystem& ms, Param p, const GDMInput& in, double h, const GDMOptions& opt)
{
    LikelihoodSurface ls;
    ls.h = h;
    ls.theta = ms.get(p);
    double T = opt.T_final > 0 ? opt.T_final : 80.0 / ms.gamma;
#pragma omp parallel for collapse(2) schedule(dynamic, 1)
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            MatterSystem k = ms.with(p, ls.theta + (i - 1) * h);
            MatterSystem b = ms.with(p, ls.theta + (j - 1) * h);
            ls.values[i][j] = gdm_overlap(k, b, in, T, opt);
        }
    return ls;
}

double gdm_qfi(const LikelihoodSurface& s)
{
    auto g = [&](int i, int j) { return std::log(std::abs(s.values[i][j])); };
    double mixed = (g(2, 2) - g(2, 0) - g(0, 2) + g(0, 0)) / (4 * s.h * s.h);
    double q = 4 * mixed;
    if (q < -1e-8) throw NumericalError("gdm_qfi: negative QFI (stencil too coarse or too fine)");
    return std::max(q, 0.0);
}

double default_stencil_step(const MatterSystem& ms, Param p)
{
    double scale = std::max(std::abs(ms.get(p)), ms.gamma);
    return 1e-2 * scale;
}

GDMResult gdm_qfi_richardson(const MatterSystem& ms, Param p, const GDMInput& in, const GDMOptions& opt)
{
    double h = opt.h;
    if (!(h > 0)) {
        // pilot estimate, then a step for which log|F| moves by about 2.5e-4,
        // capped so weak drives still resolve the parameter dependence
        double h0 = default_stencil_step(ms, p);
        double q0 = gdm_qfi(integrate(ms, p, in, h0, opt));
        h = q0 > 0 ? std::min(std::sqrt(2e-3 / q0), 2 * h0) : h0;
    }
    GDMResult r;
    r.h = h;
    r.qfi_coarse = gdm_qfi(integrate(ms, p, in, h, opt));
    if (opt.richardson) {
        r.qfi_half = gdm_qfi(integrate(ms, p, in, 0.5 * h, opt));
        r.qfi = (4 * r.qfi_half - r.qfi_coarse) / 3;
        double rel = std::abs(r.qfi - r.qfi_half) / std::max(std::abs(r.qfi), 1e-300);
        if (rel > 5e-3) throw NumericalError("gdm: stencil steps h and h/2 disagree by more than 0.5%");
    } else {
        r.qfi = r.qfi_half = r.qfi_coarse;
    }
    return r;
}

} // namespace bispec
