#include "bispec/singlephoton.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bispec/convolution.hpp"
#include "bispec/probe.hpp"
#include "bispec/scatter.hpp"

namespace bispec {

OnePhoton one_photon_scatter(const Envelope& xi, const MatterSystem& ms)
{
    SchmidtState src = product_state(xi);
    ScatterOptions opt;
    opt.keep_fields = true;
    ScatteredState s = scatter_schmidt(src, ms, Param::Gamma, opt);
    OnePhoton o;
    o.phi = s.phi[0];
    o.M = s.G(0, 0).real();
    return o;
}

rvec wl_values(double tau, int k_max, double t)
{
    rvec v(k_max + 1);
    double x = t / tau;
    double w = std::exp(-0.5 * x) / std::sqrt(tau);
    v(0) = w;
    if (k_max >= 1) v(1) = (1.0 - x) * w;
    for (int k = 1; k < k_max; ++k) v(k + 1) = ((2 * k + 1 - x) * v(k) - k * v(k - 1)) / (k + 1);
    return v;
}

std::vector<Envelope> wl_basis(double tau, int k_max, const TimeGrid& grid)
{
    std::vector<Envelope> out(k_max + 1);
    for (int k = 0; k <= k_max; ++k) {
        out[k].grid = grid;
        out[k].amp.resize(grid.n);
        out[k].kind = k == 0 ? EnvelopeKind::Exponential : EnvelopeKind::Custom;
        out[k].order = k;
    }
    for (int i = 0; i < grid.n; ++i) {
        rvec v = wl_values(tau, k_max, grid.t(i));
        for (int k = 0; k <= k_max; ++k) out[k].amp(i) = v(k);
    }
    return out;
}

namespace {

// Outgoing norm and its derivative from the modal amplitudes.
void fill_norm(ModalSet& s, double tail_C2)
{
    cplx a0 = 1.0 - s.C(0);
    double M = std::norm(a0);
    cplx x = std::conj(a0) * s.D(0);
    for (int k = 1; k < s.C.size(); ++k) {
        M += std::norm(s.C(k));
        x -= std::conj(s.C(k)) * s.D(k);
    }
    s.M = M + tail_C2;
    // <a|da> = -X
    s.M_theta = -2.0 * (x + s.tail_X).real();
}

void geometric_tail(ModalSet& s, double& tail_C2)
{
    const int K = s.k_max();
    tail_C2 = 0;
    s.tail_D2 = 0;
    s.tail_X = 0;
    if (K < 2) return;
    auto ratio = [](cplx a, cplx b) { return std::abs(b) > 0 ? std::min(std::abs(a / b), 0.999) : 0.0; };
    double rc = ratio(s.C(K), s.C(K - 1)), rd = ratio(s.D(K), s.D(K - 1));
    tail_C2 = std::norm(s.C(K)) * rc * rc / (1 - rc * rc);
    s.tail_D2 = std::norm(s.D(K)) * rd * rd / (1 - rd * rd);
    double r = rc * rd;
    s.tail_X = -std::conj(s.C(K)) * s.D(K) * r / (1 - r);
    s.tail_error = s.tail_D2;
}

} // namespace

ModalSet wl_modal_amplitudes(double tau, const MatterSystem& ms, Param p, int k_max)
{
    if (ms.kind != MatterKind::TLS) throw InvalidArgument("wl_modal_amplitudes: TLS only");
    if (ms.delta != 0.0 || ms.gamma_perp != 0.0)
        throw InvalidArgument("wl_modal_amplitudes: closed forms need Delta = 0 and Gamma_perp = 0");
    if (!(tau > 0)) throw InvalidArgument("wl_modal_amplitudes: tau must be positive");
    if (p == Param::J) throw InvalidArgument("wl_modal_amplitudes: J is not a TLS parameter");
    // closed forms are written with the full-rate Gamma
    const double s = ms.rate_scale();
    const double G = 0.5 * s * ms.gamma, x = G * tau;
    const double ratio = std::abs(1 - 2 * x) / (1 + 2 * x);
    int K = k_max;
    if (K <= 0) {
        K = 32;
        if (ratio > 0) K = std::max(K, static_cast<int>(std::ceil(std::log(1e-18) / (2 * std::log(ratio)))) + 8);
        K = std::min(K, 20000);
    }
    ModalSet m;
    m.C.resize(K + 1);
    m.D.resize(K + 1);
    const double up = 1 + 2 * x, dn = 1 - 2 * x;
    for (int k = 0; k <= K; ++k) {
        double sg = k % 2 ? -1.0 : 1.0;
        double Ik, dOm, dG;
        if (k == 0) {
            Ik = 4 * x / up;
            dOm = -8 * x * tau / (up * up);
            dG = 4 * tau / (up * up);
        } else if (k == 1) {
            Ik = -8 * x / (up * up);
            dOm = 32 * x * tau / (up * up * up);
            dG = -8 * tau * dn / (up * up * up);
        } else {
            Ik = sg * 8 * x * std::pow(dn, k - 1) * std::pow(up, -k - 1);
            dOm = sg * 32 * x * tau * std::pow(dn, k - 2) * std::pow(up, -k - 2) * (2 * x - k);
            dG = sg * 8 * tau * std::pow(dn, k - 2) * std::pow(up, -k - 2) * (1 + 4 * x * x - 4 * x * k);
        }
        m.C(k) = Ik;
        m.D(k) = p == Param::Gamma ? cplx(0.5 * s * dG) : cplx(0.0, dOm);
    }
    double tail_C2 = 0;
    geometric_tail(m, tail_C2);
    fill_norm(m, tail_C2);
    return m;
}

namespace {

void quadrature_pass(double tau, const MatterSystem& ms, Param p, int K, int n, double T, cvec& C, cvec& D,
                     TimeGrid* grid_out)
{
    TimeGrid g = TimeGrid::make(0.0, T, n);
    if (grid_out) *grid_out = g;
    cvec u(n);
    for (int i = 0; i < n; ++i) u(i) = std::exp(-0.5 * g.t(i) / tau) / std::sqrt(tau);
    StateSpace ss = state_space(ms, p);
    ExpStepper st = make_stepper(ss, g.dt);
    Response r = respond_exponential(st, u);
    rvec w = trapezoid_weights(g);
    cvec se = cvec::Zero(K + 1), sd = cvec::Zero(K + 1);
    for (int i = 0; i < n; ++i) {
        rvec l = wl_values(tau, K, g.t(i));
        se += (w(i) * r.eps(i)) * l.cast<cplx>();
        sd += (w(i) * r.deps(i)) * l.cast<cplx>();
    }
    double gc = ms.coupling(), dg = ms.d_coupling(p);
    C = gc * se;
    D = dg * se + gc * sd;
}

} // namespace

ModalSet wl_modal_quadrature(double tau, const MatterSystem& ms, Param p, int k_max, bool keep_basis)
{
    ms.validate();
    if (!(tau > 0)) throw InvalidArgument("wl_modal_quadrature: tau must be positive");
    if (!ms.supports(p)) throw InvalidArgument("wl_modal_quadrature: parameter not supported");
    if (k_max < 1) throw InvalidArgument("wl_modal_quadrature: k_max must be at least 1");
    const double s = ms.rate_scale();
    const double re_kappa = 0.5 * s * (ms.gamma + ms.gamma_perp);
    const double abs_kappa = std::hypot(re_kappa, ms.delta);
    const double T = 60 * tau + 40 / re_kappa;
    const double scale = std::min({tau, 1 / abs_kappa, 4 * tau / (k_max + 1)});
    int half = static_cast<int>(std::ceil(T / (scale / 200.0) / 2));
    cvec C1, D1, C2, D2;
    TimeGrid g;
    quadrature_pass(tau, ms, p, k_max, 2 * half + 1, T, C1, D1, &g);
    quadrature_pass(tau, ms, p, k_max, half + 1, T, C2, D2, nullptr);
    ModalSet m;
    m.C = (4.0 * C1 - C2) / 3.0;
    m.D = (4.0 * D1 - D2) / 3.0;
    if (keep_basis) m.basis = wl_basis(tau, k_max, g);
    double tail_C2 = 0;
    geometric_tail(m, tail_C2);
    fill_norm(m, tail_C2);
    return m;
}

namespace {

// Value and parameter derivative.
struct Dual {
    cplx v = 0, d = 0;
};

Dual operator+(Dual a, Dual b) { return {a.v + b.v, a.d + b.d}; }
Dual operator-(Dual a, Dual b) { return {a.v - b.v, a.d - b.d}; }
Dual operator*(Dual a, Dual b) { return {a.v * b.v, a.d * b.v + a.v * b.d}; }
Dual operator/(Dual a, Dual b) { return {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)}; }
Dual operator*(cplx c, Dual a) { return {c * a.v, c * a.d}; }
Dual dexp(Dual a)
{
    cplx e = std::exp(a.v);
    return {e, e * a.d};
}

} // namespace

ModalSet square_modal_amplitudes(double tau, const MatterSystem& ms, Param p, int j_max)
{
    ms.validate();
    if (ms.kind != MatterKind::TLS) throw InvalidArgument("square_modal_amplitudes: TLS only");
    if (!(tau > 0)) throw InvalidArgument("square_modal_amplitudes: tau must be positive");
    if (p == Param::J) throw InvalidArgument("square_modal_amplitudes: J is not a TLS parameter");
    if (j_max < 8) throw InvalidArgument("square_modal_amplitudes: j_max too small");
    const double s = ms.rate_scale();
    Dual kap{0.5 * s * (ms.gamma + ms.gamma_perp) + I * ms.delta, p == Param::Gamma ? cplx(0.5 * s) : I};
    Dual g{ms.coupling(), ms.d_coupling(p)};
    const double L1 = tau, L2 = 40.0 / std::min(ms.gamma, kap.v.real());
    const double rt = std::sqrt(tau);
    Dual one{1.0, 0.0};
    Dual A = (1.0 / rt) * (one - g / kap);
    Dual B = (1.0 / rt) * (g / kap);
    Dual e1 = dexp(Dual{-kap.v * L1, -kap.d * L1});
    Dual Cc = (-1.0 / rt) * (g / kap * (one - e1));
    Dual e2 = dexp(Dual{-kap.v * L2, -kap.d * L2});

    // <b|exp(-kappa u)> on [0, L) for the constant, cosine and sine of harmonic j
    auto proj = [&](double L, Dual eL, int j, Dual& c, Dual& sn) {
        double om = 2 * pi * j / L;
        Dual num = one - eL;
        Dual jm = num / Dual{kap.v - I * om, kap.d};
        Dual jp = num / Dual{kap.v + I * om, kap.d};
        double nrm = std::sqrt(2.0 / L);
        c = (0.5 * nrm) * (jm + jp);
        sn = (nrm / (2.0 * I)) * (jm - jp);
    };

    // outgoing coefficients a_k; constants first, then harmonics interleaved
    std::vector<Dual> a;
    a.reserve(4 * j_max + 2);
    a.push_back(std::sqrt(L1) * A + (1.0 / std::sqrt(L1)) * (B * ((one - e1) / kap)));
    a.push_back((1.0 / std::sqrt(L2)) * (Cc * ((one - e2) / kap)));
    double last_D2 = 0;
    cplx last_Xc = 0;
    for (int j = 1; j <= j_max; ++j) {
        Dual c1, s1, c2, s2;
        proj(L1, e1, j, c1, s1);
        proj(L2, e2, j, c2, s2);
        Dual t[4] = {B * c1, B * s1, Cc * c2, Cc * s2};
        if (j == j_max) {
            last_D2 = 0;
            last_Xc = 0;
            for (auto& x : t) {
                last_D2 += std::norm(x.d);
                last_Xc += std::conj(x.v) * x.d;
            }
        }
        for (auto& x : t) a.push_back(x);
    }
    ModalSet m;
    m.C.resize(a.size());
    m.D.resize(a.size());
    for (size_t k = 0; k < a.size(); ++k) {
        m.C(k) = (k == 0 ? 1.0 : 0.0) - a[k].v;
        m.D(k) = -a[k].d;
    }
    // terms fall off as 1/j^2; sum_{j > K} 1/j^2 ~ 1/(K + 1/2)
    const double K = j_max, f = K * K / (K + 0.5);
    m.tail_D2 = last_D2 * f;
    m.tail_error = m.tail_D2 / K;
    // X = -<a|da>, and the tail of <a|da> is sum conj(a) da
    m.tail_X = -last_Xc * f;
    cplx a0 = 1.0 - m.C(0);
    double M = std::norm(a0);
    for (int k = 1; k < m.C.size(); ++k) M += std::norm(m.C(k));
    // |a|^2 tail, same decay
    double last_C2 = 0;
    for (size_t k = a.size() - 4; k < a.size(); ++k) last_C2 += std::norm(a[k].v);
    m.M = M + last_C2 * f;
    cplx x = std::conj(a0) * m.D(0);
    for (int k = 1; k < m.C.size(); ++k) x -= std::conj(m.C(k)) * m.D(k);
    m.M_theta = -2.0 * (x + m.tail_X).real();
    return m;
}

double modal_qfi(const ModalSet& set, double tail_tol)
{
    if (set.C.size() == 0 || set.C.size() != set.D.size()) throw InvalidArgument("modal_qfi: empty or ragged set");
    cplx a0 = 1.0 - set.C(0);
    double d2 = set.D.squaredNorm() + set.tail_D2;
    cplx x = std::conj(a0) * set.D(0);
    for (int k = 1; k < set.C.size(); ++k) x -= std::conj(set.C(k)) * set.D(k);
    x += set.tail_X;
    if (d2 > 0 && set.tail_error > tail_tol * d2)
        throw NumericalError("modal_qfi: truncation tail above tolerance, raise k_max");
    if (!(set.M > 0)) return 0.0;
    double q = 4 * d2 - 4 * x.imag() * x.imag() / set.M;
    double lost = 1 - set.M;
    if (lost > 1e-12) q += set.M_theta * set.M_theta / lost;
    return std::max(q, 0.0);
}

double exponential_qfi_closed(double tau, double gamma)
{
    double u = 1 + 2 * gamma * tau;
    return 16 * tau / (gamma * u * u);
}

double square_qfi_gamma_closed(double tau, double gamma)
{
    double x = gamma * tau;
    return 8 * std::exp(-x) / (gamma * gamma * gamma * tau) * (std::expm1(x) - x);
}

double square_qfi_omega_exact(double tau, double gamma)
{
    double x = gamma * tau;
    double g4 = gamma * gamma * gamma * gamma;
    return 8 / (g4 * tau * tau) * (-2 * std::exp(-2 * x) + std::exp(-x) * (x * x - x + 4) + (x - 2));
}

double square_qfi_omega_quoted(double tau, double gamma)
{
    double x = gamma * tau;
    double g4 = gamma * gamma * gamma * gamma;
    return 8 / (g4 * tau * tau) * (2 * std::exp(-2 * x) + std::exp(-x) * (x * x + 7 * x - 4) + (2 + 4 * x * x - 7 * x));
}

std::vector<TauSweepRow> qfi_tau_sweep(PulseFamily fam, const MatterSystem& ms, const std::vector<double>& taus)
{
    std::vector<TauSweepRow> rows(taus.size());
    const double s = ms.rate_scale();
    const double G = 0.5 * s * ms.gamma, c = 0.25 * s * s;
#pragma omp parallel for schedule(dynamic, 1)
    for (size_t i = 0; i < taus.size(); ++i) {
        TauSweepRow& r = rows[i];
        r.tau = taus[i];
        if (fam == PulseFamily::Exponential) {
            r.q_gamma = modal_qfi(wl_modal_amplitudes(r.tau, ms, Param::Gamma));
            r.q_omega = modal_qfi(wl_modal_amplitudes(r.tau, ms, Param::Omega0));
            r.closed_gamma = c * exponential_qfi_closed(r.tau, G);
            r.closed_omega = exponential_qfi_closed(r.tau, G);
        } else {
            r.q_gamma = modal_qfi(square_modal_amplitudes(r.tau, ms, Param::Gamma));
            r.q_omega = modal_qfi(square_modal_amplitudes(r.tau, ms, Param::Omega0));
            r.closed_gamma = c * square_qfi_gamma_closed(r.tau, G);
            r.closed_omega = square_qfi_omega_exact(r.tau, G);
        }
    }
    return rows;
}

void write_tau_sweep_csv(std::ostream& os, const std::vector<TauSweepRow>& rows)
{
    os << "tau,Q_gamma,Q_omega0,closed_gamma,closed_omega0\n";
    os.precision(12);
    for (const auto& r : rows)
        os << r.tau << ',' << r.q_gamma << ',' << r.q_omega << ',' << r.closed_gamma << ',' << r.closed_omega << '\n';
}

} // namespace bispec
