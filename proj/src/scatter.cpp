#include "bispec/scatter.hpp"

#include <cmath>

namespace bispec {

rvec ScatteredState::p() const { return r.cwiseAbs2() / norm_const; }

namespace {

Response respond(const StateSpace& ss, const TimeGrid& g, const cvec& u, ConvolutionMethod m,
                 const ExpStepper* st)
{
    switch (m) {
    case ConvolutionMethod::Exponential: return respond_exponential(*st, u);
    case ConvolutionMethod::Direct: return respond_direct(ss, g, u, false);
    case ConvolutionMethod::DirectParallel: return respond_direct(ss, g, u, true);
    }
    throw InvalidArgument("unknown convolution method");
}

} // namespace

Envelope distort(const Envelope& xi, const MatterSystem& ms, ConvolutionMethod method)
{
    StateSpace ss = state_space(ms, Param::Gamma);
    ExpStepper st;
    if (method == ConvolutionMethod::Exponential) st = make_stepper(ss, xi.grid.dt);
    Response r = respond(ss, xi.grid, xi.amp, method, &st);
    Envelope e;
    e.grid = xi.grid;
    e.kind = EnvelopeKind::Custom;
    e.amp = r.eps;
    return e;
}

void finish_scattered(ScatteredState& s)
{
    rvec p = s.p();
    double sum_k = 0, sum_dk = 0;
    for (int n = 0; n < s.n_modes(); ++n) {
        sum_k += p(n) * s.eps_gram(n, n).real();
        sum_dk += p(n) * 2.0 * s.deps_gram(n, n).real();
    }
    s.N = s.loss * sum_k;
    s.N_theta = s.dloss * sum_k + s.loss * sum_dk;
}

ScatteredState scatter_schmidt(const SchmidtState& src, const MatterSystem& ms, Param theta,
                               const ScatterOptions& opt)
{
    const int nm = src.n_modes();
    if (nm == 0) throw InvalidArgument("scatter_schmidt: empty mode set");
    ms.validate();
    const TimeGrid& g = src.signal_modes[0].grid;
    for (const auto& m : src.signal_modes) require_same_grid(m.grid, g, "scatter_schmidt");

    StateSpace ss = state_space(ms, theta);
    ExpStepper st;
    if (opt.method == ConvolutionMethod::Exponential) st = make_stepper(ss, g.dt);

    // columns: xi_n, eps_n, d eps_n
    cmat F(g.n, 3 * nm);
    cmat Yend(st.A.rows() ? st.A.rows() : 2 * ss.M.rows(), nm);
#pragma omp parallel for schedule(dynamic, 1) if (opt.method != ConvolutionMethod::DirectParallel)
    for (int n = 0; n < nm; ++n) {
        const cvec& u = src.signal_modes[n].amp;
        Response r = respond(ss, g, u, opt.method, &st);
        F.col(n) = u;
        F.col(nm + n) = r.eps;
        F.col(2 * nm + n) = r.deps;
        Yend.col(n) = r.y_end;
    }

    rvec w = trapezoid_weights(g);
    cmat H = F.adjoint() * w.asDiagonal() * F;

    if (opt.analytic_tail) {
        const int d = ss.M.rows();
        cmat A = cmat::Zero(2 * d, 2 * d);
        A.topLeftCorner(d, d) = ss.M;
        A.bottomLeftCorner(d, d) = ss.dM;
        A.bottomRightCorner(d, d) = ss.M;
        cvec a_eps = cvec::Zero(2 * d), a_deps = cvec::Zero(2 * d);
        a_eps.head(d) = ss.w;
        a_deps.tail(d) = ss.w;
        cmat W11 = tail_gram(A, a_eps, a_eps);
        cmat W12 = tail_gram(A, a_eps, a_deps);
        cmat W22 = tail_gram(A, a_deps, a_deps);
        cmat Yh = Yend.adjoint();
        cmat T11 = Yh * W11 * Yend, T12 = Yh * W12 * Yend, T22 = Yh * W22 * Yend;
        H.block(nm, nm, nm, nm) += T11;
        H.block(nm, 2 * nm, nm, nm) += T12;
        H.block(2 * nm, nm, nm, nm) += T12.adjoint();
        H.block(2 * nm, 2 * nm, nm, nm) += T22;
    }

    auto blk = [&](int i, int j) { return H.block(i * nm, j * nm, nm, nm); };
    const double gc = ms.coupling(), dg = ms.d_coupling(theta);
    cmat Hxx = blk(0, 0), Hxe = blk(0, 1), Hxd = blk(0, 2);
    cmat Hee = blk(1, 1), Hed = blk(1, 2), Hdd = blk(2, 2);

    ScatteredState s;
    s.src = std::make_shared<const SchmidtState>(src);
    s.ms = ms;
    s.theta = theta;
    s.r = src.r;
    s.norm_const = src.norm_const;
    s.has_vacuum = src.has_vacuum;
    s.eps_gram = Hee;
    s.deps_gram = Hed;
    // phi = xi - g eps, d phi = -dg eps - g d eps
    s.G = Hxx - gc * Hxe - gc * Hxe.adjoint() + gc * gc * Hee;
    cmat Pe = Hxe - gc * Hee; // <phi_m|eps_n>
    cmat Pd = Hxd - gc * Hed; // <phi_m|d eps_n>
    s.D = -dg * Pe - gc * Pd;
    s.E = dg * dg * Hee + dg * gc * (Hed + Hed.adjoint()) + gc * gc * Hdd;
    s.loss = ms.loss_product();
    s.dloss = ms.d_loss_product(theta);
    finish_scattered(s);

    if (opt.keep_fields) {
        s.phi.resize(nm);
        s.dphi.resize(nm);
        for (int n = 0; n < nm; ++n) {
            s.phi[n].grid = g;
            s.phi[n].amp = F.col(n) - gc * F.col(nm + n);
            s.dphi[n].grid = g;
            s.dphi[n].amp = -dg * F.col(nm + n) - gc * F.col(2 * nm + n);
        }
    }
    return s;
}

IdlerSigma idler_sigma(const ScatteredState& s)
{
    if (!(s.N > 0)) throw NumericalError("idler_sigma: no loss channel (N = 0)");
    const int n = s.n_modes();
    const cvec& r = s.r;
    IdlerSigma out;
    out.sigma.resize(n, n);
    out.dsigma.resize(n, n);
    cmat dK = s.deps_gram + s.deps_gram.adjoint();
    double c = s.loss / (s.norm_const * s.N);
    double dc = (s.dloss * s.N - s.loss * s.N_theta) / (s.norm_const * s.N * s.N);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cplx rr = r(i) * std::conj(r(j));
            out.sigma(i, j) = c * rr * s.eps_gram(j, i);
            out.dsigma(i, j) = rr * (dc * s.eps_gram(j, i) + c * dK(j, i));
        }
    return out;
}

} // namespace bispec
