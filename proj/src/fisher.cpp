#include "bispec/fisher.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace bispec {

double qfi_pure(double dd, cplx sd)
{
    double q = 4.0 * (dd - std::norm(sd));
    if (q < -1e-12 * std::max(1.0, std::abs(dd))) throw NumericalError("qfi_pure: inconsistent overlaps (negative QFI)");
    return std::max(q, 0.0);
}

namespace {

void require_hermitian(const cmat& m, const char* what)
{
    if (m.rows() != m.cols()) throw InvalidArgument(std::string(what) + ": not square");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InvalidArgument(std::string(what) + ": not Hermitian");
}

void require_unitary(const cmat& V, int n, const char* what)
{
    if (V.rows() != n || V.cols() != n) throw InvalidArgument(std::string(what) + ": wrong size");
    if ((V.adjoint() * V - cmat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8)
        throw InvalidArgument(std::string(what) + ": not unitary");
}

// Per-outcome contribution for an unnormalised conditional branch with
// b = <u|u>, a = <u|du>, e = <du|du>, all measured against the detected
// branch of norm s with ds = d s / d theta.
struct Branch {
    double b;
    cplx a;
    double e;
};

BranchCfi sum_branches(const std::vector<Branch>& br, double s, double ds)
{
    BranchCfi out;
    double bmax = 0;
    for (const auto& x : br) bmax = std::max(bmax, x.b);
    for (const auto& x : br) {
        double bh = x.b / s;
        cplx ah = x.a / s - ds * x.b / (2 * s * s);
        double eh = x.e / s - ds * x.a.real() / (s * s) + ds * ds * x.b / (4 * s * s * s);
        if (x.b > 1e-14 * bmax) {
            out.cfi += 4 * eh - 4 * ah.imag() * ah.imag() / bh;
            double dp = 2 * ah.real();
            out.mixing_cfi += dp * dp / bh;
        } else {
            // vanishing outcome: its whole contribution is classical
            out.cfi += 4 * eh;
            out.mixing_cfi += 4 * eh;
        }
    }
    return out;
}

} // namespace

cmat sld(const cmat& rho, const cmat& drho, double rel_tol)
{
    require_hermitian(rho, "sld: rho");
    require_hermitian(drho, "sld: drho");
    Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (rho + rho.adjoint()));
    const rvec& p = es.eigenvalues();
    const cmat& U = es.eigenvectors();
    cmat d = U.adjoint() * drho * U;
    double tol = rel_tol * std::max(p.cwiseAbs().maxCoeff(), 1e-300);
    const int n = rho.rows();
    cmat L = cmat::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p(i) + p(j) > tol) L(i, j) = 2.0 * d(i, j) / (p(i) + p(j));
    return U * L * U.adjoint();
}

double qfi_sld(const cmat& rho, const cmat& drho, double rel_tol)
{
    cmat L = sld(rho, drho, rel_tol);
    return std::real((rho * L * L).trace());
}

double qfi_mixed_spectral(const cmat& rho, const cmat& drho, double rel_tol)
{
    require_hermitian(rho, "qfi_mixed_spectral: rho");
    require_hermitian(drho, "qfi_mixed_spectral: drho");
    const int n = rho.rows();
    Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (rho + rho.adjoint()));
    rvec p = es.eigenvalues();
    cmat U = es.eigenvectors();
    double pmax = std::max(p.cwiseAbs().maxCoeff(), 1e-300);
    double tol = rel_tol * pmax;

    // inside degenerate clusters pick the eigenbasis that diagonalises drho
    for (int i = 0; i < n;) {
        int j = i + 1;
        while (j < n && std::abs(p(j) - p(i)) <= tol) ++j;
        if (j - i > 1) {
            cmat blk = U.middleCols(i, j - i).adjoint() * drho * U.middleCols(i, j - i);
            Eigen::SelfAdjointEigenSolver<cmat> eb(0.5 * (blk + blk.adjoint()));
            U.middleCols(i, j - i) = (U.middleCols(i, j - i) * eb.eigenvectors()).eval();
        }
        i = j;
    }
    cmat d = U.adjoint() * drho * U;

    double classical = 0, motion = 0, cross = 0;
    for (int k = 0; k < n; ++k)
        if (p(k) > tol) classical += d(k, k).real() * d(k, k).real() / p(k);
    for (int m = 0; m < n; ++m) {
        for (int k = 0; k < n; ++k) {
            if (m == k || std::abs(p(k) - p(m)) <= tol) continue;
            // <psi_m|d psi_k> = drho_mk / (p_k - p_m)
            double ov = std::norm(d(m, k) / (p(k) - p(m)));
            if (p(k) > tol) motion += 4 * p(k) * ov;
            if (p(k) + p(m) > tol) cross += 8 * p(m) * p(k) / (p(m) + p(k)) * ov;
        }
    }
    return classical + motion - cross;
}

double biphoton_qfi(const ScatteredState& s)
{
    rvec p = s.p();
    cplx T = 0;
    double Es = 0;
    for (int n = 0; n < s.n_modes(); ++n) {
        Es += p(n) * s.E(n, n).real();
        T += p(n) * s.D(n, n);
    }
    double sn = s.s();
    double q = 4 * Es / sn - 4 * std::norm(T) / (sn * sn);
    return std::max(q, 0.0);
}

double idler_qfi(const ScatteredState& s)
{
    if (!(s.N > 0)) return 0.0;
    IdlerSigma is = idler_sigma(s);
    cmat rho = 0.5 * (is.sigma + is.sigma.adjoint());
    cmat drho = 0.5 * (is.dsigma + is.dsigma.adjoint());
    return qfi_sld(rho, drho);
}

XOperator x_operator(const ScatteredState& s)
{
    const int n = s.n_modes();
    XOperator x;
    x.x.resize(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            x.x(m, k) = s.r(m) * std::conj(s.r(k)) * s.D(k, m) / s.norm_const;
    x.trace_x = x.x.trace();
    return x;
}

cplx branch_overlap(const ScatteredState& s)
{
    return x_operator(s).trace_x / s.s() - s.ds() / (2 * s.s());
}

BranchCfi locc_detail(const ScatteredState& s, const cmat& V)
{
    const int n = s.n_modes();
    require_unitary(V, n, "locc_cfi: V");
    cvec rt = s.r / std::sqrt(s.norm_const);
    std::vector<Branch> br;
    br.reserve(n + 1);
    for (int x = 0; x < n; ++x) {
        cvec c = rt.cwiseProduct(V.col(x).conjugate());
        br.push_back({(c.adjoint() * s.G * c).value().real(), (c.adjoint() * s.D * c).value(),
                      (c.adjoint() * s.E * c).value().real()});
    }
    if (s.has_vacuum) br.push_back({s.p_vac(), 0.0, 0.0});
    return sum_branches(br, s.s(), s.ds());
}

double locc_cfi(const ScatteredState& s, const cmat& V) { return locc_detail(s, V).cfi; }

BranchCfi s2i_detail(const ScatteredState& s, const cmat& W)
{
    const int n = s.n_modes();
    require_unitary(W, n, "s2i_cfi: W");
    Eigen::SelfAdjointEigenSolver<cmat> es(0.5 * (s.G + s.G.adjoint()));
    if (es.eigenvalues().minCoeff() <= 0) throw NumericalError("s2i_cfi: signal modes linearly dependent");
    cmat Gh = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
    cmat Gmh = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
    // <e_x|phi_n> and <e_x|d phi_n> for the rotated orthonormal outcomes
    cmat Cphi = W.adjoint() * Gh;
    cmat Cd = W.adjoint() * Gmh * s.D;
    cvec rt = s.r / std::sqrt(s.norm_const);
    rvec p = s.p();

    std::vector<Branch> br;
    br.reserve(n + 2);
    for (int x = 0; x < n; ++x) {
        cvec c = Cphi.row(x).transpose().cwiseProduct(rt);
        cvec d = Cd.row(x).transpose().cwiseProduct(rt);
        br.push_back({c.squaredNorm(), c.dot(d), d.squaredNorm()});
    }
    // outcome outside the span of the signal modes
    cmat inside = s.D.adjoint() * es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                  es.eigenvectors().adjoint() * s.D;
    double eperp = 0;
    for (int k = 0; k < n; ++k) eperp += p(k) * (s.E(k, k) - inside(k, k)).real();
    br.push_back({0.0, 0.0, std::max(eperp, 0.0)});
    if (s.has_vacuum) br.push_back({s.p_vac(), 0.0, 0.0});
    return sum_branches(br, s.s(), s.ds());
}

double s2i_cfi(const ScatteredState& s, const cmat& W) { return s2i_detail(s, W).cfi; }

double reduced_signal_qfi(const ScatteredState& s)
{
    const int n = s.n_modes();
    cmat gram(2 * n, 2 * n);
    gram << s.G, s.D, s.D.adjoint(), s.E;
    gram = 0.5 * (gram + gram.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<cmat> es(gram);
    const rvec& lam = es.eigenvalues();
    double lmax = lam.maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < 2 * n; ++i)
        if (lam(i) > 1e-12 * lmax) keep.push_back(i);
    const int k = keep.size();
    cmat C(k, 2 * n); // coordinates of phi_n, d phi_n in an orthonormal basis
    for (int i = 0; i < k; ++i)
        C.row(i) = std::sqrt(lam(keep[i])) * es.eigenvectors().col(keep[i]).adjoint();

    rvec p = s.p();
    cmat rho1 = cmat::Zero(k, k), drho1 = cmat::Zero(k, k);
    for (int m = 0; m < n; ++m) {
        cvec f = C.col(m), df = C.col(n + m);
        rho1 += p(m) * f * f.adjoint();
        drho1 += p(m) * (df * f.adjoint() + f * df.adjoint());
    }
    const double sn = s.s(), ds = s.ds();
    const int off = s.has_vacuum ? 1 : 0;
    cmat rho = cmat::Zero(k + off, k + off), drho = cmat::Zero(k + off, k + off);
    if (s.has_vacuum) {
        rho(0, 0) = s.p_vac() / sn;
        drho(0, 0) = -ds * s.p_vac() / (sn * sn);
    }
    rho.bottomRightCorner(k, k) = rho1 / sn;
    drho.bottomRightCorner(k, k) = drho1 / sn - ds * rho1 / (sn * sn);
    return qfi_mixed_spectral(rho, drho);
}

double reduced_signal_qfi_pairwise(const ScatteredState& s)
{
    const int n = s.n_modes();
    double c = locc_cfi(s, cmat::Identity(n, n));
    rvec p = s.p();
    double sn = s.s();
    double corr = 0;
    for (int m = 0; m < n; ++m)
        for (int k = m + 1; k < n; ++k)
            if (p(m) + p(k) > 0) corr += 16 * p(m) * p(k) / (p(m) + p(k)) * std::norm(s.D(m, k));
    return c - corr / (sn * sn);
}

cmat optimal_target(const ScatteredState& s)
{
    const int n = s.n_modes();
    cvec rt = s.r / std::sqrt(s.norm_const);
    rvec p = s.p();
    cplx T = 0;
    double pg = 0;
    for (int k = 0; k < n; ++k) {
        T += p(k) * s.D(k, k);
        pg += p(k) * s.G(k, k).real();
    }
    cplx mu = T / pg;
    cmat A(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = 0; k < n; ++k)
            A(m, k) = rt(m) * std::conj(rt(k)) * (std::conj(s.D(m, k)) - std::conj(mu) * s.G(k, m));
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if (std::abs(A.trace()) > 1e-8 * scale) throw NumericalError("optimal_target: target not traceless");
    return A;
}

cmat optimal_unitary(const ScatteredState& s) { return zero_diagonal_unitary(optimal_target(s)); }

FisherReport total_qfi(const ScatteredState& s)
{
    FisherReport r;
    r.theta = s.theta;
    r.N = s.N;
    r.N_theta = s.N_theta;
    r.n_modes = s.n_modes();
    r.q_biph = biphoton_qfi(s);
    if (s.N > 0) {
        r.c_classical = s.N_theta * s.N_theta / (s.N * (1 - s.N));
        r.q_idler = idler_qfi(s);
    }
    r.q_total = r.c_classical + s.N * r.q_idler + (1 - s.N) * r.q_biph;
    return r;
}

void ratios(FisherReport& r)
{
    if (!(r.q_biph > 0) || !(r.q_reduced > 0)) throw NumericalError("ratios: zero denominator");
    r.kappa = r.c_locc_identity / r.q_biph;
    r.varsigma = r.c_locc_identity / r.q_reduced;
}

FisherReport fisher_report(const ScatteredState& s, bool with_v0)
{
    FisherReport r = total_qfi(s);
    const int n = s.n_modes();
    cmat Id = cmat::Identity(n, n);
    r.c_locc_identity = locc_cfi(s, Id);
    r.c_s2i = s2i_cfi(s, Id);
    r.q_reduced = reduced_signal_qfi(s);
    if (with_v0) r.c_locc_v0 = locc_cfi(s, optimal_unitary(s));
    if (r.q_biph > 0 && r.q_reduced > 0) ratios(r);
    return r;
}

PostselectCheck postselect_relation(const ScatteredState& a, const ScatteredState& b)
{
    PostselectCheck c;
    c.lambda = a.r.squaredNorm();
    if (c.lambda > 0.1) throw InvalidArgument("postselect_relation: Lambda not small");
    c.q_pdc = biphoton_qfi(a);
    c.q_ps = biphoton_qfi(b);
    cplx t = 0;
    for (int n = 0; n < a.n_modes(); ++n) t += std::norm(a.r(n)) * a.D(n, n);
    c.predicted = c.q_pdc / c.lambda - 4.0 / (c.lambda * c.lambda) * std::norm(t);
    c.residual = std::abs(c.q_ps - c.predicted) / std::abs(c.q_ps);
    return c;
}

} // namespace bispec
