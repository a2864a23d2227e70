#include <doctest.h>

#include <cmath>

#include "bispec/fisher.hpp"
#include "bispec/units.hpp"
#include "oracles.hpp"

using namespace bispec;

namespace {

// rho(theta) = exp(-i H theta) rho0 exp(i H theta): QFI = 2 sum (p_i - p_j)^2/(p_i + p_j) |H_ij|^2.
double unitary_family_qfi(const rvec& p, const cmat& H)
{
    double q = 0;
    for (int i = 0; i < p.size(); ++i)
        for (int j = 0; j < p.size(); ++j)
            if (p(i) + p(j) > 0) q += 2 * std::pow(p(i) - p(j), 2) / (p(i) + p(j)) * std::norm(H(i, j));
    return q;
}

ScatteredState pdc_scattered(double sigma_cm, double T, const MatterSystem& m, Param th, double alpha = 0.01)
{
    GaussianJSA j = pdc_gaussian_jsa(units::wavenumber_to_rad_per_ps(sigma_cm), T, alpha);
    SchmidtFactors f = schmidt_factors(j);
    int n = schmidt_truncation(f.mu);
    SchmidtState s = pdc_schmidt(j, n, hermite_grid(f.kappa_S, n - 1, 0.05)).state;
    return scatter_schmidt(s, m, th);
}

} // namespace

TEST_CASE("pure-state QFI")
{
    CHECK(std::abs(qfi_pure(1.0, 0.0) - 4.0) < 1e-15);
    // |psi> = (|0> + e^{i theta}|1>)/sqrt 2: <d psi|d psi> = 1/2, <psi|d psi> = i/2
    CHECK(std::abs(qfi_pure(0.5, cplx(0, 0.5)) - 1.0) < 1e-15);
    CHECK_THROWS_AS(qfi_pure(0.1, 1.0), NumericalError);
}

TEST_CASE("SLD solves the Lyapunov equation")
{
    std::mt19937 rng(11);
    for (int n : {2, 4, 6}) {
        cmat rho = oracle::random_density(rng, n);
        cmat drho = oracle::random_hermitian(rng, n);
        drho -= drho.trace().real() / n * cmat::Identity(n, n);
        cmat L = sld(rho, drho);
        CHECK((L * rho + rho * L - 2 * drho).norm() < 1e-10 * drho.norm());
        CHECK((L - L.adjoint()).norm() < 1e-10 * L.norm());
    }
    CHECK_THROWS_AS(sld(cmat::Identity(2, 3), cmat::Identity(2, 3)), InvalidArgument);
}

TEST_CASE("mixed-state QFI: pure limit and unitary families")
{
    std::mt19937 rng(5);
    cvec psi = oracle::random_complex(rng, 4, 1);
    psi.normalize();
    cmat H = oracle::random_hermitian(rng, 4);
    cvec dpsi = -I * H * psi;
    cmat rho = psi * psi.adjoint();
    cmat drho = dpsi * psi.adjoint() + psi * dpsi.adjoint();
    double ref = qfi_pure(dpsi.squaredNorm(), psi.dot(dpsi));
    CHECK(std::abs(qfi_sld(rho, drho) - ref) < 1e-10 * ref);
    CHECK(std::abs(qfi_mixed_spectral(rho, drho) - ref) < 1e-10 * ref);

    for (int rank : {2, 5}) {
        cmat U = oracle::haar_unitary(rng, 5);
        rvec p = rvec::Zero(5);
        for (int i = 0; i < rank; ++i) p(i) = 1.0 + i;
        p /= p.sum();
        cmat Hd = oracle::random_hermitian(rng, 5);
        cmat r0 = U * p.cast<cplx>().asDiagonal() * U.adjoint();
        cmat Hs = U * Hd * U.adjoint();
        cmat dr = -I * (Hs * r0 - r0 * Hs);
        double q = unitary_family_qfi(p, Hd);
        CHECK(std::abs(qfi_sld(r0, dr) - q) < 1e-9 * q);
        CHECK(std::abs(qfi_mixed_spectral(r0, dr) - q) < 1e-9 * q);
    }
}

TEST_CASE("spectral formula handles degenerate spectra")
{
    rvec p(4);
    p << 0.25, 0.25, 0.25, 0.25;
    std::mt19937 rng(2);
    cmat dr = oracle::random_hermitian(rng, 4);
    dr -= dr.trace().real() / 4 * cmat::Identity(4, 4);
    cmat rho = p.cast<cplx>().asDiagonal();
    double ref = 4 * std::real((dr * dr).trace());
    CHECK(std::abs(qfi_mixed_spectral(rho, dr) - ref) < 1e-10 * ref);
    CHECK(std::abs(qfi_sld(rho, dr) - ref) < 1e-10 * ref);
}

TEST_CASE("reduced-signal QFI: explicit basis against the pairwise formula")
{
    std::mt19937 rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        ScatteredState s = oracle::random_scattered(rng, 2 + trial % 5);
        double a = reduced_signal_qfi(s), b = reduced_signal_qfi_pairwise(s);
        CHECK(std::abs(a - b) < 1e-8 * std::max(1.0, a));
    }
}

TEST_CASE("measurement hierarchy on synthetic states")
{
    std::mt19937 rng(23);
    for (int trial = 0; trial < 8; ++trial) {
        ScatteredState s = oracle::random_scattered(rng, 2 + trial % 4);
        const int n = s.n_modes();
        double qb = biphoton_qfi(s), qr = reduced_signal_qfi(s);
        for (int k = 0; k < 5; ++k) {
            cmat V = oracle::haar_unitary(rng, n);
            double c = locc_cfi(s, V);
            BranchCfi w = s2i_detail(s, V);
            CHECK(c <= qb + 1e-9 * qb);
            CHECK(c > qr - 1e-9 * qb);
            CHECK(w.cfi <= qb + 1e-9 * qb);
            // a fixed signal basis only guarantees the information of its own outcome statistics
            CHECK(w.cfi >= w.mixing_cfi - 1e-9 * qb);
        }
    }
}

TEST_CASE("a fixed signal basis can fall below the reduced signal QFI")
{
    std::mt19937 rng(23);
    ScatteredState s = oracle::random_scattered(rng, 2);
    double qr = reduced_signal_qfi(s);
    double lo = s2i_cfi(s, cmat::Identity(2, 2));
    for (int k = 0; k < 20; ++k) lo = std::min(lo, s2i_cfi(s, oracle::haar_unitary(rng, 2)));
    CHECK(lo < qr);
}

TEST_CASE("zero-diagonal construction saturates the biphoton QFI")
{
    std::mt19937 rng(29);
    for (int trial = 0; trial < 10; ++trial) {
        ScatteredState s = oracle::random_scattered(rng, 2 + trial % 7);
        cmat A = optimal_target(s);
        cmat V = zero_diagonal_unitary(A);
        const int n = s.n_modes();
        CHECK((V.adjoint() * V - cmat::Identity(n, n)).norm() < 1e-12);
        cmat B = V.adjoint() * A * V;
        CHECK(B.diagonal().cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, A.norm()));
        BranchCfi d = locc_detail(s, V);
        double qb = biphoton_qfi(s);
        CHECK(std::abs(d.cfi - qb) < 1e-6 * qb);
        CHECK(d.mixing_cfi < 1e-8);
    }
    CHECK_THROWS_AS(zero_diagonal_unitary(cmat::Identity(3, 3)), InvalidArgument);
}

TEST_CASE("X operator trace and branch overlap")
{
    std::mt19937 rng(31);
    ScatteredState s = oracle::random_scattered(rng, 4);
    XOperator x = x_operator(s);
    cplx t = 0;
    for (int n = 0; n < 4; ++n) t += s.p()(n) * s.D(n, n);
    CHECK(std::abs(x.trace_x - t) < 1e-14);
    CHECK(std::abs(branch_overlap(s) - t) < 1e-14);
    // a pure state's <Psi|d Psi> is imaginary
    CHECK(std::abs(t.real()) < 1e-12);
}

TEST_CASE("resonant Gamma: identity preparation is already optimal")
{
    MatterSystem m = MatterSystem::tls(0.15, 0.0, 0.0);
    ScatteredState s = pdc_scattered(100, 1.0, m, Param::Gamma);
    FisherReport r = fisher_report(s, false);
    CHECK(std::abs(r.kappa - 1.0) < 1e-6);
    CHECK(r.q_total == r.q_biph);
    CHECK(r.q_reduced <= r.c_locc_identity * (1 + 1e-9));
    CHECK(r.varsigma >= 1.0 - 1e-9);
}

TEST_CASE("detuned pdc report obeys the inequality suite")
{
    MatterSystem m = MatterSystem::tls(0.15, 0.0, 0.3);
    for (Param th : {Param::Gamma, Param::Omega0}) {
        ScatteredState s = pdc_scattered(120, 1.5, m, th);
        FisherReport r = fisher_report(s, true);
        double tol = 1e-9 * r.q_biph;
        CHECK(r.c_locc_v0 <= r.q_biph + tol);
        CHECK(r.c_locc_identity <= r.q_biph + tol);
        CHECK(r.c_s2i <= r.q_biph + tol);
        CHECK(r.c_locc_identity >= r.q_reduced - tol);
        CHECK(r.c_s2i >= r.q_reduced - tol);
        CHECK(r.c_locc_v0 >= r.c_locc_identity - 1e-3 * r.q_biph);
    }
}

TEST_CASE("lossy total QFI decomposes into three terms")
{
    MatterSystem m = MatterSystem::tls(0.15, 0.2, 0.0);
    ScatteredState s = pdc_scattered(100, 1.0, m, Param::Gamma);
    FisherReport r = total_qfi(s);
    CHECK(r.N > 0);
    CHECK(r.q_idler >= 0);
    CHECK(std::abs(r.q_total - (r.c_classical + r.N * r.q_idler + (1 - r.N) * r.q_biph)) < 1e-14 * r.q_total);
    CHECK(std::abs(r.c_classical - r.N_theta * r.N_theta / (r.N * (1 - r.N))) < 1e-14 * r.c_classical);
}

TEST_CASE("post-selection relation at weak gain")
{
    MatterSystem m = MatterSystem::tls(0.15, 0.0, 0.0);
    GaussianJSA j = pdc_gaussian_jsa(units::wavenumber_to_rad_per_ps(100), 1.0);
    SchmidtFactors f = schmidt_factors(j);
    int n = schmidt_truncation(f.mu);
    SchmidtState s = pdc_schmidt(j, n, hermite_grid(f.kappa_S, n - 1, 0.05)).state;
    ScatteredState a = scatter_schmidt(s, m, Param::Gamma);
    ScatteredState b = scatter_schmidt(postselect(s), m, Param::Gamma);
    PostselectCheck c = postselect_relation(a, b);
    CHECK(c.residual < 1e-3);
    CHECK_THROWS_AS(postselect_relation(b, b), InvalidArgument);
}
