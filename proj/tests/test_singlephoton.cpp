#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bispec/fisher.hpp"
#include "bispec/singlephoton.hpp"

using namespace bispec;

namespace {

const double G = 0.15;
const MatterSystem full = MatterSystem::tls(G, 0.0, 0.0, RateConvention::Full);

double scatter_route_qfi(double tau, const MatterSystem& ms, Param p)
{
    double span = 40 * tau + 40 / G;
    double dt = std::min(tau, 1 / G) / 400;
    TimeGrid g = TimeGrid::make(0, span, static_cast<int>(std::ceil(span / dt)) + 1);
    Envelope xi = make_envelope(EnvelopeKind::Exponential, {tau, 0, 0}, g);
    ScatteredState s = scatter_schmidt(product_state(xi), ms, p);
    return biphoton_qfi(s);
}

} // namespace

TEST_CASE("matched exponential is fully converted out of the input mode")
{
    // Gamma tau = 1/2 makes the first modal amplitude exactly one
    ModalSet s = wl_modal_amplitudes(0.5 / G, full, Param::Gamma);
    CHECK(std::abs(s.C(0) - 1.0) < 1e-12);
    for (double x : {0.2, 1.0, 3.0}) {
        ModalSet t = wl_modal_amplitudes(x / G, full, Param::Gamma);
        double a = 0.5 / (x / G);
        CHECK(std::abs(t.C(0) - 2 * G / (a + G)) < 1e-12);
    }
}

TEST_CASE("Gamma and omega0 derivatives of the modal amplitudes")
{
    // resonant TLS: d/d omega0 = i d/d Gamma on f, and g does not depend on omega0
    for (double x : {0.3, 1.0, 4.0}) {
        ModalSet a = wl_modal_amplitudes(x / G, full, Param::Gamma);
        ModalSet b = wl_modal_amplitudes(x / G, full, Param::Omega0);
        cvec pred = I * (a.D - a.C / G);
        CHECK((b.D - pred).cwiseAbs().maxCoeff() < 1e-10 * a.D.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("omega0 derivative against finite differences")
{
    const double tau = 2.0 / G, h = 1e-4;
    ModalSet a = wl_modal_quadrature(tau, full, Param::Omega0, 8);
    ModalSet up = wl_modal_quadrature(tau, full.with(Param::Omega0, h), Param::Omega0, 8);
    ModalSet dn = wl_modal_quadrature(tau, full.with(Param::Omega0, -h), Param::Omega0, 8);
    cvec fd = (up.C - dn.C) / (2 * h);
    CHECK((fd - a.D).cwiseAbs().maxCoeff() < 1e-6 * a.D.cwiseAbs().maxCoeff());
}

TEST_CASE("quadrature matches the closed-form amplitudes")
{
    for (Param p : {Param::Gamma, Param::Omega0})
        for (double x : {0.2, 1.0, 5.0}) {
            ModalSet a = wl_modal_amplitudes(x / G, full, p, 12);
            ModalSet q = wl_modal_quadrature(x / G, full, p, 12);
            CHECK((a.C - q.C).cwiseAbs().maxCoeff() < 1e-8);
            CHECK((a.D - q.D).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, a.D.cwiseAbs().maxCoeff()));
        }
}

TEST_CASE("closed-form exponential QFI and its symmetry")
{
    for (double x : {0.2, 0.5, 1.0, 5.0}) {
        double tau = x / G, ref = exponential_qfi_closed(tau, G);
        double qg = modal_qfi(wl_modal_amplitudes(tau, full, Param::Gamma));
        double qw = modal_qfi(wl_modal_amplitudes(tau, full, Param::Omega0));
        CHECK(std::abs(qg - ref) < 1e-9 * ref);
        CHECK(std::abs(qw - ref) < 1e-9 * ref);
    }
    // short pulses: Q grows linearly in tau
    const double ts = 1e-3 / G;
    double q1 = modal_qfi(wl_modal_amplitudes(ts, full, Param::Gamma));
    CHECK(std::abs(q1 / ts - 16 / G) < 1e-2 * 16 / G);
}

TEST_CASE("half-rate convention rescales the Gamma information")
{
    MatterSystem half = MatterSystem::tls(G, 0.0, 0.0);
    double tau = 1 / G;
    double qh = modal_qfi(wl_modal_amplitudes(tau, half, Param::Gamma));
    double qw = modal_qfi(wl_modal_amplitudes(tau, half, Param::Omega0));
    CHECK(std::abs(qh - 0.25 * exponential_qfi_closed(tau, G / 2)) < 1e-9 * qh);
    CHECK(std::abs(qw - exponential_qfi_closed(tau, G / 2)) < 1e-9 * qw);
}

TEST_CASE("modal route agrees with the scattering route")
{
    for (double x : {0.2, 1.0, 5.0}) {
        double tau = x / G;
        double qm = modal_qfi(wl_modal_amplitudes(tau, full, Param::Gamma));
        double qs = scatter_route_qfi(tau, full, Param::Gamma);
        CHECK(std::abs(qm - qs) < 1e-6 * qm);
    }
}

TEST_CASE("modal expansion reconstructs the scattered pulse")
{
    const double tau = 1 / G;
    ModalSet q = wl_modal_quadrature(tau, full, Param::Gamma, 40, true);
    const TimeGrid& g = q.basis[0].grid;
    OnePhoton o = one_photon_scatter(q.basis[0], full);
    cvec rec = cvec::Zero(g.n);
    for (int k = 0; k <= q.k_max(); ++k) rec += ((k == 0 ? 1.0 : 0.0) - q.C(k)) * q.basis[k].amp;
    Envelope diff = make_custom_envelope(g, rec - o.phi.amp);
    CHECK(std::sqrt(norm2(diff)) < 1e-5);
    CHECK(std::abs(o.M - 1.0) < 1e-6);
}

TEST_CASE("detection probability matches the absorbed energy")
{
    // lost = 2 Gamma_perp int |eps|^2 for eps' = -kappa eps + sqrt(2 Gamma) u, u = exp(-t/2tau)/sqrt(tau)
    const double tau = 1 / G, a = 0.5 / tau;
    for (double gp : {0.0, 0.05, 0.3, 1.5}) {
        MatterSystem m = MatterSystem::tls(G, gp, 0.0, RateConvention::Full);
        ModalSet q = wl_modal_quadrature(tau, m, Param::Gamma, 16);
        double k = G + gp;
        double e2 = 2 * G / tau / ((k - a) * (k - a)) * (tau + 0.5 / k - 2 / (a + k));
        CHECK(std::abs(q.M - (1 - 2 * gp * e2)) < 1e-6);
        CHECK(q.M <= 1 + 1e-9);
    }
    CHECK_THROWS_AS(wl_modal_amplitudes(tau, MatterSystem::tls(G, 0.1, 0.0), Param::Gamma), InvalidArgument);
}

TEST_CASE("square-pulse closed forms")
{
    for (double x : {0.5, 1.0, 2.0}) {
        double tau = x / G;
        double qg = modal_qfi(square_modal_amplitudes(tau, full, Param::Gamma));
        double qw = modal_qfi(square_modal_amplitudes(tau, full, Param::Omega0));
        CHECK(std::abs(qg - square_qfi_gamma_closed(tau, G)) < 1e-4 * qg);
        CHECK(std::abs(qw - square_qfi_omega_exact(tau, G)) < 1e-4 * qw);
    }
}

TEST_CASE("truncation that misses the tail is reported")
{
    ModalSet s = wl_modal_amplitudes(5 / G, full, Param::Gamma, 2);
    CHECK_THROWS_AS(modal_qfi(s), NumericalError);
}

TEST_CASE("tau sweep")
{
    std::vector<double> taus = {0.5 / G, 1 / G, 2 / G};
    auto rows = qfi_tau_sweep(PulseFamily::Exponential, full, taus);
    CHECK(rows.size() == 3);
    for (const auto& r : rows) CHECK(std::abs(r.q_gamma - r.closed_gamma) < 1e-9 * r.closed_gamma);
    std::ostringstream os;
    write_tau_sweep_csv(os, rows);
    CHECK(os.str().rfind("tau,", 0) == 0);
}
