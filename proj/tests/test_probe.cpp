#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bispec/probe.hpp"
#include "bispec/units.hpp"

using namespace bispec;

TEST_CASE("envelopes are normalised on the trapezoid rule")
{
    TimeGrid g = TimeGrid::make(0, 40, 4001);
    Envelope e = make_envelope(EnvelopeKind::Exponential, {1.0, 0, 0}, g);
    CHECK(std::abs(norm2(e) - 1) < 1e-8);
    // the analytic samples already carry almost all the norm
    CHECK(std::abs(e.amp(0) - 1.0) < 1e-3);
}

TEST_CASE("gaussian peak value")
{
    cplx v = envelope_value(EnvelopeKind::Gaussian, {1.0, 5.0, 0}, 5.0);
    CHECK(std::abs(v - std::pow(pi, -0.25)) < 1e-12);
    CHECK(std::abs(std::abs(v) - 0.7511255444649425) < 1e-12);
}

TEST_CASE("hermite-gauss envelopes are orthogonal")
{
    TimeGrid g = TimeGrid::make(-12, 12, 4001);
    for (double k : {0.7, 1.3}) {
        Envelope h0 = make_envelope(EnvelopeKind::HermiteGauss, {k, 0, 0}, g);
        Envelope h1 = make_envelope(EnvelopeKind::HermiteGauss, {k, 0, 1}, g);
        Envelope h4 = make_envelope(EnvelopeKind::HermiteGauss, {k, 0, 4}, g);
        CHECK(std::abs(inner(h0, h1)) < 1e-8);
        CHECK(std::abs(inner(h1, h4)) < 1e-8);
    }
}

TEST_CASE("grid-too-short and bad parameters are rejected")
{
    TimeGrid g = TimeGrid::make(0, 5, 501);
    CHECK_THROWS_AS(make_envelope(EnvelopeKind::Exponential, {1.0, 0, 0}, g), InvalidArgument);
    CHECK_THROWS_AS(make_envelope(EnvelopeKind::Exponential, {-1.0, 0, 0}, g), InvalidArgument);
    CHECK_THROWS_AS(make_envelope(EnvelopeKind::Custom, {1.0, 0, 0}, g), InvalidArgument);
    CHECK_THROWS_AS(TimeGrid::make(0, 1, 1), InvalidArgument);
}

TEST_CASE("square pulse keeps unit norm with the edge on a sample")
{
    TimeGrid g = TimeGrid::make(0, 4, 401);
    Envelope e = make_envelope(EnvelopeKind::Square, {2.0, 0, 0}, g);
    CHECK(std::abs(norm2(e) - 1) < 1e-12);
    CHECK(std::abs(e.amp(0) - e.amp(100)) < 1e-15);
    CHECK(std::abs(e.amp(200) - 0.5 * e.amp(100)) < 1e-15);
    CHECK(std::abs(e.amp(300)) == 0.0);
}

TEST_CASE("pdc Gaussian JSA coefficients")
{
    GaussianJSA inf = pdc_gaussian_jsa(INFINITY, 1.0);
    CHECK(std::abs(inf.a - pdc_gamma * 0.0144) < 1e-12);
    CHECK(std::abs(inf.b - pdc_gamma * 0.12 * 1.12) < 1e-12);
    CHECK(std::abs(inf.c - pdc_gamma * 1.12 * 1.12) < 1e-12);

    GaussianJSA j = pdc_gaussian_jsa(1.0, 1.0);
    CHECK(std::abs(j.a - 0.500694368) < 1e-8);
    for (double s : {0.5, 3.0, 30.0})
        for (double T : {0.15, 1.0, 2.0}) {
            GaussianJSA k = pdc_gaussian_jsa(s, T);
            double det = k.a * k.c - k.b * k.b;
            double ref = pdc_gamma * std::pow(k.T_S - k.T_I, 2) / (2 * s * s);
            CHECK(det > 0);
            CHECK(std::abs(det - ref) < 1e-10 * std::max(1.0, ref));
        }
    CHECK_THROWS_AS(pdc_gaussian_jsa(0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(pdc_gaussian_jsa(1.0, -1.0), InvalidArgument);
}

TEST_CASE("Schmidt factors: product and symmetric limits")
{
    GaussianJSA j;
    j.a = 0.7;
    j.b = 0.0;
    j.c = 1.9;
    j.sigma_p = 1.0;
    SchmidtFactors f = schmidt_factors(j);
    CHECK(f.mu == 0.0);
    TimeGrid g = hermite_grid(f.kappa_S, 4);
    PdcSchmidt p = pdc_schmidt(j, 0, g);
    CHECK(p.state.n_modes() == 1);

    j.b = 0.3;
    j.c = 0.7;
    f = schmidt_factors(j);
    CHECK(std::abs(f.kappa_S - f.kappa_I) < 1e-14);
    // mu solves b mu^2 + 2 sqrt(ac) mu + b = 0
    double ac = std::sqrt(j.a * j.c);
    CHECK(std::abs(j.b * f.mu * f.mu + 2 * ac * f.mu + j.b) < 1e-14);
    CHECK(std::abs(f.mu) < 1);
}

TEST_CASE("pdc Schmidt state: weights, vacuum and orthonormal modes")
{
    double sigma = units::wavenumber_to_rad_per_ps(100);
    GaussianJSA j = pdc_gaussian_jsa(sigma, 1.0);
    SchmidtFactors f = schmidt_factors(j);
    int n = schmidt_truncation(f.mu);
    CHECK(std::pow(std::abs(f.mu), 2 * n) < 1e-10);
    TimeGrid g = hermite_grid(f.kappa_S, n - 1);
    PdcSchmidt p = pdc_schmidt(j, 0, g);
    const SchmidtState& s = p.state;
    CHECK(s.has_vacuum);
    CHECK(std::abs(s.norm_const - 1 - s.weight_sum()) < 1e-15);
    double dev = 0;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            dev = std::max(dev, std::abs(inner(s.signal_modes[a], s.signal_modes[b]) - (a == b ? 1.0 : 0.0)));
            dev = std::max(dev, std::abs(inner(s.idler_modes[a], s.idler_modes[b]) - (a == b ? 1.0 : 0.0)));
        }
    CHECK(dev < 1e-6);
    for (int k = 1; k < n; ++k) CHECK(std::abs(s.r(k) / s.r(k - 1) - f.mu) < 1e-14);
}

TEST_CASE("time modes are Fourier images of the frequency Hermite modes")
{
    // (1/sqrt(2 pi)) int sqrt(k) psi_n(k w) e^{-i w t} dw by brute-force quadrature
    double sigma = units::wavenumber_to_rad_per_ps(120);
    GaussianJSA j = pdc_gaussian_jsa(sigma, 1.5);
    SchmidtFactors f = schmidt_factors(j);
    TimeGrid g = hermite_grid(f.kappa_S, 5);
    PdcSchmidt p = pdc_schmidt(j, 6, g);
    const double ks = f.kappa_S;
    const int nw = 20001;
    const double wmax = 14.0 / ks, dw = 2 * wmax / (nw - 1);
    double worst = 0;
    for (int n = 0; n < 6; ++n)
        for (int i : {g.n / 3, g.n / 2 + 7, 2 * g.n / 3}) {
            double t = g.t(i);
            cplx acc = 0;
            for (int q = 0; q < nw; ++q) {
                double w = -wmax + q * dw;
                double wt = (q == 0 || q == nw - 1) ? 0.5 : 1.0;
                acc += wt * std::sqrt(ks) * hermite_functions(n, ks * w)(n) * std::exp(-I * w * t);
            }
            acc *= dw / std::sqrt(2 * pi);
            worst = std::max(worst, std::abs(acc - p.state.signal_modes[n].amp(i)));
        }
    CHECK(worst < 1e-8);
}

TEST_CASE("Mehler reconstruction of the Gaussian JSA")
{
    for (double T : {0.15, 1.0, 2.0}) {
        GaussianJSA j = pdc_gaussian_jsa(units::wavenumber_to_rad_per_ps(50), T);
        SchmidtFactors f = schmidt_factors(j);
        int n = schmidt_truncation(f.mu, 1e-10);
        CHECK(mehler_l2_error(j, n) < 1e-6);
    }
}

TEST_CASE("|mu| falls with sigma_p up to the product point, then rises")
{
    // b^2/(ac) is smallest at 1/(2 sigma^2) = gamma T_S T_I
    for (double T : {0.15, 1.0, 1.995}) {
        GaussianJSA ref = pdc_gaussian_jsa(1.0, T);
        double s_star = 1 / std::sqrt(2 * pdc_gamma * ref.T_S * ref.T_I);
        double prev = 1;
        for (double s = 0.2 * s_star; s < s_star; s += 0.05 * s_star) {
            double mu = std::abs(schmidt_factors(pdc_gaussian_jsa(s, T)).mu);
            CHECK(mu < prev);
            prev = mu;
        }
        prev = 0;
        for (double s = 1.01 * s_star; s < 5 * s_star; s += 0.2 * s_star) {
            double mu = std::abs(schmidt_factors(pdc_gaussian_jsa(s, T)).mu);
            CHECK(mu > prev);
            prev = mu;
        }
    }
}

TEST_CASE("pump-width conventions order the grid corners")
{
    using units::WavenumberConvention;
    auto S = [](double cm, double T, WavenumberConvention c) {
        GaussianJSA j = pdc_gaussian_jsa(units::wavenumber_to_rad_per_ps(cm, c), T);
        SchmidtFactors f = schmidt_factors(j);
        std::vector<double> w;
        for (int n = 0; n < schmidt_truncation(f.mu); ++n) w.push_back(std::pow(f.mu * f.mu, n));
        return entanglement_entropy(w);
    };
    // short T_qent and narrow pump give the most entangled corner
    CHECK(S(50, 0.15, WavenumberConvention::Linear) > S(180, 1.995, WavenumberConvention::Linear) + 1);
    CHECK(S(50, 0.15, WavenumberConvention::Angular) < S(180, 1.995, WavenumberConvention::Angular));
}

TEST_CASE("entanglement entropy")
{
    CHECK(entanglement_entropy(std::vector<double>{0.3}) == 0.0);
    CHECK(std::abs(entanglement_entropy(std::vector<double>{0.5, 0.5}) - std::log(2.0)) < 1e-14);
    std::vector<double> geo;
    double m2 = 0.5;
    for (int n = 0; n < 200; ++n) geo.push_back((1 - m2) * std::pow(m2, n));
    CHECK(std::abs(entanglement_entropy(geo) - 2 * std::log(2.0)) < 1e-12);
    CHECK_THROWS_AS(entanglement_entropy(std::vector<double>{0.0, 0.0}), InvalidArgument);
}

TEST_CASE("tfm states pair signal and idler modes crosswise")
{
    TimeGrid g = hermite_grid(1.3, 1);
    SchmidtState s0 = tfm_state(0.0, 1.3, 1.3, 0.01, g, g);
    CHECK(std::abs(s0.r(1)) < 1e-18);
    CHECK(s0.signal_modes[0].order == 0);
    CHECK(s0.idler_modes[0].order == 1);
    SchmidtState s1 = tfm_state(pi / 4, 1.3, 1.3, 0.01, g, g);
    CHECK(std::abs(entanglement_entropy(s1) - std::log(2.0)) < 1e-12);
    SchmidtState s2 = tfm_state(pi / 2, 1.3, 1.3, 0.01, g, g);
    CHECK(std::abs(s2.r(0)) < 1e-17);
    CHECK(s2.idler_modes[1].order == 0);
    CHECK_THROWS_AS(tfm_state(4.0, 1.3, 1.3, 0.01, g, g), InvalidArgument);
}

TEST_CASE("post-selection drops the vacuum and renormalises")
{
    GaussianJSA j = pdc_gaussian_jsa(units::wavenumber_to_rad_per_ps(80), 0.5);
    SchmidtFactors f = schmidt_factors(j);
    PdcSchmidt p = pdc_schmidt(j, 0, hermite_grid(f.kappa_S, 20));
    SchmidtState q = postselect(p.state);
    CHECK_FALSE(q.has_vacuum);
    CHECK(std::abs(q.weight_sum() - 1) < 1e-14);
    // Lambda scales as (alpha/hbar)^2
    GaussianJSA j2 = pdc_gaussian_jsa(units::wavenumber_to_rad_per_ps(80), 0.5, 0.005);
    PdcSchmidt p2 = pdc_schmidt(j2, p.state.n_modes(), hermite_grid(f.kappa_S, 20));
    CHECK(std::abs(p2.state.weight_sum() / p.state.weight_sum() - 0.25) < 1e-12);
}

TEST_CASE("unit conversions")
{
    double w = units::wavenumber_to_rad_per_ps(100);
    CHECK(std::abs(w - 2 * pi * 0.0299792458 * 100) < 1e-12);
    CHECK(std::abs(units::wavenumber_to_rad_per_ps(100, units::WavenumberConvention::Linear) - 2.99792458) < 1e-12);
    CHECK(std::abs(units::ev_to_rad_per_ps(1.0) - 1519.267) < 1e-9);
}

TEST_CASE("envelope csv dump")
{
    TimeGrid g = TimeGrid::make(0, 1, 5);
    Envelope e = make_custom_envelope(g, cvec::Ones(5));
    std::ostringstream os;
    write_envelope_csv(os, e);
    std::string s = os.str();
    CHECK(std::count(s.begin(), s.end(), '\n') >= 5);
}
