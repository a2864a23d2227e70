#include "bispec/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace bispec {

TimeGrid pdc_signal_grid(const SchmidtFactors& f, int n_modes, const MatterSystem& ms, int refine)
{
    // detuned responses follow the smooth input adiabatically, so only the decay sets a step
    double decay = 0.5 * ms.rate_scale() * (ms.gamma + ms.gamma_perp);
    return hermite_grid(f.kappa_S, n_modes - 1, 0.05 / decay, refine);
}

PdcSchmidt build_pdc(const MatterSystem& ms, double sigma_p_cm, double T_qent, const PdcOptions& opt, int refine)
{
    double sigma = units::wavenumber_to_rad_per_ps(sigma_p_cm, opt.convention);
    GaussianJSA jsa = pdc_gaussian_jsa(sigma, T_qent, opt.alpha_over_hbar);
    SchmidtFactors f = schmidt_factors(jsa);
    int n = f.mu == 0.0 ? 1 : (opt.n_modes > 0 ? opt.n_modes : schmidt_truncation(f.mu));
    TimeGrid sg = pdc_signal_grid(f, n, ms, refine);
    PdcSchmidt p = pdc_schmidt(jsa, n, sg, hermite_grid(f.kappa_I, n - 1));
    if (opt.postselect) p.state = postselect(p.state);
    return p;
}

PdcPoint evaluate_pdc_point(const MatterSystem& ms, Param theta, double sigma_p_cm, double T_qent,
                            const PdcOptions& opt)
{
    PdcPoint pt;
    pt.T_qent = T_qent;
    pt.sigma_p_cm = sigma_p_cm;
    pt.sigma_p = units::wavenumber_to_rad_per_ps(sigma_p_cm, opt.convention);
    ScatterOptions so;
    so.method = opt.method;
    so.keep_fields = false;

    auto eval = [&](int refine, FisherReport& rep) {
        PdcSchmidt p = build_pdc(ms, sigma_p_cm, T_qent, opt, refine);
        ScatteredState s = scatter_schmidt(p.state, ms, theta, so);
        rep = fisher_report(s, opt.with_v0);
        pt.factors = p.factors;
        pt.entropy = entanglement_entropy(p.state);
        pt.grid_n = p.state.signal_modes[0].grid.n;
        pt.grid_dt = p.state.signal_modes[0].grid.dt;
        pt.refine = refine;
    };

    eval(1, pt.report);
    if (opt.grid_refine) {
        for (int refine = 2; refine <= opt.max_refine; refine *= 2) {
            FisherReport finer;
            double prev = pt.report.q_biph;
            eval(refine, finer);
            pt.report = finer;
            if (std::abs(finer.q_biph - prev) <= opt.refine_tol * std::abs(finer.q_biph)) return pt;
        }
        throw NumericalError("evaluate_pdc_point: grid refinement did not converge");
    }
    return pt;
}

} // namespace bispec
