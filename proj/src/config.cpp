#include "bispec/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "bispec/singlephoton.hpp"

namespace bispec {

using json = nlohmann::json;

const char* to_string(ProbeKind k)
{
    switch (k) {
    case ProbeKind::PDC: return "pdc";
    case ProbeKind::TFM: return "tfm";
    case ProbeKind::Fock: return "fock";
    case ProbeKind::Coherent: return "coherent";
    case ProbeKind::PACS: return "pacs";
    }
    return "?";
}

const char* to_string(Engine e)
{
    switch (e) {
    case Engine::ClosedForm: return "closedform";
    case Engine::GDM: return "gdm";
    case Engine::Both: return "both";
    }
    return "?";
}

const std::vector<std::string> pdc_columns = {"T_qent", "sigma_p", "S_entropy", "Q_biph", "C_classical", "Q_idler",
                                              "Q_total", "C_locc_identity", "Q_reduced", "kappa", "varsigma"};
const std::vector<std::string> tfm_columns = {"theta_t", "S_entropy", "Q_biph", "C_classical", "Q_idler",
                                              "Q_total", "C_locc_identity", "Q_reduced", "kappa", "varsigma"};
const std::vector<std::string> pulse_columns = {"tau", "engine", "Q_total", "closed_form", "stencil_h"};

namespace {

// Collects errors while reading fields, so that one pass reports everything.
struct Reader {
    std::vector<std::string> errors;

    const json* child(const json& j, const std::string& key, const std::string& path, bool required)
    {
        if (!j.is_object()) return nullptr;
        auto it = j.find(key);
        if (it == j.end()) {
            if (required) errors.push_back(path + ": missing");
            return nullptr;
        }
        return &*it;
    }

    double number(const json& j, const std::string& key, const std::string& path, bool required, double def)
    {
        const json* c = child(j, key, path, required);
        if (!c) return def;
        if (!c->is_number()) {
            errors.push_back(path + ": expected a number");
            return def;
        }
        return c->get<double>();
    }

    std::string text(const json& j, const std::string& key, const std::string& path, bool required,
                     const std::string& def, const std::vector<std::string>& allowed)
    {
        const json* c = child(j, key, path, required);
        if (!c) return def;
        if (!c->is_string()) {
            errors.push_back(path + ": expected a string");
            return def;
        }
        std::string s = c->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), s) == allowed.end()) {
            std::string msg = path + ": unknown value '" + s + "', expected one of";
            for (const auto& a : allowed) msg += " " + a;
            errors.push_back(msg);
            return def;
        }
        return s;
    }

    bool flag(const json& j, const std::string& key, const std::string& path, bool def)
    {
        const json* c = child(j, key, path, false);
        if (!c) return def;
        if (!c->is_boolean()) {
            errors.push_back(path + ": expected true or false");
            return def;
        }
        return c->get<bool>();
    }

    std::vector<double> list(const json& j, const std::string& key, const std::string& path, bool positive)
    {
        std::vector<double> out;
        const json* c = child(j, key, path, true);
        if (!c) return out;
        if (c->is_number()) {
            out.push_back(c->get<double>());
        } else if (c->is_array()) {
            for (size_t i = 0; i < c->size(); ++i) {
                if (!(*c)[i].is_number()) {
                    errors.push_back(path + "[" + std::to_string(i) + "]: expected a number");
                    continue;
                }
                out.push_back((*c)[i].get<double>());
            }
            if (c->empty()) errors.push_back(path + ": empty list");
        } else {
            errors.push_back(path + ": expected a number or a list of numbers");
        }
        if (positive)
            for (size_t i = 0; i < out.size(); ++i)
                if (!(out[i] > 0)) errors.push_back(path + "[" + std::to_string(i) + "]: must be positive");
        return out;
    }

    void positive(double v, const std::string& path)
    {
        if (!(v > 0)) errors.push_back(path + ": must be positive");
    }
};

ExperimentConfig read_config(const json& doc, Reader& rd)
{
    ExperimentConfig cfg;
    if (!doc.is_object()) {
        rd.errors.push_back("(root): expected a JSON object");
        return cfg;
    }

    // matter
    const json* m = rd.child(doc, "matter", "matter", true);
    if (m) {
        std::string kind = rd.text(*m, "kind", "matter.kind", true, "tls", {"tls", "cd"});
        cfg.frequency_units = rd.text(*m, "units", "matter.units", true, "rad/ps", {"rad/ps", "eV"});
        auto freq = [&](double v) { return cfg.frequency_units == "eV" ? units::ev_to_rad_per_ps(v) : v; };
        MatterSystem& ms = cfg.matter;
        ms.gamma = rd.number(*m, "gamma", "matter.gamma", true, 0.15);
        ms.gamma_perp = rd.number(*m, "gamma_perp", "matter.gamma_perp", false, 0.0);
        std::string conv = rd.text(*m, "convention", "matter.convention", false, "half", {"half", "full"});
        ms.convention = conv == "full" ? RateConvention::Full : RateConvention::Half;
        rd.positive(ms.gamma, "matter.gamma");
        if (ms.gamma_perp < 0) rd.errors.push_back("matter.gamma_perp: must be nonnegative");
        if (kind == "tls") {
            ms.kind = MatterKind::TLS;
            ms.delta = freq(rd.number(*m, "delta", "matter.delta", false, 0.0));
        } else {
            ms.kind = MatterKind::CD;
            ms.omega_a = freq(rd.number(*m, "omega_a", "matter.omega_a", true, 0.0));
            ms.omega_b = freq(rd.number(*m, "omega_b", "matter.omega_b", true, 0.0));
            ms.J = freq(rd.number(*m, "J", "matter.J", true, 0.0));
            ms.dip_a = rd.number(*m, "dip_a", "matter.dip_a", false, 1.0);
            ms.dip_b = rd.number(*m, "dip_b", "matter.dip_b", false, 1.0);
            rd.positive(ms.dip_a, "matter.dip_a");
            if (ms.omega_a == ms.omega_b && ms.J == 0.0)
                rd.errors.push_back("matter.J: degenerate dimer, need omega_a != omega_b or J != 0");
            if (rd.child(*m, "omega_bar", "matter.omega_bar", false)) {
                ms.omega_bar_S = freq(rd.number(*m, "omega_bar", "matter.omega_bar", false, 0.0));
            } else if (rd.errors.empty()) {
                ms.omega_bar_S = 0.0;
                ms.omega_bar_S = excitonic(ms).omega_alpha;
            }
        }
    }

    // probe
    const json* p = rd.child(doc, "probe", "probe", true);
    if (p) {
        std::string type = rd.text(*p, "type", "probe.type", true, "pdc", {"pdc", "tfm", "fock", "coherent", "pacs"});
        ProbeSpec& ps = cfg.probe;
        ps.alpha_over_hbar = rd.number(*p, "alpha_over_hbar", "probe.alpha_over_hbar", false, 0.01);
        if (type == "pdc") {
            ps.kind = ProbeKind::PDC;
            ps.sigma_p_cm = rd.list(*p, "sigma_p_cm", "probe.sigma_p_cm", true);
            ps.T_qent = rd.list(*p, "T_qent", "probe.T_qent", true);
            std::string wc = rd.text(*p, "wavenumber_convention", "probe.wavenumber_convention", false, "linear",
                                     {"angular", "linear"});
            ps.wavenumber = wc == "linear" ? units::WavenumberConvention::Linear : units::WavenumberConvention::Angular;
            ps.n_modes = static_cast<int>(rd.number(*p, "n_modes", "probe.n_modes", false, 0));
            ps.postselect = rd.flag(*p, "postselect", "probe.postselect", false);
            if (ps.n_modes < 0 || ps.n_modes > 64) rd.errors.push_back("probe.n_modes: must be in [0, 64]");
        } else if (type == "tfm") {
            ps.kind = ProbeKind::TFM;
            ps.theta_t = rd.list(*p, "theta_t", "probe.theta_t", false);
            for (size_t i = 0; i < ps.theta_t.size(); ++i)
                if (ps.theta_t[i] < 0 || ps.theta_t[i] > pi)
                    rd.errors.push_back("probe.theta_t[" + std::to_string(i) + "]: must be in [0, pi]");
            ps.k1 = rd.number(*p, "k1", "probe.k1", false, 1.3);
            ps.k2 = rd.number(*p, "k2", "probe.k2", false, 1.3);
            rd.positive(ps.k1, "probe.k1");
            rd.positive(ps.k2, "probe.k2");
        } else {
            ps.kind = type == "fock" ? ProbeKind::Fock : type == "coherent" ? ProbeKind::Coherent : ProbeKind::PACS;
            std::string env = rd.text(*p, "envelope", "probe.envelope", true, "exponential",
                                      {"exponential", "gaussian", "square"});
            ps.envelope = env == "gaussian" ? EnvelopeKind::Gaussian
                          : env == "square" ? EnvelopeKind::Square
                                            : EnvelopeKind::Exponential;
            ps.tau = rd.list(*p, "tau", "probe.tau", true);
            ps.t_ar = rd.number(*p, "t_ar", "probe.t_ar", false, -1);
            if (ps.kind != ProbeKind::Coherent) {
                ps.N = static_cast<int>(rd.number(*p, "N", "probe.N", false, 1));
                if (ps.N < (ps.kind == ProbeKind::Fock ? 1 : 0) || ps.N > 6)
                    rd.errors.push_back("probe.N: out of range");
            }
            if (ps.kind != ProbeKind::Fock) ps.amplitude = rd.number(*p, "amplitude", "probe.amplitude", true, 1.0);
        }
    }

    std::string th = rd.text(doc, "theta", "theta", true, "gamma", {"gamma", "omega0", "J"});
    cfg.theta = param_from_string(th);
    if (cfg.theta == Param::J && cfg.matter.kind != MatterKind::CD)
        rd.errors.push_back("theta: J requires a cd matter system");

    std::string eng = rd.text(doc, "engine", "engine", false, "closedform", {"closedform", "gdm", "both"});
    cfg.engine = eng == "gdm" ? Engine::GDM : eng == "both" ? Engine::Both : Engine::ClosedForm;
    bool pulse = cfg.probe.kind == ProbeKind::Fock || cfg.probe.kind == ProbeKind::Coherent ||
                 cfg.probe.kind == ProbeKind::PACS;
    if (cfg.engine != Engine::ClosedForm && !pulse)
        rd.errors.push_back("engine: gdm needs a fock, coherent or pacs probe");
    if (cfg.engine != Engine::GDM && pulse && (cfg.probe.kind != ProbeKind::Fock || cfg.probe.N != 1))
        rd.errors.push_back("engine: closedform covers single-photon fock probes only, use gdm");
    if (cfg.engine != Engine::ClosedForm && cfg.matter.gamma_perp > 0) cfg.gdm.upper_bound = true;

    if (const json* g = rd.child(doc, "grid", "grid", false)) {
        cfg.grid_refine = rd.flag(*g, "refine", "grid.refine", true);
        cfg.n_points = static_cast<int>(rd.number(*g, "n_points", "grid.n_points", false, 0));
        if (cfg.n_points < 0) rd.errors.push_back("grid.n_points: must be nonnegative");
        rd.text(*g, "span", "grid.span", false, "auto", {"auto"});
    }
    if (const json* g = rd.child(doc, "gdm", "gdm", false)) {
        cfg.gdm.atol = rd.number(*g, "atol", "gdm.atol", false, cfg.gdm.atol);
        cfg.gdm.rtol = rd.number(*g, "rtol", "gdm.rtol", false, cfg.gdm.rtol);
        cfg.gdm.T_final = rd.number(*g, "T_final", "gdm.T_final", false, 0.0);
    }
    if (const json* o = rd.child(doc, "output", "output", false)) {
        cfg.output_path = rd.text(*o, "path", "output.path", false, "", {});
        std::string f = rd.text(*o, "format", "output.format", false, "csv", {"csv", "json"});
        cfg.format = f == "json" ? OutputFormat::JSON : OutputFormat::CSV;
    }
    return cfg;
}

std::string fmt_num(double v)
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// Inequalities every report row must satisfy.
void check_report(const FisherReport& r)
{
    const double vals[] = {r.q_total, r.c_classical, r.q_idler, r.q_biph, r.q_reduced, r.c_locc_identity};
    for (double v : vals)
        if (!std::isfinite(v) || v < -1e-12) throw NumericalError("report: negative or non-finite information");
    double slack = 1e-9 * std::max(r.q_biph, 1e-300) + 1e-15;
    if (r.c_locc_identity > r.q_biph + slack) throw NumericalError("report: 1-LOCC CFI above the biphoton QFI");
    if (r.q_reduced > r.c_locc_identity + slack) throw NumericalError("report: reduced QFI above the 1-LOCC CFI");
}

std::vector<std::string> metric_cells(const FisherReport& r)
{
    return {fmt_num(r.q_biph),    fmt_num(r.c_classical), fmt_num(r.q_idler),
            fmt_num(r.q_total),   fmt_num(r.c_locc_identity), fmt_num(r.q_reduced),
            fmt_num(r.kappa),     fmt_num(r.varsigma)};
}

double fast_rate(const MatterSystem& ms)
{
    double s = ms.rate_scale();
    double f = 0.5 * s * (ms.gamma + ms.gamma_perp);
    if (ms.kind == MatterKind::TLS) return std::hypot(f, ms.delta);
    ExcitonicData x = excitonic(ms);
    return std::max({f, std::abs(x.delta_alpha), std::abs(x.delta_beta)});
}

double pulse_centre(const ProbeSpec& ps, double tau) { return ps.t_ar >= 0 ? ps.t_ar : 6 * tau; }

double pulse_end(const ProbeSpec& ps, double tau)
{
    switch (ps.envelope) {
    case EnvelopeKind::Exponential: return 40 * tau;
    case EnvelopeKind::Square: return tau;
    default: return pulse_centre(ps, tau) + 10 * tau;
    }
}

double closed_form(const ExperimentConfig& cfg, double tau)
{
    const MatterSystem& ms = cfg.matter;
    const ProbeSpec& ps = cfg.probe;
    if (ps.kind != ProbeKind::Fock || ps.N != 1 || ms.kind != MatterKind::TLS || ms.delta != 0.0 ||
        ms.gamma_perp != 0.0 || cfg.theta == Param::J)
        return std::nan("");
    double s = ms.rate_scale(), G = 0.5 * s * ms.gamma;
    double c = cfg.theta == Param::Gamma ? 0.25 * s * s : 1.0;
    if (ps.envelope == EnvelopeKind::Exponential) return c * exponential_qfi_closed(tau, G);
    if (ps.envelope == EnvelopeKind::Square)
        return cfg.theta == Param::Gamma ? c * square_qfi_gamma_closed(tau, G) : square_qfi_omega_exact(tau, G);
    return std::nan("");
}

double scatter_route(const ExperimentConfig& cfg, double tau)
{
    const ProbeSpec& ps = cfg.probe;
    const MatterSystem& ms = cfg.matter;
    double re_k = 0.5 * ms.rate_scale() * (ms.gamma + ms.gamma_perp);
    double t0 = ps.envelope == EnvelopeKind::Gaussian ? std::max(0.0, pulse_centre(ps, tau) - 10 * tau) : 0.0;
    double t1 = pulse_end(ps, tau) + 40 / re_k;
    auto eval = [&](int n) {
        if (ps.envelope == EnvelopeKind::Square) {
            // keep a sample on the falling edge
            int m = std::max(2, static_cast<int>(std::round((n - 1) * tau / (t1 - t0))));
            double dt = tau / m;
            n = static_cast<int>(std::ceil((t1 - t0) / dt)) + 1;
            t1 = t0 + dt * (n - 1);
        }
        TimeGrid g = TimeGrid::make(t0, t1, n);
        EnvelopeParams ep{tau, pulse_centre(ps, tau), 0};
        Envelope xi = make_envelope(ps.envelope, ep, g);
        ScatterOptions so;
        so.keep_fields = false;
        ScatteredState s = scatter_schmidt(product_state(xi), ms, cfg.theta, so);
        return total_qfi(s).q_total;
    };
    int n = cfg.n_points;
    if (n <= 0) n = static_cast<int>(std::ceil((t1 - t0) / (std::min(tau, 1 / fast_rate(ms)) / 400))) + 1;
    double q = eval(n);
    if (!cfg.grid_refine) return q;
    for (int k = 0; k < 4; ++k) {
        n = 2 * n - 1;
        double q2 = eval(n);
        if (std::abs(q2 - q) <= 1e-3 * std::abs(q2)) return q2;
        q = q2;
    }
    throw NumericalError("scatter route: grid refinement did not converge");
}

GDMResult gdm_route(const ExperimentConfig& cfg, double tau)
{
    const ProbeSpec& ps = cfg.probe;
    EnvelopeParams ep{tau, pulse_centre(ps, tau), 0};
    EnvelopeKind kind = ps.envelope;
    std::vector<double> breaks = {0.0};
    if (kind == EnvelopeKind::Square) breaks.push_back(tau);
    auto xi = [kind, ep](double t) { return envelope_value(kind, ep, t); };
    GDMInput in;
    in.N = ps.N;
    if (ps.kind == ProbeKind::Fock) {
        in.kind = InputKind::Fock;
        in.xi = Drive::analytic(xi, breaks);
    } else {
        double a = ps.amplitude;
        in.kind = ps.kind == ProbeKind::Coherent ? InputKind::Coherent : InputKind::PACS;
        in.alpha = Drive::analytic([xi, a](double t) { return a * xi(t); }, breaks);
        if (in.kind == InputKind::PACS) {
            in.xi = Drive::analytic(xi, breaks);
            in.beta = a;
        }
    }
    GDMOptions opt = cfg.gdm;
    if (opt.T_final <= 0) opt.T_final = std::max(80 / cfg.matter.gamma, pulse_end(ps, tau) + 40 / cfg.matter.gamma);
    return gdm_qfi_richardson(cfg.matter, cfg.theta, in, opt);
}

std::string timestamp()
{
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

} // namespace

std::vector<std::string> validate_config(const std::string& json_text)
{
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        return {std::string("(root): JSON parse error: ") + e.what()};
    }
    Reader rd;
    read_config(doc, rd);
    return rd.errors;
}

ExperimentConfig parse_config(const std::string& json_text)
{
    std::vector<std::string> errs = validate_config(json_text);
    if (!errs.empty()) {
        std::string msg;
        for (const auto& e : errs) msg += e + "\n";
        throw InvalidArgument(msg);
    }
    Reader rd;
    return read_config(json::parse(json_text), rd);
}

SweepTable run_experiment(const ExperimentConfig& cfg, bool with_timestamp)
{
    const ProbeSpec& ps = cfg.probe;
    SweepTable t;
    auto hdr = [&](const std::string& k, const std::string& v) { t.header.push_back(k + ": " + v); };
    hdr("bispec_version", version);
    hdr("probe", to_string(ps.kind));
    hdr("theta", to_string(cfg.theta));
    hdr("engine", to_string(cfg.engine));
    hdr("matter", cfg.matter.kind == MatterKind::TLS ? "tls" : "cd");
    hdr("rate_convention", cfg.matter.convention == RateConvention::Full ? "full" : "half");
    hdr("internal_units", "ps, rad/ps");
    hdr("frequency_units", cfg.frequency_units);
    hdr("grid_refine", cfg.grid_refine ? "true" : "false");

    std::vector<std::vector<std::string>> rows;
    std::exception_ptr err;

    if (ps.kind == ProbeKind::PDC) {
        hdr("wavenumber_convention", ps.wavenumber == units::WavenumberConvention::Angular
                                         ? "angular (omega = 2 pi c nu)"
                                         : "linear (omega = c nu)");
        hdr("alpha_over_hbar", fmt_num(ps.alpha_over_hbar));
        hdr("truncation", ps.n_modes > 0 ? "fixed " + std::to_string(ps.n_modes) + " modes"
                                         : "|mu|^(2N) < 1e-10, cap 256");
        hdr("grid", "hermite extent kappa_S (sqrt(2N+1) + 8), dt <= 0.05/decay rate, refine to 0.1% in Q_biph");
        hdr("vacuum", ps.postselect ? "post-selected" : "kept");
        t.columns = pdc_columns;
        PdcOptions po;
        po.convention = ps.wavenumber;
        po.alpha_over_hbar = ps.alpha_over_hbar;
        po.n_modes = ps.n_modes;
        po.grid_refine = cfg.grid_refine;
        po.postselect = ps.postselect;
        po.with_v0 = false;
        const int nt = ps.T_qent.size(), ns = ps.sigma_p_cm.size();
        rows.resize(nt * ns);
#pragma omp parallel for schedule(dynamic, 1)
        for (int k = 0; k < nt * ns; ++k) {
            try {
                double T = ps.T_qent[k / ns], sg = ps.sigma_p_cm[k % ns];
                PdcPoint pt = evaluate_pdc_point(cfg.matter, cfg.theta, sg, T, po);
                check_report(pt.report);
                std::vector<std::string> row = {fmt_num(T), fmt_num(sg), fmt_num(pt.entropy)};
                for (auto& c : metric_cells(pt.report)) row.push_back(c);
                rows[k] = row;
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
    } else if (ps.kind == ProbeKind::TFM) {
        hdr("alpha_over_hbar", fmt_num(ps.alpha_over_hbar));
        hdr("tfm_widths", fmt_num(ps.k1) + ", " + fmt_num(ps.k2));
        t.columns = tfm_columns;
        std::vector<double> th = ps.theta_t.empty() ? std::vector<double>{pi / 4} : ps.theta_t;
        rows.resize(th.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (int k = 0; k < static_cast<int>(th.size()); ++k) {
            try {
                double dtm = 0.05 / fast_rate(cfg.matter);
                TimeGrid sg = hermite_grid(ps.k1, 1, dtm, 1), ig = hermite_grid(ps.k2, 1);
                SchmidtState st = tfm_state(th[k], ps.k1, ps.k2, ps.alpha_over_hbar, sg, ig);
                ScatterOptions so;
                so.keep_fields = false;
                FisherReport r = fisher_report(scatter_schmidt(st, cfg.matter, cfg.theta, so), false);
                check_report(r);
                std::vector<std::string> row = {fmt_num(th[k]), fmt_num(entanglement_entropy(st))};
                for (auto& c : metric_cells(r)) row.push_back(c);
                rows[k] = row;
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
    } else {
        hdr("envelope", to_string(ps.envelope));
        hdr("photons", std::to_string(ps.N));
        if (ps.kind != ProbeKind::Fock) hdr("amplitude", fmt_num(ps.amplitude));
        hdr("gdm_tolerances", "atol " + fmt_num(cfg.gdm.atol) + ", rtol " + fmt_num(cfg.gdm.rtol));
        t.columns = pulse_columns;
        std::vector<Engine> engines;
        if (cfg.engine != Engine::GDM) engines.push_back(Engine::ClosedForm);
        if (cfg.engine != Engine::ClosedForm) engines.push_back(Engine::GDM);
        const int ne = engines.size(), nt = ps.tau.size();
        rows.resize(ne * nt);
#pragma omp parallel for schedule(dynamic, 1)
        for (int k = 0; k < ne * nt; ++k) {
            try {
                double tau = ps.tau[k / ne];
                Engine e = engines[k % ne];
                double q, h = std::nan("");
                if (e == Engine::ClosedForm) {
                    q = scatter_route(cfg, tau);
                } else {
                    GDMResult r = gdm_route(cfg, tau);
                    q = r.qfi;
                    h = r.h;
                }
                rows[k] = {fmt_num(tau), to_string(e), fmt_num(q), fmt_num(closed_form(cfg, tau)), fmt_num(h)};
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
    }
    if (err) std::rethrow_exception(err);
    if (with_timestamp) hdr("timestamp", timestamp());
    t.rows = std::move(rows);
    return t;
}

void write_csv(std::ostream& os, const SweepTable& t)
{
    for (const auto& h : t.header) os << "# " << h << '\n';
    for (size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& r : t.rows) {
        for (size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
        os << '\n';
    }
}

void write_json(std::ostream& os, const SweepTable& t)
{
    json doc;
    json hdr = json::object();
    for (const auto& h : t.header) {
        auto p = h.find(": ");
        hdr[h.substr(0, p)] = h.substr(p + 2);
    }
    doc["header"] = hdr;
    doc["columns"] = t.columns;
    json rows = json::array();
    for (const auto& r : t.rows) {
        json row = json::array();
        for (const auto& c : r) {
            char* end = nullptr;
            double v = std::strtod(c.c_str(), &end);
            if (end && *end == '\0' && !c.empty() && c != "nan")
                row.push_back(v);
            else if (c == "nan")
                row.push_back(nullptr);
            else
                row.push_back(c);
        }
        rows.push_back(row);
    }
    doc["rows"] = rows;
    os << doc.dump(2) << '\n';
}

} // namespace bispec
