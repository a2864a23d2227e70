#include "bispec/grid.hpp"

#include <cmath>
#include <ostream>

namespace bispec {

TimeGrid TimeGrid::make(double t_min, double t_max, int n)
{
    if (n < 2) throw InvalidArgument("TimeGrid: n must be at least 2");
    if (!(t_max > t_min)) throw InvalidArgument("TimeGrid: t_max must exceed t_min");
    TimeGrid g;
    g.t_min = t_min;
    g.t_max = t_max;
    g.n = n;
    g.dt = (t_max - t_min) / (n - 1);
    return g;
}

bool TimeGrid::same_as(const TimeGrid& o) const
{
    double tol = 1e-12 * std::max(1.0, std::abs(t_max - t_min));
    return n == o.n && std::abs(t_min - o.t_min) < tol && std::abs(t_max - o.t_max) < tol;
}

rvec trapezoid_weights(const TimeGrid& g)
{
    rvec w = rvec::Constant(g.n, g.dt);
    w(0) *= 0.5;
    w(g.n - 1) *= 0.5;
    return w;
}

const char* to_string(EnvelopeKind k)
{
    switch (k) {
    case EnvelopeKind::Exponential: return "exponential";
    case EnvelopeKind::Gaussian: return "gaussian";
    case EnvelopeKind::Square: return "square";
    case EnvelopeKind::HermiteGauss: return "hermite_gauss";
    case EnvelopeKind::Custom: return "custom";
    }
    return "?";
}

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where)
{
    if (!a.same_as(b)) throw InvalidArgument(std::string(where) + ": grid mismatch");
}

cplx inner(const Envelope& a, const Envelope& b)
{
    require_same_grid(a.grid, b.grid, "inner");
    const int n = a.grid.n;
    cplx s = 0.0;
    for (int i = 1; i < n - 1; ++i) s += std::conj(a.amp(i)) * b.amp(i);
    s += 0.5 * (std::conj(a.amp(0)) * b.amp(0) + std::conj(a.amp(n - 1)) * b.amp(n - 1));
    return s * a.grid.dt;
}

double norm2(const Envelope& a) { return std::real(inner(a, a)); }

void write_envelope_csv(std::ostream& os, const Envelope& e)
{
    os << "t,re,im\n";
    os.precision(12);
    for (int i = 0; i < e.grid.n; ++i)
        os << e.grid.t(i) << ',' << e.amp(i).real() << ',' << e.amp(i).imag() << '\n';
}

} // namespace bispec
