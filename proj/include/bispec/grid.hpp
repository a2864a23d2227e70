#pragma once

#include <iosfwd>
#include <string>

#include "bispec/types.hpp"

namespace bispec {

// Uniform sampling of [t_min, t_max] with n points.
struct TimeGrid {
    double t_min = 0.0;
    double t_max = 1.0;
    int n = 2;
    double dt = 1.0;

    static TimeGrid make(double t_min, double t_max, int n);
    double t(int i) const { return t_min + dt * i; }
    bool same_as(const TimeGrid& o) const;
};

// Trapezoid weights, so that sum_i w_i f(t_i) approximates the integral.
rvec trapezoid_weights(const TimeGrid& g);

enum class EnvelopeKind { Exponential, Gaussian, Square, HermiteGauss, Custom };

const char* to_string(EnvelopeKind k);

struct Envelope {
    TimeGrid grid;
    cvec amp;
    EnvelopeKind kind = EnvelopeKind::Custom;
    int order = 0; // Hermite-Gauss index, zero otherwise
};

// <a|b> with the trapezoid rule; grids must match.
cplx inner(const Envelope& a, const Envelope& b);
double norm2(const Envelope& a);

void require_same_grid(const TimeGrid& a, const TimeGrid& b, const char* where);

// Columnar dump: t, Re amp, Im amp.
void write_envelope_csv(std::ostream& os, const Envelope& e);

} // namespace bispec
