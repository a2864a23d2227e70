#pragma once

#include "bispec/grid.hpp"
#include "bispec/matter.hpp"

namespace bispec {

enum class ConvolutionMethod {
    Exponential,   // exact propagation of the response ODE for piecewise-linear input
    Direct,        // O(n^2) trapezoid causal convolution, serial
    DirectParallel // same, OpenMP over output samples
};

const char* to_string(ConvolutionMethod m);
ConvolutionMethod convolution_method_from_string(const std::string& s);

// eps = int f(t - s) u(s) ds and its parameter derivative on the grid, plus the
// augmented response state Y = (y, dy) at the last sample, from which the
// fields continue analytically once the input has ended.
struct Response {
    cvec eps;
    cvec deps;
    cvec y_end;
};

// Step matrices for the exponential propagator of Y' = A Y + B u.
struct ExpStepper {
    cmat A;
    cmat B;
    cmat E11, E12, E13;
    double h = 0;
    cvec w;
};

ExpStepper make_stepper(const StateSpace& ss, double h);

Response respond_exponential(const ExpStepper& st, const cvec& u);
Response respond_direct(const StateSpace& ss, const TimeGrid& g, const cvec& u, bool parallel);

// Samples f(k dt) and df(k dt), k = 0..n-1.
void kernel_samples(const StateSpace& ss, double dt, int n, cvec& f, cvec& df);

// Causal trapezoid convolution with sampled kernel. Serial reference and OpenMP version.
cvec convolve_direct_serial(const cvec& kernel, const cvec& u, double dt);
cvec convolve_direct_parallel(const cvec& kernel, const cvec& u, double dt);

// W with A^H W + W A = -conj(a) b^T, so that the tail integral of
// conj(a^T Y_m(t)) b^T Y_n(t) from the end of the grid to infinity is Y_m^H W Y_n.
cmat tail_gram(const cmat& A, const cvec& a, const cvec& b);

} // namespace bispec
