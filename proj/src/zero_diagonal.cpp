#include <cmath>
#include <optional>

#include "bispec/fisher.hpp"

namespace bispec {

namespace {

// Unit x = cos t e1 + e^{i phi} sin t e2 with x^H B x = target, where the target
// lies on the segment between B11 and B22.
Eigen::Vector2cd hit_on_segment(const Eigen::Matrix2cd& B, cplx target)
{
    cplx al = B(0, 0) - target, ga = B(1, 1) - target;
    cplx dg = ga - al;
    if (std::abs(dg) < 1e-300) return {1.0, 0.0};
    double lam = std::clamp(std::real(al / (al - ga)), 0.0, 1.0);
    cplx P = B(0, 1) * std::conj(dg), Q = B(1, 0) * std::conj(dg);
    double phi = std::atan2(-(P.imag() + Q.imag()), P.real() - Q.real());
    cplx g = std::exp(I * phi) * B(0, 1) + std::exp(-I * phi) * B(1, 0);
    double beta = std::real(g / dg);
    // sin^2 t + beta sin t cos t = lam  <=>  sqrt(1+beta^2) sin(2t - psi) = 2 lam - 1
    double R = std::sqrt(1 + beta * beta);
    double psi = std::atan2(1.0, beta);
    double t = 0.5 * (std::asin(std::clamp((2 * lam - 1) / R, -1.0, 1.0)) + psi);
    return {std::cos(t), std::exp(I * phi) * std::sin(t)};
}

struct Hull {
    int k = 0; // support size
    int idx[3] = {0, 0, 0};
    double w[3] = {0, 0, 0};
};

// Convex combination of at most three diagonal entries that gives zero.
Hull zero_in_hull(const cvec& d, double tol)
{
    const int n = d.size();
    Hull h;
    int imin = 0;
    for (int i = 1; i < n; ++i)
        if (std::abs(d(i)) < std::abs(d(imin))) imin = i;
    if (std::abs(d(imin)) <= tol) {
        h.k = 1;
        h.idx[0] = imin;
        h.w[0] = 1;
        return h;
    }
    auto cross = [](cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); };
    double scale = d.cwiseAbs().maxCoeff();
    // segments first
    double best = 1e300;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            cplx a = d(i), b = d(j);
            if (std::real(a * std::conj(b)) >= 0) continue;
            double c = std::abs(cross(a, b)) / (std::abs(a - b) * scale);
            // a 2x2 traceless block is a segment up to rounding
            if (c < best && (c < 1e-10 || n == 2)) {
                best = c;
                double l = std::real(-b * std::conj(a - b)) / std::norm(a - b);
                h.k = 2;
                h.idx[0] = i;
                h.idx[1] = j;
                h.w[0] = l;
                h.w[1] = 1 - l;
            }
        }
    if (h.k == 2) return h;
    // triangles: take the one whose smallest barycentric weight is largest
    double bestmin = -1e300;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                cplx a = d(i), b = d(j), c = d(k);
                double area = cross(b - a, c - a);
                if (std::abs(area) < 1e-300) continue;
                double wa = cross(b, c) / area, wb = cross(c, a) / area, wc = cross(a, b) / area;
                double mn = std::min({wa, wb, wc});
                if (mn > bestmin) {
                    bestmin = mn;
                    h.k = 3;
                    h.idx[0] = i;
                    h.idx[1] = j;
                    h.idx[2] = k;
                    h.w[0] = wa;
                    h.w[1] = wb;
                    h.w[2] = wc;
                }
            }
    if (h.k != 3) throw NumericalError("zero_diagonal_unitary: zero not in the hull of the diagonal");
    for (double& x : h.w) x = std::max(x, 0.0);
    double s = h.w[0] + h.w[1] + h.w[2];
    for (double& x : h.w) x /= s;
    return h;
}

// Unit vector x with x^H A x = 0.
cvec isotropic_vector(const cmat& A, double tol)
{
    const int n = A.rows();
    cvec d = A.diagonal();
    Hull h = zero_in_hull(d, tol);
    cvec x = cvec::Zero(n);
    if (h.k == 1) {
        x(h.idx[0]) = 1.0;
        return x;
    }
    auto compress = [&](const cvec& u, const cvec& v) {
        Eigen::Matrix2cd B;
        B << u.dot(A * u), u.dot(A * v), v.dot(A * u), v.dot(A * v);
        return B;
    };
    auto unit = [n](int i) {
        cvec e = cvec::Zero(n);
        e(i) = 1.0;
        return e;
    };
    if (h.k == 2) {
        cvec u = unit(h.idx[0]), v = unit(h.idx[1]);
        Eigen::Vector2cd c = hit_on_segment(compress(u, v), 0.0);
        return c(0) * u + c(1) * v;
    }
    // reach the point on the edge (j,k) first, then the segment from d_i to it
    int i = h.idx[0], j = h.idx[1], k = h.idx[2];
    double wjk = h.w[1] + h.w[2];
    cvec ej = unit(j), ek = unit(k), ei = unit(i);
    if (wjk <= 0) return ei;
    cplx target = (h.w[1] * d(j) + h.w[2] * d(k)) / wjk;
    Eigen::Vector2cd c1 = hit_on_segment(compress(ej, ek), target);
    cvec y = c1(0) * ej + c1(1) * ek;
    Eigen::Vector2cd c2 = hit_on_segment(compress(ei, y), 0.0);
    return c2(0) * ei + c2(1) * y;
}

// Unitary whose first column is x: Householder reflection taking e1 to -x/ph,
// with the first column rephased.
cmat complete_unitary(const cvec& x)
{
    const int n = x.size();
    cplx ph = std::abs(x(0)) > 0 ? x(0) / std::abs(x(0)) : cplx(1.0);
    cvec v = x;
    v(0) += ph;
    double vv = v.squaredNorm();
    cmat U = cmat::Identity(n, n) - (2.0 / vv) * v * v.adjoint();
    U.col(0) = x;
    return U;
}

cmat zero_diag_pass(const cmat& A, double tol)
{
    const int n = A.rows();
    cmat V = cmat::Identity(n, n);
    cmat B = A;
    for (int k = 0; k < n - 1; ++k) {
        const int m = n - k;
        cmat sub = B.bottomRightCorner(m, m);
        cvec x = isotropic_vector(sub, tol);
        cmat U = complete_unitary(x);
        cmat Uf = cmat::Identity(n, n);
        Uf.bottomRightCorner(m, m) = U;
        B = (Uf.adjoint() * B * Uf).eval();
        V = (V * Uf).eval();
    }
    return V;
}

} // namespace

cmat zero_diagonal_unitary(const cmat& A, double tol)
{
    const int n = A.rows();
    if (A.cols() != n) throw InvalidArgument("zero_diagonal_unitary: not square");
    double scale = A.cwiseAbs().maxCoeff();
    if (std::abs(A.trace()) > 1e-8 * n * scale) throw InvalidArgument("zero_diagonal_unitary: A not traceless");
    if (n == 1 || A.diagonal().cwiseAbs().maxCoeff() <= tol) return cmat::Identity(n, n);

    // remove the trace residue so that every trailing block is exactly traceless
    cmat A0 = A - (A.trace() / double(n)) * cmat::Identity(n, n);
    cmat V = zero_diag_pass(A0, 1e-14 * scale);
    for (int it = 0; it < 3; ++it) {
        cmat B = V.adjoint() * A0 * V;
        if (B.diagonal().cwiseAbs().maxCoeff() <= 1e-3 * tol) break;
        B -= (B.trace() / double(n)) * cmat::Identity(n, n);
        V = (V * zero_diag_pass(B, 1e-14 * scale)).eval();
    }
    cmat B = V.adjoint() * A * V;
    if (B.diagonal().cwiseAbs().maxCoeff() > tol)
        throw NumericalError("zero_diagonal_unitary: residual diagonal above tolerance");
    return V;
}

} // namespace bispec
