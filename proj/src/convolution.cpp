#include "bispec/convolution.hpp"

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace bispec {

const char* to_string(ConvolutionMethod m)
{
    switch (m) {
    case ConvolutionMethod::Exponential: return "exponential";
    case ConvolutionMethod::Direct: return "direct";
    case ConvolutionMethod::DirectParallel: return "direct_parallel";
    }
    return "?";
}

ConvolutionMethod convolution_method_from_string(const std::string& s)
{
    if (s == "exponential") return ConvolutionMethod::Exponential;
    if (s == "direct") return ConvolutionMethod::Direct;
    if (s == "direct_parallel") return ConvolutionMethod::DirectParallel;
    throw InvalidArgument("unknown convolution method '" + s + "'");
}

namespace {

cmat augmented_A(const StateSpace& ss)
{
    const int d = ss.M.rows();
    cmat A = cmat::Zero(2 * d, 2 * d);
    A.topLeftCorner(d, d) = ss.M;
    A.bottomLeftCorner(d, d) = ss.dM;
    A.bottomRightCorner(d, d) = ss.M;
    return A;
}

} // namespace

ExpStepper make_stepper(const StateSpace& ss, double h)
{
    const int d = ss.M.rows(), m = 2 * d;
    ExpStepper st;
    st.h = h;
    st.w = ss.w;
    st.A = augmented_A(ss);
    st.B = cmat::Zero(m, 1);
    st.B.topRows(d) = ss.w;
    cmat X = cmat::Zero(m + 2, m + 2);
    X.topLeftCorner(m, m) = st.A;
    X.block(0, m, m, 1) = st.B;
    X(m, m + 1) = 1.0;
    cmat E = (X * h).exp();
    st.E11 = E.topLeftCorner(m, m);
    st.E12 = E.block(0, m, m, 1);
    st.E13 = E.block(0, m + 1, m, 1) / h;
    return st;
}

Response respond_exponential(const ExpStepper& st, const cvec& u)
{
    const int n = u.size();
    const int m = st.A.rows(), d = m / 2;
    Response r;
    r.eps.resize(n);
    r.deps.resize(n);
    // bounded sizes keep the inner loop free of heap traffic
    using Vec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, 0, 4, 1>;
    using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 4, 4>;
    Mat E11 = st.E11;
    Vec e12 = st.E12.col(0), e13 = st.E13.col(0), w = st.w, Y = Vec::Zero(m), Yn(m);
    for (int i = 0; i < n; ++i) {
        r.eps(i) = (w.transpose() * Y.head(d)).value();
        r.deps(i) = (w.transpose() * Y.tail(d)).value();
        if (i + 1 < n) {
            Yn.noalias() = E11 * Y;
            Yn += e12 * u(i) + e13 * (u(i + 1) - u(i));
            Y = Yn;
        }
    }
    r.y_end = Y;
    return r;
}

void kernel_samples(const StateSpace& ss, double dt, int n, cvec& f, cvec& df)
{
    const int d = ss.M.rows();
    cmat A = augmented_A(ss);
    cmat step = (A * dt).exp();
    cvec Y = cvec::Zero(2 * d);
    Y.head(d) = ss.w;
    f.resize(n);
    df.resize(n);
    for (int k = 0; k < n; ++k) {
        f(k) = (ss.w.transpose() * Y.head(d))(0);
        df(k) = (ss.w.transpose() * Y.tail(d))(0);
        Y = step * Y;
    }
}

cvec convolve_direct_serial(const cvec& kernel, const cvec& u, double dt)
{
    const int n = u.size();
    cvec out(n);
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            out(0) = 0.0;
            continue;
        }
        cplx s = 0.5 * (kernel(i) * u(0) + kernel(0) * u(i));
        for (int j = 1; j < i; ++j) s += kernel(i - j) * u(j);
        out(i) = s * dt;
    }
    return out;
}

cvec convolve_direct_parallel(const cvec& kernel, const cvec& u, double dt)
{
    const int n = u.size();
    cvec out(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (int i = 0; i < n; ++i) {
        if (i == 0) {
            out(0) = 0.0;
            continue;
        }
        cplx s = 0.5 * (kernel(i) * u(0) + kernel(0) * u(i));
        for (int j = 1; j < i; ++j) s += kernel(i - j) * u(j);
        out(i) = s * dt;
    }
    return out;
}

Response respond_direct(const StateSpace& ss, const TimeGrid& g, const cvec& u, bool parallel)
{
    const int n = g.n, d = ss.M.rows();
    cvec f, df;
    kernel_samples(ss, g.dt, n, f, df);
    Response r;
    r.eps = parallel ? convolve_direct_parallel(f, u, g.dt) : convolve_direct_serial(f, u, g.dt);
    r.deps = parallel ? convolve_direct_parallel(df, u, g.dt) : convolve_direct_serial(df, u, g.dt);

    // Y(T) = int exp(A (T - s)) B u(s) ds by the same trapezoid rule, walking back from T.
    cmat A = augmented_A(ss);
    cmat step = (A * g.dt).exp();
    cvec B = cvec::Zero(2 * d);
    B.head(d) = ss.w;
    cvec acc = cvec::Zero(2 * d), P = B;
    for (int j = n - 1; j >= 0; --j) {
        double wt = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        acc += wt * u(j) * P;
        P = step * P;
    }
    r.y_end = acc * g.dt;
    return r;
}

cmat tail_gram(const cmat& A, const cvec& a, const cvec& b)
{
    const int m = A.rows();
    cmat Id = cmat::Identity(m, m);
    // vec(A^H W + W A) = (I kron A^H + A^T kron I) vec(W)
    cmat L = Eigen::kroneckerProduct(Id, A.adjoint()).eval() + Eigen::kroneckerProduct(A.transpose(), Id).eval();
    cmat C = -(a.conjugate() * b.transpose());
    cvec rhs = Eigen::Map<cvec>(C.data(), m * m);
    cvec x = L.partialPivLu().solve(rhs);
    return Eigen::Map<cmat>(x.data(), m, m);
}

} // namespace bispec
