#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace bispec {

using cplx = std::complex<double>;
using cvec = Eigen::VectorXcd;
using rvec = Eigen::VectorXd;
using cmat = Eigen::MatrixXcd;
using rmat = Eigen::MatrixXd;

inline constexpr cplx I{0.0, 1.0};
inline constexpr double pi = 3.14159265358979323846;

// Bad input: wrong kind, out of range, mismatched grids.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A computation ran but could not meet its own tolerance.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter with respect to which derivatives and Fisher information are taken.
enum class Param { Gamma, Omega0, J };

const char* to_string(Param p);
Param param_from_string(const std::string& s);

} // namespace bispec
