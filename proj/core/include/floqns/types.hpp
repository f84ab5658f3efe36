#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace floqns {

using Real = double;
using Cplx = std::complex<double>;

using VecR = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;
using MatR = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;

inline constexpr Real pi = 3.14159265358979323846;
inline constexpr Cplx iu{0.0, 1.0};

// packed unknown (phi on the full grid, then each w component on interior nodes)
using DofR = Eigen::VectorXd;
using DofC = Eigen::VectorXcd;

// one period of uniformly sampled packed vectors; sample k sits at t = k/size()
template <class V>
using TimeSamples = std::vector<V>;

} // namespace floqns
