#pragma once

#include <Eigen/Dense>
#include <complex>

namespace jmb {

using cplx = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

}  // namespace jmb
