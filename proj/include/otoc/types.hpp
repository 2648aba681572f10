#pragma once

#include <Eigen/Dense>

#include <complex>
#include <map>
#include <string>

namespace otoc {

using Eigen::Index;
using cplx = std::complex<double>;

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

using Metadata = std::map<std::string, std::string>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// OTOC samples on a uniform time grid. For maps the grid is the integer
// iteration count, for spin chains it is physical time with hbar = 1.
struct OtocSeries {
  RealVector times;
  RealVector values;
  double dt = 1.0;
  Metadata metadata;

  Index size() const { return values.size(); }
};

// A single scalar chaos indicator plus the context it was computed in.
struct IndicatorResult {
  std::string name;
  double value = 0.0;
  double residual = 0.0;
  int iterations = 0;
  Metadata context;
};

}  // namespace otoc
