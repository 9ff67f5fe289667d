#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace subrad {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid chain, run or tolerance configuration.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// An iterative solver (eigensolver, Newton, quadrature) failed to reach its target.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, int iterations, double achieved)
      : Error(what), iterations_(iterations), achieved_(achieved) {}

  int iterations() const noexcept { return iterations_; }
  double achieved() const noexcept { return achieved_; }

private:
  int iterations_;
  double achieved_;
};

/// Subradiant mode families: quasi-momentum near the zone center or the zone edge.
enum class Branch { Center, Edge };

inline const char* to_string(Branch b) { return b == Branch::Center ? "center" : "edge"; }

} // namespace subrad
