#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace afdm {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kSpeedOfLight = 3.0e8;

// Bad configuration or inconsistent sizes. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parameter outside the domain of an operation (gcd violation, r out of range, ...).
struct ParameterError : ConfigError {
  using ConfigError::ConfigError;
};

// Singular or ill-conditioned linear algebra. Exit code 3.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Domain { daft, time };

// exp(j*2*pi*phase)
inline cd cis(double phase) {
  return {std::cos(kTwoPi * phase), std::sin(kTwoPi * phase)};
}

inline int pos_mod(long long a, long long n) {
  long long r = a % n;
  return static_cast<int>(r < 0 ? r + n : r);
}

}  // namespace afdm
