// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spinqpu {

inline constexpr const char* kVersion = "0.1.0";

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

/// Unit conventions used throughout: energies are ordinary frequencies in
/// GHz (E/h), times in ns, magnetic fields in tesla. Unitary evolution is
/// exp(-i 2*pi H t) with H in GHz and t in ns.
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Electron Zeeman conversion mu_B/h in GHz per tesla.
inline constexpr double kGhzPerTesla = 13.9962;

/// Hard cap on dense Hilbert-space dimension.
inline constexpr int kMaxDimension = 4096;

/// Base error carrying the module that raised it; what() is
/// "<module>: <message>".
class Error : public std::runtime_error {
 public:
  Error(std::string_view module, std::string_view message)
      : std::runtime_error(std::string(module) + ": " + std::string(message)),
        module_(module) {}
  const std::string& module() const noexcept { return module_; }

 private:
  std::string module_;
};

/// Malformed or out-of-range input (schema violations, bad spins, bad
/// indices). The CLI maps this to exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A physics contract could not be met (non-Hermitian input, dispersive
/// threshold violated, code capacity exceeded, unaddressable protocol).
/// The CLI maps this to exit status 3.
class ContractError : public Error {
 public:
  using Error::Error;
};

inline bool is_half_integer(double s) {
  const double twice = 2.0 * s;
  return twice >= 0.0 && std::abs(twice - std::round(twice)) < 1e-9;
}

inline double hermiticity_defect(const Mat& m) {
  const double norm = m.norm();
  if (norm == 0.0) return 0.0;
  return (m - m.adjoint()).norm() / norm;
}

inline void require_hermitian(const Mat& m, std::string_view module,
                              double tol = 1e-12) {
  if (hermiticity_defect(m) > tol)
    throw ContractError(module, "matrix is not Hermitian within tolerance");
}

/// Runs fn(0..n-1), splitting the index range over up to `threads` workers.
/// Each index is visited exactly once; callers write results by index so the
/// output does not depend on the thread count.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace spinqpu
