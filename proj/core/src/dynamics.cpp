// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace spinqpu::dynamics {

namespace {

Mat vec_to_matrix(const Vec& v, int d) {
  return Eigen::Map<const Mat>(v.data(), d, d);
}

Vec matrix_to_vec(const Mat& m) {
  return Eigen::Map<const Vec>(m.data(), m.size());
}

}  // namespace

int LindbladModel::dim() const {
  if (hamiltonian.rows() > 0) return static_cast<int>(hamiltonian.rows());
  for (const auto& j : jumps)
    if (j.op.rows() > 0) return static_cast<int>(j.op.rows());
  return 0;
}

void LindbladModel::validate() const {
  const int d = dim();
  if (d == 0) throw ValidationError(kModule, "model has no operators");
  if (hamiltonian.rows() > 0) {
    if (hamiltonian.rows() != d || hamiltonian.cols() != d)
      throw ValidationError(kModule, "hamiltonian dimension mismatch");
    require_hermitian(hamiltonian, kModule, 1e-10);
  }
  for (const auto& j : jumps) {
    if (j.rate_ghz < 0.0) throw ValidationError(kModule, "negative jump rate");
    if (j.op.rows() != d || j.op.cols() != d)
      throw ValidationError(kModule, "jump operator dimension mismatch");
  }
}

void check_density_matrix(const Mat& rho) {
  if (std::abs(rho.trace().real() - 1.0) > 1e-9 || std::abs(rho.trace().imag()) > 1e-9)
    throw ContractError(kModule, "density matrix trace deviates from 1");
  if ((rho - rho.adjoint()).norm() > 1e-10 * std::max(1.0, rho.norm()))
    throw ContractError(kModule, "density matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Mat> solver(rho);
  if (solver.eigenvalues().minCoeff() < -1e-8)
    throw ContractError(kModule, "density matrix has a negative eigenvalue");
}

Mat liouvillian(const LindbladModel& model) {
  model.validate();
  const int d = model.dim();
  const Mat id = Mat::Identity(d, d);
  Mat gen = Mat::Zero(d * d, d * d);
  if (model.hamiltonian.rows() > 0) {
    const Mat& h = model.hamiltonian;
    gen += Complex(0.0, -kTwoPi) *
           (Eigen::kroneckerProduct(id, h).eval() -
            Eigen::kroneckerProduct(h.transpose(), id).eval());
  }
  for (const auto& jump : model.jumps) {
    if (jump.rate_ghz == 0.0) continue;
    const Mat& l = jump.op;
    const Mat ldl = l.adjoint() * l;
    // 4*pi*gamma fixes the T2 = 1/(2*pi*gamma) convention (see header).
    const double scale = 2.0 * kTwoPi * jump.rate_ghz;
    gen += scale * (Eigen::kroneckerProduct(l.conjugate(), l).eval() -
                    0.5 * Eigen::kroneckerProduct(id, ldl).eval() -
                    0.5 * Eigen::kroneckerProduct(ldl.transpose(), id).eval());
  }
  return gen;
}

Mat evolve_lindblad(const Mat& rho, const LindbladModel& model, double t_ns) {
  if (t_ns < 0.0) throw ValidationError(kModule, "negative evolution time");
  if (rho.rows() != model.dim() || rho.cols() != model.dim())
    throw ValidationError(kModule, "state dimension does not match model");
  if (t_ns == 0.0) return rho;
  const Mat gen = liouvillian(model);
  const Mat propagator = (gen * t_ns).exp();
  const int d = model.dim();
  return vec_to_matrix(propagator * matrix_to_vec(rho), d);
}

Propagator::Propagator(const LindbladModel& model, double t_ns) : t_ns_(t_ns) {
  if (t_ns < 0.0) throw ValidationError(kModule, "negative evolution time");
  dim_ = model.dim();
  exp_mt_ = (liouvillian(model) * t_ns).exp();
}

Mat Propagator::apply(const Mat& rho) const {
  if (rho.rows() != dim_ || rho.cols() != dim_)
    throw ValidationError(kModule, "state dimension does not match propagator");
  return vec_to_matrix(exp_mt_ * matrix_to_vec(rho), dim_);
}

Mat pulse_hamiltonian(const PulseSpec& pulse, int dim) {
  if (pulse.i < 0 || pulse.j < 0 || pulse.i >= dim || pulse.j >= dim ||
      pulse.i == pulse.j)
    throw ValidationError(kModule, "pulse transition indices out of range");
  if (pulse.duration_ns <= 0.0)
    throw ValidationError(kModule, "finite-duration pulse needs duration > 0");
  const double rabi_ghz = pulse.theta_rad / (kTwoPi * pulse.duration_ns);
  const Complex upper =
      0.5 * rabi_ghz * std::exp(Complex(0.0, -pulse.phi_rad));
  Mat h = Mat::Zero(dim, dim);
  h(pulse.i, pulse.j) = upper;
  h(pulse.j, pulse.i) = std::conj(upper);
  return h;
}

Mat pulse_unitary(const PulseSpec& pulse, int dim) {
  if (pulse.i < 0 || pulse.j < 0 || pulse.i >= dim || pulse.j >= dim ||
      pulse.i == pulse.j)
    throw ValidationError(kModule, "pulse transition indices out of range");
  const double half = 0.5 * pulse.theta_rad;
  const Complex off = Complex(0.0, -1.0) * std::sin(half) *
                      std::exp(Complex(0.0, -pulse.phi_rad));
  Mat u = Mat::Identity(dim, dim);
  u(pulse.i, pulse.i) = std::cos(half);
  u(pulse.j, pulse.j) = std::cos(half);
  u(pulse.i, pulse.j) = off;
  u(pulse.j, pulse.i) = Complex(0.0, -1.0) * std::sin(half) *
                        std::exp(Complex(0.0, pulse.phi_rad));
  return u;
}

Mat apply_pulse(const Mat& rho, const PulseSpec& pulse, const LindbladModel& model,
                bool ideal) {
  const int d = model.dim() > 0 ? model.dim() : static_cast<int>(rho.rows());
  if (rho.rows() != d || rho.cols() != d)
    throw ValidationError(kModule, "state dimension does not match model");
  if (ideal || pulse.duration_ns == 0.0) {
    const Mat u = pulse_unitary(pulse, d);
    return u * rho * u.adjoint();
  }
  LindbladModel driven;
  driven.hamiltonian = pulse_hamiltonian(pulse, d);
  driven.jumps = model.jumps;
  return evolve_lindblad(rho, driven, pulse.duration_ns);
}

double fidelity(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw ValidationError(kModule, "fidelity: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> rho_eig(rho);
  RealVec vals = rho_eig.eigenvalues().cwiseMax(0.0);
  const Mat sqrt_rho = rho_eig.eigenvectors() *
                       vals.cwiseSqrt().asDiagonal() *
                       rho_eig.eigenvectors().adjoint();
  Eigen::SelfAdjointEigenSolver<Mat> inner(sqrt_rho * sigma * sqrt_rho);
  const double root_sum = inner.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  const double f = root_sum * root_sum;
  return std::clamp(f, 0.0, 1.0);
}

double purity(const Mat& rho) { return (rho * rho).trace().real(); }

}  // namespace spinqpu::dynamics
