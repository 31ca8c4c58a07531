// SPDX-License-Identifier: Apache-2.0
//
// Open-system time evolution on density matrices.
//
// Master equation (time-independent segments, propagated exactly through
// the matrix exponential of the vectorized generator):
//
//   drho/dt = -i 2*pi [H, rho]
//           + sum_k 4*pi gamma_k (L_k rho L_k^+ - 1/2 {L_k^+ L_k, rho})
//
// with H in GHz, t in ns and jump rates gamma_k quoted in GHz. The
// dissipator prefactor fixes the rate convention used everywhere in this
// project: with the collective dephasing operator L = Sz, the (m, m')
// coherence decays at 2*pi*gamma*(m - m')^2 per ns, so a spin-1/2 dephases
// as exp(-t/T2) with T2 = 1/(2*pi*gamma).
#pragma once

#include <vector>

#include "spinqpu/common.hpp"

namespace spinqpu::dynamics {

inline constexpr const char* kModule = "dynamics";

/// gamma (GHz) <-> T2 (ns) bridge for the Sz dephasing convention above.
inline double dephasing_rate_for_t2(double t2_ns) { return 1.0 / (kTwoPi * t2_ns); }
inline double t2_for_dephasing_rate(double gamma_ghz) {
  return 1.0 / (kTwoPi * gamma_ghz);
}

struct JumpOperator {
  Mat op;
  double rate_ghz = 0.0;
};

struct LindbladModel {
  Mat hamiltonian;  // GHz; may be zero-sized for a free dephasing model
  std::vector<JumpOperator> jumps;

  int dim() const;
  void validate() const;
};

/// Density-matrix contract: unit trace to 1e-9, Hermitian to 1e-10,
/// eigenvalues >= -1e-8. Throws ContractError on violation.
void check_density_matrix(const Mat& rho);

/// Vectorized generator M with d^2 x d^2 entries acting on column-stacked
/// rho, i.e. vec(rho(t)) = exp(M t) vec(rho(0)).
Mat liouvillian(const LindbladModel& model);

Mat evolve_lindblad(const Mat& rho, const LindbladModel& model, double t_ns);

/// Precomputed propagator for repeated application of the same segment.
class Propagator {
 public:
  Propagator(const LindbladModel& model, double t_ns);
  Mat apply(const Mat& rho) const;
  double duration_ns() const { return t_ns_; }

 private:
  Mat exp_mt_;
  double t_ns_;
  int dim_;
};

/// Resonant square pulse driving a rotation by `theta` about the axis
/// cos(phi) x + sin(phi) y of the (i, j) two-level subspace. The pulse is
/// simulated in the interaction picture of the model Hamiltonian: the drive
/// term is the only Hamiltonian and the jump operators act unchanged during
/// the pulse (exact for jump operators diagonal in the model eigenbasis).
/// carrier_ghz is bookkeeping for addressability checks.
struct PulseSpec {
  int i = 0;
  int j = 1;
  double theta_rad = 3.141592653589793;
  double phi_rad = 0.0;
  double duration_ns = 0.0;  // 0 = ideal instantaneous unitary
  double carrier_ghz = 0.0;
};

/// Exact unitary implemented by the pulse (the ideal-pulse limit).
Mat pulse_unitary(const PulseSpec& pulse, int dim);

/// Drive Hamiltonian of the pulse in the rotating frame; Rabi rate is
/// theta/(2*pi*duration) so a pi rotation takes 1/(2*rabi).
Mat pulse_hamiltonian(const PulseSpec& pulse, int dim);

/// Applies the pulse to rho. With ideal=true (or zero duration) the exact
/// unitary is used; otherwise the drive runs as a Lindblad segment with the
/// model's jump operators active for the pulse duration.
Mat apply_pulse(const Mat& rho, const PulseSpec& pulse, const LindbladModel& model,
                bool ideal = false);

/// Uhlmann fidelity F(rho, sigma) = (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2;
/// equals <psi|rho|psi> for pure sigma.
double fidelity(const Mat& rho, const Mat& sigma);

double purity(const Mat& rho);

}  // namespace spinqpu::dynamics
