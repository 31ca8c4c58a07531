// SPDX-License-Identifier: Apache-2.0
//
// Compilation of target Hamiltonians (spin chains, spin-boson models) into
// elementary gate sequences via Suzuki-Trotter splitting, plus the
// switch-mediated controlled-phase primitive and qubit-vs-qudit resource
// accounting for truncated boson modes.
#pragma once

#include <variant>
#include <vector>

#include "spinqpu/common.hpp"
#include "spinqpu/spin_system.hpp"

namespace spinqpu::dqs {

inline constexpr const char* kModule = "dqs-compiler";

enum class ChainKind { XX, XY, Heisenberg, Ising };

/// Uniform open chain of spin-1/2 sites. Bond terms by kind:
/// XX: J(SxSx + SySy); XY: J SxSx + Jy SySy; Heisenberg: J S.S;
/// Ising: J SzSz. The field is longitudinal (h Sz) except for Ising, where
/// it is transverse (h Sx) so that a nonzero field makes the terms
/// non-commuting.
struct SpinChainModel {
  ChainKind kind = ChainKind::Heisenberg;
  int n_sites = 2;
  double j_ghz = 1.0;
  double jy_ghz = 0.0;  // XY only
  double field_ghz = 0.0;
};

/// Rabi model: H = w_m a+a + w_s Sz + g Sx (a + a+), boson truncated to n_b.
struct SpinBosonModel {
  double mode_freq_ghz = 1.0;
  double spin_freq_ghz = 1.0;
  double coupling_ghz = 0.1;
  int n_b = 4;
};

using TargetModel = std::variant<SpinChainModel, SpinBosonModel>;

int model_dimension(const TargetModel& model);
Mat model_hamiltonian(const TargetModel& model);

enum class GateType { SingleQuditRotation, TwoBodyEntangler, SwitchControlledPhase };

struct Gate {
  GateType type = GateType::SingleQuditRotation;
  std::vector<int> targets;
  double angle_rad = 0.0;     // 2*pi*||term||*dt, the largest accumulated phase
  double duration_ns = 0.0;   // angle/(2*pi*rabi); 0 in ideal mode
  int term_id = 0;            // index into term_generators
  double dt_ns = 0.0;         // evolution slice exp(-i 2 pi H_term dt)
};

struct GateSequence {
  int dim = 0;
  std::vector<Mat> term_generators;  // embedded full-space term Hamiltonians
  std::vector<Gate> gates;           // applied first-to-last
  double total_duration_ns = 0.0;
};

/// First-order (product of group exponentials, repeated n times) or
/// symmetrized second-order splitting over the model's non-commuting term
/// groups (odd bonds / even bonds / local fields for chains; local energies
/// vs interaction for spin-boson). Gate durations follow the pi-pulse
/// convention at `gate_rabi_ghz`; ideal=true emits zero durations.
GateSequence trotterize(const TargetModel& model, double t_ns, int n_steps, int order,
                        double gate_rabi_ghz = 0.01, bool ideal = true);

/// Product of the sequence's gate unitaries, first gate applied first.
Mat sequence_unitary(const GateSequence& sequence);

Mat exact_unitary(const TargetModel& model, double t_ns);

/// Spectral-norm error ||U_sequence - U_exact||_2.
double trotter_error(const GateSequence& sequence, const TargetModel& model,
                     double t_ns);

/// Fock states |0..n_b-1> mapped onto the first levels of a spin-S qudit
/// (m descending). The truncated ladder misses [a, a+] = 1 only on the top
/// level, where the commutator equals 1 - n_b.
struct BosonEncoding {
  int n_b = 0;
  int qudit_dim = 0;
  std::vector<int> level_map;  // Fock n -> qudit level index
  Mat a;                       // n_b x n_b truncated annihilation operator
  Mat number;                  // a+a

  /// Operator padded to the qudit dimension (zero on unused levels).
  Mat embed(const Mat& op) const;
};

BosonEncoding boson_qudit_encoding(int n_b, double qudit_spin);

/// Parameters of the qubit-switch-qubit triple. Gaps are the spin-1/2
/// Zeeman splittings; the switch excitation is driven resonantly with the
/// switch transition conditioned on both qubits excited.
struct SwitchParams {
  double qubit1_gap_ghz = 9.0;
  double qubit2_gap_ghz = 11.0;
  double switch_gap_ghz = 30.0;
  double j1_ghz = 0.5;  // qubit1-switch isotropic exchange
  double j2_ghz = 0.5;  // switch-qubit2 isotropic exchange
  double rabi_ghz = 0.02;
};

struct CphaseResult {
  Mat gate;                  // 4x4 in |q1 q2> order, single-qubit phases stripped
  double conditional_phase = 0.0;  // phase on |11> relative to the others
  double entangling_power = 0.0;   // Haar product-state average linear entropy
  double leakage = 0.0;
  double duration_ns = 0.0;
};

/// Simulates the conditional 2*pi excursion of the switch in the rotating
/// frame of the drive (RWA on the drive term only; the full exchange
/// couplings stay). Throws ContractError when a non-target computational
/// state detunes from the drive by less than 10x the Rabi rate (spectral
/// collision, non-selective excitation).
CphaseResult switch_cphase(const SwitchParams& params);

/// Average linear entropy generated from product states, computed exactly
/// over the cardinal-state 2-design on each qubit.
double entangling_power(const Mat& gate_4x4);

struct ResourceEstimate {
  int single_qudit_gates = 0;
  int two_body_entanglers = 0;
  double total_duration_ns = 0.0;
  int hardware_dim = 0;
  int target_dim = 0;
};

struct ResourcePair {
  int n_b = 0;
  ResourceEstimate qudit;
  ResourceEstimate binary;
};

/// Per-Trotter-step gate counts for one spin-boson step under the qudit
/// encoding versus the binary (base-2 Fock labeling) qubit encoding, whose
/// Pauli-string exponentials are decomposed into two-body entanglers
/// (weight-2 string: one entangler; weight w >= 3: 2w-3 via CNOT ladders).
/// Durations use the pi-pulse convention at a nominal 0.01 GHz Rabi rate.
ResourcePair resource_compare(const SpinBosonModel& model);

}  // namespace spinqpu::dqs
