// SPDX-License-Identifier: Apache-2.0
//
// Dephasing-robust qudit codes and their detect-and-correct cycle.
//
// Code words live in the Sz eigenbasis of a spin-S qudit (basis index
// 0..d-1 ordered by descending m) and protect against the error set
// {1, Sz, ..., Sz^k}. With the real-amplitude, parity-symmetric ansatz
// |1_L> = (m -> -m) flip of |0_L>, supports restricted to alternating m
// values, the Knill-Laflamme conditions reduce to vanishing odd moments
// sum_m w_m m^p = 0 (p odd <= 2k) of the weights w_m = c_m^2, which is
// solved as a nonnegative least-norm problem.
//
// The correction cycle uses a spin-1/2 electronic ancilla: a decoding
// unitary (compiled to two-level Givens pulses) maps logical and error
// words onto bare qudit levels, conditional ancilla pi-pulses flag the
// error levels, the ancilla is measured projectively, and per-syndrome
// recovery returns the state to the code space. Pulse simulation runs in
// the interaction picture of the static Hamiltonian; level energies enter
// only through the pulse carrier frequencies used for the addressability
// check.
#pragma once

#include <vector>

#include "spinqpu/common.hpp"
#include "spinqpu/dynamics.hpp"
#include "spinqpu/spin_system.hpp"

namespace spinqpu::qec {

inline constexpr const char* kModule = "qec";

struct QuditCode {
  double spin = 0.0;
  int order = 0;               // highest corrected power k of Sz
  RealVec word0, word1;        // amplitudes in the Sz basis (m descending)
  std::vector<Mat> error_set;  // {I, Sz, ..., Sz^k}
  double kl_residual = 0.0;

  int dim() const { return static_cast<int>(word0.size()); }
};

/// Solves for code words of a spin-s qudit correcting {1, Sz, .., Sz^order}.
/// Requires 2s+1 >= 2(order+1) and half-integer s (the parity ansatz needs
/// the two supports disjoint, which fails for integer s). Underdetermined
/// systems are resolved deterministically by the minimum-norm nonnegative
/// weight solution.
QuditCode solve_code_words(double s, int order);

/// Independent Knill-Laflamme check: max over (a, b, p, q) of
/// |<a_L|E_p^+ E_q|b_L> - c_pq delta_ab| with c_pq fitted as the mean of
/// the two diagonal values. Shares no code with the solver.
double check_knill_laflamme(const QuditCode& code);

/// Level energies of the qudit (x) ancilla system. Row = qudit level
/// (m descending, matching the code basis), column = ancilla state
/// (0 = electronic ground, 1 = excited).
struct AncillaQuditSystem {
  int qudit_dim = 0;
  RealMat level_energy_ghz;  // qudit_dim x 2
};

/// Synthetic system H = w_e Sz_e + A Iz Sz_e + p Iz^2 + w_n Iz (hyperfine
/// flip-flop terms dropped).
AncillaQuditSystem ancilla_system_from_params(double s, double electron_gap_ghz,
                                              double hyperfine_a_ghz,
                                              double quadrupole_p_ghz,
                                              double nuclear_zeeman_ghz);

/// Extracts the level table from a one-site molecule (electronic spin 1/2
/// with an attached nuclear qudit) assembled and diagonalized by spin-core.
/// Eigenstates are identified by their <Iz>, <Sz_e> labels; throws
/// ContractError if mixing makes the labels ambiguous.
AncillaQuditSystem ancilla_system_from_molecule(const spin::SpinSystemSpec& spec);

struct ProtocolPulse {
  enum class Kind { Rotation, PhaseFlip };
  Kind kind = Kind::Rotation;
  int i = 0;  // composite indices: qudit_level * 2 + ancilla
  int j = 0;  // unused for PhaseFlip
  double theta_rad = 0.0;
  double phi_rad = 0.0;
  double duration_ns = 0.0;  // PhaseFlips are virtual (always zero)
  double carrier_ghz = 0.0;
};

struct QecProtocol {
  int qudit_dim = 0;
  int order = 0;
  double pulse_rabi_ghz = 0.0;
  double ancilla_t2_ns = 0.0;  // <= 0 disables ancilla dephasing
  std::vector<ProtocolPulse> decode;                // code/error words -> bare levels
  std::vector<std::vector<ProtocolPulse>> flag;     // per syndrome: conditional ancilla pi-pulses
  std::vector<std::vector<ProtocolPulse>> reset;    // per syndrome: ancilla return pulses
  std::vector<std::vector<ProtocolPulse>> shift;    // per syndrome: error level -> code level
  std::vector<ProtocolPulse> encode;                // inverse of decode
  Mat syndrome_basis0, syndrome_basis1;  // columns: |a,s>, s = 0..order
  double duration_ns = 0.0;              // sum over all pulse tables
};

/// Builds the pulse tables for the full cycle. Throws ContractError when two
/// distinct protocol transitions are spectrally closer than pulse_rabi_ghz.
QecProtocol build_protocol(const QuditCode& code, const AncillaQuditSystem& system,
                           double ancilla_t2_ns, double pulse_rabi_ghz);

/// Runs one detect-and-correct cycle on a composite (qudit (x) ancilla)
/// density matrix, branching over ancilla measurement outcomes. With
/// ideal_pulses every pulse is an instantaneous unitary; otherwise qudit and
/// ancilla dephasing act during the pulse durations.
Mat run_protocol(const Mat& rho_composite, const QecProtocol& protocol,
                 double qudit_t2_ns, bool ideal_pulses);

/// Precompiled executor reused across memory times and input states.
class ProtocolExecutor {
 public:
  ProtocolExecutor(const QecProtocol& protocol, double qudit_t2_ns,
                   bool ideal_pulses);
  Mat run(const Mat& rho_composite) const;
  const dynamics::LindbladModel& memory_model() const { return memory_model_; }

 private:
  Mat apply(const Mat& rho, const ProtocolPulse& pulse) const;
  Mat apply_list(Mat rho, const std::vector<ProtocolPulse>& pulses) const;

  const QecProtocol& protocol_;
  bool ideal_;
  dynamics::LindbladModel memory_model_;  // jumps only, H = 0
  std::vector<std::pair<const ProtocolPulse*, dynamics::Propagator>> cache_;
};

/// Embeds a logical qubit state alpha|0_L> + beta|1_L> in the qudit space.
Vec logical_state(const QuditCode& code, Complex alpha, Complex beta);

/// The six cardinal logical states |0>, |1>, |+>, |->, |+i>, |-i>.
std::vector<Vec> cardinal_logical_states(const QuditCode& code);

struct GainPoint {
  double t_over_t2 = 0.0;
  double corrected_error = 0.0;  // E, averaged over the cardinal states
  double spin_half_error = 0.0;  // E_1/2, identical T2, no correction
  double gain = 0.0;             // R = E_1/2 / E
};

/// Memory benchmark of Fig.-3c type: store each cardinal state for time T,
/// run the correction cycle, average E = 1 - F; reference is an unprotected
/// spin-1/2 under the same T2 with no correction.
std::vector<GainPoint> memory_gain_curve(const QuditCode& code,
                                         const QecProtocol& protocol, double t2_ns,
                                         const std::vector<double>& t_over_t2,
                                         bool ideal_pulses, int threads = 1);

// --- three-qubit phase-flip block code -----------------------------------

struct PhaseFlipResult {
  Mat logical_out;  // 2x2
  double fidelity = 0.0;
  bool success = false;  // fidelity > 1 - 1e-9
};

/// Encode -> deterministic Z errors on `z_qubits` (a correlated multi-qubit
/// event when `correlated`, equivalent unitarily to the independent product)
/// -> stabilizer syndrome extraction -> majority correction -> decode.
PhaseFlipResult phase_flip_3q(const Mat& rho_logical, const std::vector<int>& z_qubits,
                              bool correlated = false);

/// Logical error 1 - F of |+_L> under independent per-qubit Z channels with
/// probability p, after one correction cycle (3p^2 - 2p^3 exactly).
double phase_flip_logical_error(double p_per_qubit);

}  // namespace spinqpu::qec
