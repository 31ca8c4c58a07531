// SPDX-License-Identifier: Apache-2.0
//
// Photon-mediated effective interaction between two spin qudits sharing a
// resonator mode, valid in the dispersive regime. For transitions
// alpha = (a1, a2) of qudit 1 and beta = (b1, b2) of qudit 2:
//
//   H_J = Omega * sum_{alpha,beta} lambda1_alpha lambda2_beta
//         * (1/(E_beta^2 - Omega^2) + 1/(E_alpha^2 - Omega^2))
//         * X1_alpha X2_beta,
//
// with lambda_alpha = G <a1|Sx|a2>, E_alpha = E_a1 - E_a2 and the Hubbard
// operator X_alpha = |a1><a2|. The sum runs over all ordered off-diagonal
// pairs and the result is Hermitian-symmetrized; this choice reproduces the
// second-order dressed-state splitting of the exact spin-photon model (see
// validate_against_full_model, the independent oracle). Diagonal pairs
// (a1 = a2) generate single-qudit dispersive shifts at the same order; they
// are computed separately and never folded into H_J.
#pragma once

#include <utility>

#include "spinqpu/common.hpp"
#include "spinqpu/spin_system.hpp"

namespace spinqpu::cavity {

inline constexpr const char* kModule = "cavity-bus";

struct CavityMode {
  double freq_ghz = 0.0;   // Omega
  double kappa_ghz = 0.0;  // linewidth
  int n_max = 2;           // photon truncation of the exact model

  void validate() const;
};

/// One qudit as seen by the resonator: eigenenergies plus the coupling
/// operator (default Sx) expressed in the eigenbasis, scaled by G.
struct QuditPort {
  RealVec energies_ghz;
  Mat coupling_op;  // eigenbasis matrix elements, dimensionless
  double g_ghz = 0.0;

  int dim() const { return static_cast<int>(energies_ghz.size()); }
  void validate() const;
};

QuditPort make_port(const spin::EigenSystem& eig, double g_ghz);
QuditPort make_port(const spin::EigenSystem& eig, double g_ghz,
                    const Mat& coupling_op_lab_basis);

/// lambda table: lambda(a1, a2) = G <a1|Sx|a2>; conjugate-symmetric.
Mat lambda_coefficients(const QuditPort& port);

enum class SumConvention {
  /// All ordered off-diagonal pairs on both qudits (the oracle-validated
  /// default).
  OffDiagonalPairs,
  /// Raw sum including diagonal "pairs" a1 = a2, which adds
  /// permanent-moment cross terms on top of the default.
  IncludeDiagonal,
};

struct EffectiveCoupling {
  int d1 = 0, d2 = 0;
  Mat h_j;                   // (d1*d2) x (d1*d2), Hermitian, GHz
  RealVec local_shift_1;     // second-order single-qudit shifts, GHz
  RealVec local_shift_2;
  double validity_ratio = 0.0;  // max|lambda| / min| |E_gap| - Omega |
  bool dispersive = false;      // validity_ratio < 1
  double max_lambda_ghz = 0.0;
};

/// Assembles H_J. Throws ContractError when any coupled gap comes closer to
/// the cavity than 10x the largest lambda (quantified dispersive threshold)
/// or when a denominator is singular.
EffectiveCoupling effective_hamiltonian(const QuditPort& q1, const QuditPort& q2,
                                        const CavityMode& cavity,
                                        SumConvention convention =
                                            SumConvention::OffDiagonalPairs);

struct DeviationReport {
  /// Operator-norm deviation of H_J from the projected exact model after
  /// factoring out qudit-local energy shifts.
  double deviation_ghz = 0.0;
  double deviation_relative = 0.0;  // deviation / ||H_J||
  /// Flip-flop coefficient comparison on the lowest transition pair.
  double flip_flop_eq1_ghz = 0.0;
  double flip_flop_exact_ghz = 0.0;
  double flip_flop_rel_error = 0.0;
  double top_photon_population = 0.0;
  bool truncation_warning = false;  // population at n_max-1 exceeds 1e-8
};

/// Exact-diagonalization oracle: builds
/// H = H1 + H2 + Omega a+a + sum_i G_i Sx_i (a + a+), projects the dressed
/// eigenstates adjacent to the zero-photon subspace back onto it (Loewdin
/// orthonormalization) and compares with H_J.
DeviationReport validate_against_full_model(const QuditPort& q1, const QuditPort& q2,
                                            const CavityMode& cavity,
                                            SumConvention convention =
                                                SumConvention::OffDiagonalPairs);

struct SwapGate {
  double gate_time_ns = 0.0;  // 1/(4 |J_pair|)
  double j_pair_ghz = 0.0;    // flip-flop coefficient of the selected pairs
  Mat unitary;                // exp(-i 2 pi H_eff t) on the two-qudit space
  double transfer_population = 0.0;  // |excited,ground> -> |ground,excited>
  double leakage = 0.0;  // population outside the 4-level computational space
};

/// Synthesizes the iSWAP-type gate on level pairs (ground, excited) of each
/// qudit. H_eff includes the bare energies and local shifts, so detuned
/// pairs show suppressed transfer. With enforce_resonance (default) a gap
/// mismatch larger than |J|/10 is a synthesis error.
SwapGate synthesize_swap(const EffectiveCoupling& coupling,
                         const RealVec& energies_1, const RealVec& energies_2,
                         std::pair<int, int> pair1, std::pair<int, int> pair2,
                         bool enforce_resonance = true);

struct FeasibilityReport {
  double g_t2_product = 0.0;    // dimensionless, needs > 1
  double g_over_kappa = 0.0;    // dimensionless, needs > 1
  bool beats_spin_decoherence = false;
  bool beats_cavity_loss = false;
  bool feasible = false;
};

/// Strong-coupling arithmetic: G T2 > 1 and G > kappa (strict).
FeasibilityReport feasibility(double g_ghz, double t2_ns, double kappa_ghz);

}  // namespace spinqpu::cavity
