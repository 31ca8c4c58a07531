// SPDX-License-Identifier: Apache-2.0
//
// Addressable-transition analysis of a spin qudit: which resonant
// transitions can be driven individually, how fast any eigenstate can be
// mapped to any other through pulse sequences, and whether the whole
// spectrum is universal within the coherence time.
#pragma once

#include <vector>

#include "spinqpu/common.hpp"
#include "spinqpu/spin_system.hpp"

namespace spinqpu::transitions {

inline constexpr const char* kModule = "transitions";

/// One row per unordered eigenstate pair (i < j).
struct TransitionRow {
  int i = 0;
  int j = 0;
  double freq_ghz = 0.0;  // E_j - E_i >= 0
  double rabi_ghz = 0.0;  // drive_amplitude * |<i|drive|j>|
};

struct TransitionTable {
  std::vector<TransitionRow> rows;
  double drive_amplitude_ghz = 0.0;
};

/// Rabi rates for every pair from the drive operator expressed in the lab
/// basis (it is rotated into the eigenbasis here). Selection rules emerge
/// from the matrix elements.
TransitionTable transition_table(const spin::EigenSystem& eig, const Mat& drive_op,
                                 double drive_amplitude_ghz);

/// Convenience overload using the system's total Sx as drive operator.
TransitionTable transition_table(const spin::SpinSystemSpec& spec,
                                 const spin::EigenSystem& eig,
                                 double drive_amplitude_ghz);

struct Edge {
  int i = 0;
  int j = 0;
  double pulse_time_ns = 0.0;  // pi-pulse: 1/(2 rabi)
};

struct TransitionGraph {
  int n_nodes = 0;
  std::vector<Edge> edges;
  double omega_r_ghz = 0.0;  // isolation threshold used
  double t2_ns = 0.0;        // rabi threshold used (edge needs rabi >= 1/T2)
  /// Smallest frequency separation among rabi-nonzero transitions.
  double min_isolation_ghz = 0.0;
  /// Number of rabi-nonzero transition pairs closer than omega_r.
  int degenerate_pair_count = 0;
};

/// An edge survives iff (a) rabi >= 1/t2 and (b) its frequency differs by
/// more than omega_r from every other transition whose rabi exceeds
/// 1e-6 * drive_amplitude. A rabi-nonzero but spectrally crowded line blocks
/// its neighbours even if it is itself too weak to drive.
TransitionGraph addressable_edges(const TransitionTable& table, double omega_r_ghz,
                                  double t2_ns);

/// All-pairs operation rates W[n][m] = 1 / (shortest total pulse time from
/// n to m). Unreachable pairs have reachable=false and W=0; the diagonal is
/// the identity operation, marked with W=+infinity.
struct RateMatrix {
  RealMat w_ghz;
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> reachable;
};

RateMatrix operation_rates(const TransitionGraph& graph);

struct Universality {
  double u_param = 0.0;    // T2 * W_min over off-diagonal pairs; 0 if any pair unreachable
  double w_min_ghz = 0.0;  // 0 if any pair unreachable
  bool universal = false;  // strict: u_param > 1
};

Universality universality_parameter(const RateMatrix& rates, double t2_ns);

struct SweepPoint {
  double b_tesla = 0.0;
  double u_param = 0.0;
  bool universal = false;
  int n_edges = 0;
  double min_isolation_ghz = 0.0;
  int degenerate_pair_count = 0;
};

/// One universality analysis per field value. Field values scale the spec's
/// field direction (z when the spec field is zero). Points are independent
/// and computed in parallel when threads > 1; results are ordered as the
/// input values.
std::vector<SweepPoint> field_sweep(const spin::SpinSystemSpec& spec,
                                    const std::vector<double>& b_tesla,
                                    double drive_amplitude_ghz, double omega_r_ghz,
                                    double t2_ns, int threads = 1);

}  // namespace spinqpu::transitions
