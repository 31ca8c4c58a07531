// SPDX-License-Identifier: Apache-2.0
//
// Construction and diagonalization of molecular spin Hamiltonians.
//
// A system is a list of spin sites (each an electronic spin with optional
// anisotropy and an optional hyperfine-coupled nuclear spin) plus isotropic
// exchange couplings and a static magnetic field. Per-site Hamiltonian:
//
//   H_site = gamma * (gx Bx Sx + gy By Sy + gz Bz Sz)
//          + D Sz^2 + E (Sx^2 - Sy^2)
//          + A S.I + p Iz^2            (if a nuclear spin is attached)
//
// with gamma = mu_B/h = 13.9962 GHz/T, plus sum_ij J_ij S_i.S_j between
// electronic spins. All terms are embedded by tensor products in site order;
// a site with nuclear spin occupies a (2S+1)(2I+1)-dimensional factor ordered
// electronic (x) nuclear.
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "spinqpu/common.hpp"

namespace spinqpu::spin {

inline constexpr const char* kModule = "spin-core";

/// Ladder and Cartesian angular-momentum matrices for a single spin.
/// Basis ordered by descending magnetic quantum number m = S, S-1, ..., -S.
struct SpinOperators {
  Mat sx, sy, sz, sp, sm;
  int dim = 0;
};

/// Standard angular-momentum algebra: Sz = diag(S..-S),
/// (S+-)|m> = sqrt(S(S+1) - m(m+-1)) |m+-1>, Sx = (S+ + S-)/2,
/// Sy = (S+ - S-)/(2i). Throws ValidationError unless 2S is a nonnegative
/// integer.
SpinOperators spin_operators(double s);

struct NuclearSpin {
  double spin = 0.5;   // I, half-integer
  double a_ghz = 0.0;  // isotropic hyperfine A S.I
  double p_ghz = 0.0;  // quadrupole p Iz^2
};

struct SpinSite {
  double spin = 0.5;                       // electronic S, half-integer
  std::array<double, 3> g{2.0, 2.0, 2.0};  // diagonal g tensor
  double d_ghz = 0.0;                      // axial anisotropy D
  double e_ghz = 0.0;                      // rhombic anisotropy E
  std::optional<NuclearSpin> nuclear;

  int dimension() const;
  /// Validates the site invariants; `site_index` is used in error messages.
  void validate(int site_index) const;
};

struct Coupling {
  int site_i = 0;
  int site_j = 0;
  double j_ghz = 0.0;  // isotropic exchange J S_i.S_j
};

struct SpinSystemSpec {
  std::vector<SpinSite> sites;
  std::vector<Coupling> couplings;
  Eigen::Vector3d field_tesla{0.0, 0.0, 0.0};

  long dimension() const;
  void validate() const;
};

/// H in GHz for the full system; Hermitian by construction and checked to
/// 1e-12 relative Frobenius norm. Throws ValidationError on an invalid spec
/// and ContractError when the dimension exceeds kMaxDimension.
Mat build_hamiltonian(const SpinSystemSpec& spec);

/// identity (x) ... (x) op (x) ... (x) identity with op at `site_index`.
/// op must match the site dimension (including the nuclear factor).
Mat embed_operator(const Mat& op, int site_index, const SpinSystemSpec& spec);

/// Total Sz / Sx over all sites, electronic plus nuclear, embedded in the
/// full space. total_sx is the magnetic-dipole drive operator used by the
/// transitions module.
Mat total_sz(const SpinSystemSpec& spec);
Mat total_sx(const SpinSystemSpec& spec);

/// Sorted eigendecomposition of a Hermitian matrix.
struct EigenSystem {
  RealVec energies_ghz;  // ascending
  Mat states;            // eigenvectors as columns, orthonormal
  RealVec sz_labels;     // <Sz_total> per eigenstate (zero without context)

  int dim() const { return static_cast<int>(energies_ghz.size()); }
};

/// Plain ascending eigendecomposition; labels are left at zero.
EigenSystem diagonalize(const Mat& hamiltonian);

/// Eigendecomposition with deterministic treatment of degeneracies: inside
/// every cluster of eigenvalues closer than 1e-9 GHz, sz_total is
/// sub-diagonalized and the states ordered by descending <Sz>. Column phases
/// are fixed by making the largest-magnitude component real positive.
EigenSystem diagonalize(const Mat& hamiltonian, const Mat& sz_total);

/// build + diagonalize with <Sz> labels from the spec.
EigenSystem system_eigensystem(const SpinSystemSpec& spec);

}  // namespace spinqpu::spin
