// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/cavity_bus.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace spinqpu::cavity {

void CavityMode::validate() const {
  if (freq_ghz <= 0.0) throw ValidationError(kModule, "cavity frequency must be positive");
  if (kappa_ghz < 0.0) throw ValidationError(kModule, "kappa must be nonnegative");
  if (n_max < 2) throw ValidationError(kModule, "photon truncation must be at least 2");
}

void QuditPort::validate() const {
  if (energies_ghz.size() < 2) throw ValidationError(kModule, "qudit needs >= 2 levels");
  if (coupling_op.rows() != dim() || coupling_op.cols() != dim())
    throw ValidationError(kModule, "coupling operator dimension mismatch");
  if (g_ghz < 0.0) throw ValidationError(kModule, "coupling G must be nonnegative");
  require_hermitian(coupling_op, kModule, 1e-10);
}

QuditPort make_port(const spin::EigenSystem& eig, double g_ghz) {
  // Default coupling operator: Sx of the matching spin in the eigenbasis.
  const double s = 0.5 * (eig.dim() - 1);
  const auto ops = spin::spin_operators(s);
  return make_port(eig, g_ghz, ops.sx);
}

QuditPort make_port(const spin::EigenSystem& eig, double g_ghz,
                    const Mat& coupling_op_lab_basis) {
  QuditPort port;
  port.energies_ghz = eig.energies_ghz;
  port.coupling_op = eig.states.adjoint() * coupling_op_lab_basis * eig.states;
  port.g_ghz = g_ghz;
  port.validate();
  return port;
}

Mat lambda_coefficients(const QuditPort& port) {
  port.validate();
  return port.g_ghz * port.coupling_op;
}

namespace {

// Smallest | |E_a1 - E_a2| - Omega | over pairs that actually couple.
double dispersive_margin(const QuditPort& port, double omega, double lambda_floor) {
  const Mat lambda = lambda_coefficients(port);
  double margin = std::numeric_limits<double>::infinity();
  for (int a1 = 0; a1 < port.dim(); ++a1) {
    for (int a2 = 0; a2 < port.dim(); ++a2) {
      if (a1 == a2) continue;
      if (std::abs(lambda(a1, a2)) <= lambda_floor) continue;
      const double gap = std::abs(port.energies_ghz[a1] - port.energies_ghz[a2]);
      margin = std::min(margin, std::abs(gap - omega));
    }
  }
  return margin;
}

RealVec local_dispersive_shifts(const QuditPort& port, double omega) {
  const Mat lambda = lambda_coefficients(port);
  RealVec shift = RealVec::Zero(port.dim());
  for (int a = 0; a < port.dim(); ++a) {
    for (int b = 0; b < port.dim(); ++b) {
      if (a == b) continue;
      const double num = std::norm(lambda(b, a));
      shift[a] += num / (port.energies_ghz[a] - port.energies_ghz[b] - omega);
    }
  }
  return shift;
}

}  // namespace

EffectiveCoupling effective_hamiltonian(const QuditPort& q1, const QuditPort& q2,
                                        const CavityMode& cavity,
                                        SumConvention convention) {
  q1.validate();
  q2.validate();
  cavity.validate();
  const double omega = cavity.freq_ghz;
  const int d1 = q1.dim(), d2 = q2.dim();

  const Mat lambda1 = lambda_coefficients(q1);
  const Mat lambda2 = lambda_coefficients(q2);
  const double max_lambda =
      std::max(lambda1.cwiseAbs().maxCoeff(), lambda2.cwiseAbs().maxCoeff());

  const double lambda_floor = 1e-12 * std::max(max_lambda, 1e-300);
  const double margin = std::min(dispersive_margin(q1, omega, lambda_floor),
                                 dispersive_margin(q2, omega, lambda_floor));
  if (max_lambda > 0.0 && margin < 10.0 * max_lambda)
    throw ContractError(kModule,
                        "dispersive threshold violated: a coupled gap is within "
                        "10x max|lambda| of the cavity frequency");

  EffectiveCoupling out;
  out.d1 = d1;
  out.d2 = d2;
  out.max_lambda_ghz = max_lambda;
  out.validity_ratio = std::isfinite(margin) && margin > 0.0 ? max_lambda / margin : 0.0;
  out.dispersive = out.validity_ratio < 1.0;
  out.local_shift_1 = local_dispersive_shifts(q1, omega);
  out.local_shift_2 = local_dispersive_shifts(q2, omega);

  const bool with_diagonal = convention == SumConvention::IncludeDiagonal;
  Mat h = Mat::Zero(d1 * d2, d1 * d2);
  for (int a1 = 0; a1 < d1; ++a1) {
    for (int a2 = 0; a2 < d1; ++a2) {
      if (!with_diagonal && a1 == a2) continue;
      const Complex l1 = lambda1(a1, a2);
      if (std::abs(l1) <= lambda_floor) continue;
      const double e_alpha = q1.energies_ghz[a1] - q1.energies_ghz[a2];
      const double den_alpha = e_alpha * e_alpha - omega * omega;
      if (std::abs(den_alpha) < 1e-12)
        throw ContractError(kModule, "singular denominator: |E^2 - Omega^2| ~ 0");
      for (int b1 = 0; b1 < d2; ++b1) {
        for (int b2 = 0; b2 < d2; ++b2) {
          if (!with_diagonal && b1 == b2) continue;
          const Complex l2 = lambda2(b1, b2);
          if (std::abs(l2) <= lambda_floor) continue;
          const double e_beta = q2.energies_ghz[b1] - q2.energies_ghz[b2];
          const double den_beta = e_beta * e_beta - omega * omega;
          if (std::abs(den_beta) < 1e-12)
            throw ContractError(kModule, "singular denominator: |E^2 - Omega^2| ~ 0");
          const Complex coeff =
              omega * l1 * l2 * (1.0 / den_beta + 1.0 / den_alpha);
          // X1 (x) X2 places the amplitude at |a1 b1><a2 b2|.
          h(a1 * d2 + b1, a2 * d2 + b2) += coeff;
        }
      }
    }
  }
  out.h_j = 0.5 * (h + h.adjoint());
  return out;
}

DeviationReport validate_against_full_model(const QuditPort& q1, const QuditPort& q2,
                                            const CavityMode& cavity,
                                            SumConvention convention) {
  q1.validate();
  q2.validate();
  cavity.validate();
  const int d1 = q1.dim(), d2 = q2.dim(), np = cavity.n_max;
  const long total = static_cast<long>(d1) * d2 * np;
  if (total > kMaxDimension)
    throw ValidationError(kModule, "exact model dimension " + std::to_string(total) +
                                       " exceeds cap " + std::to_string(kMaxDimension));

  // Exact Hamiltonian on qudit1 (x) qudit2 (x) photons.
  Mat a = Mat::Zero(np, np);
  for (int n = 0; n + 1 < np; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
  const Mat x_photon = a + a.adjoint();
  Mat number = Mat::Zero(np, np);
  for (int n = 0; n < np; ++n) number(n, n) = n;

  const Mat i1 = Mat::Identity(d1, d1), i2 = Mat::Identity(d2, d2),
            ip = Mat::Identity(np, np);
  Mat e1 = Mat::Zero(d1, d1), e2 = Mat::Zero(d2, d2);
  e1.diagonal() = q1.energies_ghz.cast<Complex>();
  e2.diagonal() = q2.energies_ghz.cast<Complex>();

  auto kron3 = [](const Mat& x, const Mat& y, const Mat& z) {
    return Eigen::kroneckerProduct(x, Eigen::kroneckerProduct(y, z).eval()).eval();
  };
  Mat h_full = kron3(e1, i2, ip) + kron3(i1, e2, ip) +
               cavity.freq_ghz * kron3(i1, i2, number) +
               q1.g_ghz * kron3(q1.coupling_op, i2, x_photon) +
               q2.g_ghz * kron3(i1, q2.coupling_op, x_photon);

  Eigen::SelfAdjointEigenSolver<Mat> solver(h_full);
  if (solver.info() != Eigen::Success)
    throw ContractError(kModule, "exact-model eigendecomposition failed");

  // Zero-photon weight of every eigenvector; keep the d1*d2 best.
  const int n_sub = d1 * d2;
  std::vector<double> weight(total), top_pop(total);
  for (long k = 0; k < total; ++k) {
    double w0 = 0.0, wtop = 0.0;
    for (int i = 0; i < n_sub; ++i) {
      w0 += std::norm(solver.eigenvectors()(i * np + 0, k));
      wtop += std::norm(solver.eigenvectors()(i * np + (np - 1), k));
    }
    weight[k] = w0;
    top_pop[k] = wtop;
  }
  std::vector<long> order(total);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](long x, long y) { return weight[x] > weight[y]; });

  Mat projected(n_sub, n_sub);
  RealVec dressed_energy(n_sub);
  DeviationReport report;
  for (int c = 0; c < n_sub; ++c) {
    const long k = order[c];
    for (int i = 0; i < n_sub; ++i) projected(i, c) = solver.eigenvectors()(i * np, k);
    dressed_energy[c] = solver.eigenvalues()[k];
    report.top_photon_population = std::max(report.top_photon_population, top_pop[k]);
  }
  report.truncation_warning = report.top_photon_population > 1e-8;

  // Loewdin orthonormalization of the projected dressed states.
  Eigen::JacobiSVD<Mat> svd(projected, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() < 1e-6)
    throw ContractError(kModule,
                        "zero-photon subspace is not adiabatically separated; "
                        "not in the dispersive regime");
  const Mat w = svd.matrixU() * svd.matrixV().adjoint();
  const Mat h_exact_eff =
      w * dressed_energy.cast<Complex>().asDiagonal() * w.adjoint();

  const EffectiveCoupling coupling = effective_hamiltonian(q1, q2, cavity, convention);

  Mat bare = Mat::Zero(n_sub, n_sub);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      bare(i * d2 + j, i * d2 + j) = q1.energies_ghz[i] + q2.energies_ghz[j];

  Mat delta = h_exact_eff - bare - coupling.h_j;

  // Factor out qudit-local energy shifts: least-squares fit of the diagonal
  // by x1(i) + x2(j).
  RealMat design(n_sub, d1 + d2);
  design.setZero();
  RealVec target(n_sub);
  for (int i = 0; i < d1; ++i) {
    for (int j = 0; j < d2; ++j) {
      design(i * d2 + j, i) = 1.0;
      design(i * d2 + j, d1 + j) = 1.0;
      target[i * d2 + j] = delta(i * d2 + j, i * d2 + j).real();
    }
  }
  const RealVec fit = design.completeOrthogonalDecomposition().solve(target);
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      delta(i * d2 + j, i * d2 + j) -= fit[i] + fit[d1 + j];

  Eigen::SelfAdjointEigenSolver<Mat> delta_eig(0.5 * (delta + delta.adjoint()));
  report.deviation_ghz = delta_eig.eigenvalues().cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<Mat> hj_eig(coupling.h_j);
  const double hj_norm = hj_eig.eigenvalues().cwiseAbs().maxCoeff();
  report.deviation_relative = hj_norm > 0.0 ? report.deviation_ghz / hj_norm : 0.0;

  // Flip-flop element between |1,0> and |0,1> (lowest transition of each).
  const int row = 1 * d2 + 0, col = 0 * d2 + 1;
  report.flip_flop_eq1_ghz = std::abs(coupling.h_j(row, col));
  report.flip_flop_exact_ghz = std::abs(h_exact_eff(row, col));
  report.flip_flop_rel_error =
      report.flip_flop_exact_ghz > 0.0
          ? std::abs(report.flip_flop_eq1_ghz - report.flip_flop_exact_ghz) /
                report.flip_flop_exact_ghz
          : 0.0;
  return report;
}

SwapGate synthesize_swap(const EffectiveCoupling& coupling,
                         const RealVec& energies_1, const RealVec& energies_2,
                         std::pair<int, int> pair1, std::pair<int, int> pair2,
                         bool enforce_resonance) {
  const int d1 = coupling.d1, d2 = coupling.d2;
  if (energies_1.size() != d1 || energies_2.size() != d2)
    throw ValidationError(kModule, "energy vectors do not match the coupling");
  auto check_pair = [](std::pair<int, int> p, int d) {
    if (p.first < 0 || p.second < 0 || p.first >= d || p.second >= d ||
        p.first == p.second)
      throw ValidationError(kModule, "invalid level pair");
  };
  check_pair(pair1, d1);
  check_pair(pair2, d2);
  const auto [g1, e1] = pair1;
  const auto [g2, e2] = pair2;

  const int idx_a = e1 * d2 + g2;  // excitation on qudit 1
  const int idx_b = g1 * d2 + e2;  // excitation on qudit 2
  const double j_pair = std::abs(coupling.h_j(idx_a, idx_b));
  if (j_pair <= 0.0)
    throw ContractError(kModule, "no flip-flop coupling between the selected pairs");

  const double gap1 = energies_1[e1] + coupling.local_shift_1[e1] -
                      energies_1[g1] - coupling.local_shift_1[g1];
  const double gap2 = energies_2[e2] + coupling.local_shift_2[e2] -
                      energies_2[g2] - coupling.local_shift_2[g2];
  const double mismatch = std::abs(gap1 - gap2);
  if (enforce_resonance && mismatch > j_pair / 10.0)
    throw ContractError(kModule,
                        "selected level pairs are not mutually resonant: gap "
                        "mismatch " +
                            std::to_string(mismatch) + " GHz exceeds |J|/10");

  Mat h_eff = coupling.h_j;
  for (int i = 0; i < d1; ++i)
    for (int j = 0; j < d2; ++j)
      h_eff(i * d2 + j, i * d2 + j) += energies_1[i] + coupling.local_shift_1[i] +
                                       energies_2[j] + coupling.local_shift_2[j];

  SwapGate gate;
  gate.j_pair_ghz = j_pair;
  gate.gate_time_ns = 1.0 / (4.0 * j_pair);

  Eigen::SelfAdjointEigenSolver<Mat> eig(h_eff);
  const Vec phases = (Complex(0.0, -kTwoPi * gate.gate_time_ns) *
                      eig.eigenvalues().cast<Complex>().array())
                         .exp()
                         .matrix();
  gate.unitary = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();

  const Vec start = gate.unitary.col(idx_a);
  gate.transfer_population = std::norm(start[idx_b]);
  double inside = 0.0;
  for (int i : {g1, e1})
    for (int j : {g2, e2}) inside += std::norm(start[i * d2 + j]);
  gate.leakage = std::max(0.0, 1.0 - inside);
  return gate;
}

FeasibilityReport feasibility(double g_ghz, double t2_ns, double kappa_ghz) {
  if (g_ghz <= 0.0 || t2_ns <= 0.0 || kappa_ghz < 0.0)
    throw ValidationError(kModule, "feasibility inputs must be positive (kappa >= 0)");
  FeasibilityReport report;
  report.g_t2_product = g_ghz * t2_ns;
  report.g_over_kappa = kappa_ghz > 0.0 ? g_ghz / kappa_ghz
                                        : std::numeric_limits<double>::infinity();
  report.beats_spin_decoherence = report.g_t2_product > 1.0;
  report.beats_cavity_loss = g_ghz > kappa_ghz;
  report.feasible = report.beats_spin_decoherence && report.beats_cavity_loss;
  return report;
}

}  // namespace spinqpu::cavity
