// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/qec.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <string>

namespace spinqpu::qec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// m value of basis index k for spin s (descending order).
double m_of_index(double s, int k) { return s - k; }

// Support of word 0: indices {0, 2, ...}; word 1 is the mirror {d-1, d-3, ...}
// listed in descending-m order. Disjoint for half-integer s.
std::vector<int> support_levels(int d, int word) {
  std::vector<int> level;
  if (word == 0) {
    for (int k = 0; k < d; k += 2) level.push_back(k);
  } else {
    for (int k = 1; k < d; k += 2) level.push_back(k);
  }
  return level;
}

Mat sz_matrix(int d, double s) {
  Mat sz = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) sz(k, k) = m_of_index(s, k);
  return sz;
}

// Minimum-norm nonnegative solution of A w = b by a small active-set loop.
RealVec solve_nonnegative_min_norm(RealMat a, RealVec b) {
  const int n = static_cast<int>(a.cols());
  std::vector<int> active(n);
  for (int i = 0; i < n; ++i) active[i] = i;
  for (int round = 0; round <= n; ++round) {
    const int na = static_cast<int>(active.size());
    RealMat sub(a.rows(), na);
    for (int c = 0; c < na; ++c) sub.col(c) = a.col(active[c]);
    Eigen::CompleteOrthogonalDecomposition<RealMat> cod(sub);
    RealVec w_sub = cod.solve(b);
    if ((sub * w_sub - b).norm() > 1e-10)
      throw ContractError(kModule, "code-word constraints are infeasible");
    int worst = -1;
    double worst_val = -1e-12;
    for (int c = 0; c < na; ++c) {
      if (w_sub[c] < worst_val) {
        worst_val = w_sub[c];
        worst = c;
      }
    }
    if (worst < 0) {
      RealVec w = RealVec::Zero(n);
      for (int c = 0; c < na; ++c) w[active[c]] = std::max(0.0, w_sub[c]);
      return w;
    }
    active.erase(active.begin() + worst);
    if (active.empty())
      throw ContractError(kModule, "code-word constraints are infeasible");
  }
  throw ContractError(kModule, "code-word solver failed to converge");
}

}  // namespace

QuditCode solve_code_words(double s, int order) {
  if (!is_half_integer(s) || s <= 0.0)
    throw ValidationError(kModule, "qudit spin must be a positive half-integer");
  if (order < 1) throw ValidationError(kModule, "correction order must be >= 1");
  const int d = static_cast<int>(std::lround(2.0 * s)) + 1;
  if (d < 2 * (order + 1))
    throw ContractError(kModule, "spin " + std::to_string(s) +
                                     " has too few levels for correction order " +
                                     std::to_string(order));
  if (d % 2 != 0)
    throw ContractError(kModule,
                        "parity-symmetric code words need a half-integer spin "
                        "(disjoint supports)");

  const auto sup0 = support_levels(d, 0);
  const int n0 = static_cast<int>(sup0.size());

  // Constraints on the weights w_t at m_t = s - 2t: normalization plus
  // vanishing odd moments up to 2*order.
  std::vector<int> odd_powers;
  for (int p = 1; p <= 2 * order; p += 2) odd_powers.push_back(p);
  RealMat a(1 + odd_powers.size(), n0);
  RealVec b = RealVec::Zero(1 + odd_powers.size());
  for (int t = 0; t < n0; ++t) a(0, t) = 1.0;
  b[0] = 1.0;
  for (std::size_t r = 0; r < odd_powers.size(); ++r)
    for (int t = 0; t < n0; ++t)
      a(1 + r, t) = std::pow(m_of_index(s, sup0[t]), odd_powers[r]);

  const RealVec w = solve_nonnegative_min_norm(a, b);

  QuditCode code;
  code.spin = s;
  code.order = order;
  code.word0 = RealVec::Zero(d);
  code.word1 = RealVec::Zero(d);
  for (int t = 0; t < n0; ++t) {
    const double c = std::sqrt(w[t]);
    code.word0[sup0[t]] = c;
    code.word1[d - 1 - sup0[t]] = c;  // parity flip m -> -m
  }
  const Mat sz = sz_matrix(d, s);
  Mat power = Mat::Identity(d, d);
  for (int p = 0; p <= order; ++p) {
    code.error_set.push_back(power);
    power = power * sz;
  }
  code.kl_residual = check_knill_laflamme(code);
  if (code.kl_residual > 1e-9)
    throw ContractError(kModule, "solved code fails the Knill-Laflamme check");
  return code;
}

double check_knill_laflamme(const QuditCode& code) {
  const int d = code.dim();
  if (code.word1.size() != d || code.error_set.empty())
    throw ValidationError(kModule, "malformed code");
  const Vec w0 = code.word0.cast<Complex>();
  const Vec w1 = code.word1.cast<Complex>();
  double residual = std::abs(w0.dot(w0).real() - 1.0);
  residual = std::max(residual, std::abs(w1.dot(w1).real() - 1.0));
  for (const Mat& ep : code.error_set) {
    for (const Mat& eq : code.error_set) {
      const Mat m = ep.adjoint() * eq;
      const Complex g00 = w0.adjoint() * m * w0;
      const Complex g11 = w1.adjoint() * m * w1;
      const Complex g01 = w0.adjoint() * m * w1;
      const Complex g10 = w1.adjoint() * m * w0;
      const Complex c = 0.5 * (g00 + g11);
      residual = std::max({residual, std::abs(g00 - c), std::abs(g11 - c),
                           std::abs(g01), std::abs(g10)});
    }
  }
  return residual;
}

AncillaQuditSystem ancilla_system_from_params(double s, double electron_gap_ghz,
                                              double hyperfine_a_ghz,
                                              double quadrupole_p_ghz,
                                              double nuclear_zeeman_ghz) {
  if (!is_half_integer(s) || s <= 0.0)
    throw ValidationError(kModule, "qudit spin must be a positive half-integer");
  const int d = static_cast<int>(std::lround(2.0 * s)) + 1;
  AncillaQuditSystem sys;
  sys.qudit_dim = d;
  sys.level_energy_ghz = RealMat::Zero(d, 2);
  for (int k = 0; k < d; ++k) {
    const double m = m_of_index(s, k);
    const double common = nuclear_zeeman_ghz * m + quadrupole_p_ghz * m * m;
    const double electron = 0.5 * (electron_gap_ghz + hyperfine_a_ghz * m);
    sys.level_energy_ghz(k, 0) = common - electron;
    sys.level_energy_ghz(k, 1) = common + electron;
  }
  return sys;
}

AncillaQuditSystem ancilla_system_from_molecule(const spin::SpinSystemSpec& spec) {
  spec.validate();
  if (spec.sites.size() != 1 || !spec.sites[0].nuclear)
    throw ValidationError(kModule,
                          "qudit+ancilla molecule must be a single site with a "
                          "nuclear spin attached");
  const spin::SpinSite& site = spec.sites[0];
  if (std::abs(site.spin - 0.5) > 1e-9)
    throw ValidationError(kModule, "the electronic ancilla must be a spin 1/2");
  const double s_nuc = site.nuclear->spin;
  const int d = static_cast<int>(std::lround(2.0 * s_nuc)) + 1;

  const spin::EigenSystem eig = spin::system_eigensystem(spec);
  const auto e_ops = spin::spin_operators(0.5);
  const auto n_ops = spin::spin_operators(s_nuc);
  const Mat sz_e = Eigen::kroneckerProduct(e_ops.sz, Mat::Identity(d, d)).eval();
  const Mat iz = Eigen::kroneckerProduct(Mat::Identity(2, 2), n_ops.sz).eval();

  AncillaQuditSystem sys;
  sys.qudit_dim = d;
  sys.level_energy_ghz = RealMat::Zero(d, 2);
  RealMat seen = RealMat::Zero(d, 2);
  for (int c = 0; c < eig.dim(); ++c) {
    const Vec v = eig.states.col(c);
    const double mi = (v.adjoint() * iz * v)(0, 0).real();
    const double ms = (v.adjoint() * sz_e * v)(0, 0).real();
    const double mi_round = std::round(2.0 * mi) / 2.0;
    const double ms_round = std::round(2.0 * ms) / 2.0;
    if (std::abs(mi - mi_round) > 0.25 || std::abs(ms - ms_round) > 0.25)
      throw ContractError(kModule,
                          "eigenstate mixing too strong to assign (m_I, m_S) labels");
    const int level = static_cast<int>(std::lround(s_nuc - mi_round));
    const int anc = ms_round > 0.0 ? 1 : 0;  // ground = electron spin down
    if (level < 0 || level >= d || seen(level, anc) != 0.0)
      throw ContractError(kModule, "ambiguous eigenstate labels");
    seen(level, anc) = 1.0;
    sys.level_energy_ghz(level, anc) = eig.energies_ghz[c];
  }
  return sys;
}

namespace {

struct GivensOp {
  int p = 0, q = 0;  // support coordinates
  double alpha = 0.0;
};

// Plane-rotation decomposition of a real orthogonal matrix:
// (G_n ... G_1) W = diag(signs). Returns the rotations in application order
// and the leftover signs.
std::pair<std::vector<GivensOp>, RealVec> givens_decompose(RealMat w) {
  const int n = static_cast<int>(w.rows());
  std::vector<GivensOp> rotations;
  for (int c = 0; c < n; ++c) {
    for (int r = c + 1; r < n; ++r) {
      if (std::abs(w(r, c)) < 1e-14) continue;
      const double alpha = std::atan2(-w(r, c), w(c, c));
      const double cs = std::cos(alpha), sn = std::sin(alpha);
      const RealVec row_c = w.row(c), row_r = w.row(r);
      w.row(c) = cs * row_c - sn * row_r;
      w.row(r) = sn * row_c + cs * row_r;
      rotations.push_back({c, r, alpha});
    }
  }
  RealVec signs(n);
  for (int i = 0; i < n; ++i) {
    signs[i] = w(i, i) < 0.0 ? -1.0 : 1.0;
    if (std::abs(std::abs(w(i, i)) - 1.0) > 1e-9)
      throw ContractError(kModule, "decode matrix is not orthogonal");
  }
  return {rotations, signs};
}

int composite(int level, int anc) { return 2 * level + anc; }

}  // namespace

QecProtocol build_protocol(const QuditCode& code, const AncillaQuditSystem& system,
                           double ancilla_t2_ns, double pulse_rabi_ghz) {
  if (pulse_rabi_ghz <= 0.0)
    throw ValidationError(kModule, "pulse Rabi rate must be positive");
  const int d = code.dim();
  if (system.qudit_dim != d)
    throw ValidationError(kModule, "system and code dimensions differ");
  const int k = code.order;

  QecProtocol protocol;
  protocol.qudit_dim = d;
  protocol.order = k;
  protocol.pulse_rabi_ghz = pulse_rabi_ghz;
  protocol.ancilla_t2_ns = ancilla_t2_ns;

  const Mat sz = sz_matrix(d, code.spin);
  const double pi_duration = 1.0 / (2.0 * pulse_rabi_ghz);

  // Orthonormal syndrome bases |a,s> = Gram-Schmidt of Sz^s |a_L>, then
  // completed to a full basis of each support.
  std::array<std::vector<int>, 2> sup{support_levels(d, 0), support_levels(d, 1)};
  const int n0 = static_cast<int>(sup[0].size());
  std::array<RealMat, 2> basis;
  for (int a = 0; a < 2; ++a) {
    const RealVec& word = a == 0 ? code.word0 : code.word1;
    std::vector<RealVec> vecs;
    for (int p = 0; p <= k; ++p) {
      RealVec v = word;
      for (int pp = 0; pp < p; ++pp) v = (sz.real() * v).eval();
      vecs.push_back(v);
    }
    for (int t = 0; t < n0 && static_cast<int>(vecs.size()) < n0 + k + 1; ++t) {
      RealVec e = RealVec::Zero(d);
      e[sup[a][t]] = 1.0;
      vecs.push_back(e);
    }
    basis[a] = RealMat::Zero(d, n0);
    int col = 0;
    for (auto& v : vecs) {
      for (int c = 0; c < col; ++c) v -= basis[a].col(c).dot(v) * basis[a].col(c);
      const double norm = v.norm();
      if (col <= k && norm < 1e-8)
        throw ContractError(kModule, "error words are linearly dependent");
      if (norm < 1e-8) continue;
      basis[a].col(col++) = v / norm;
      if (col == n0) break;
    }
    if (col != n0)
      throw ContractError(kModule, "failed to complete the syndrome basis");
  }
  protocol.syndrome_basis0 = basis[0].leftCols(k + 1).cast<Complex>();
  protocol.syndrome_basis1 = basis[1].leftCols(k + 1).cast<Complex>();

  // Decode V maps |a,s> to the s-th support level of word a. Per support
  // block, in support coordinates, V = Q^T with Q the basis matrix above.
  protocol.flag.resize(k);
  protocol.reset.resize(k);
  protocol.shift.resize(k);
  for (int a = 0; a < 2; ++a) {
    RealMat q_block(n0, n0);
    for (int t = 0; t < n0; ++t)
      for (int c = 0; c < n0; ++c) q_block(t, c) = basis[a](sup[a][t], c);
    auto [rotations, signs] = givens_decompose(q_block.transpose());

    auto rotation_pulse = [&](const GivensOp& g, double direction) {
      ProtocolPulse pulse;
      pulse.i = composite(sup[a][g.p], 0);
      pulse.j = composite(sup[a][g.q], 0);
      pulse.theta_rad = direction * 2.0 * g.alpha;
      pulse.phi_rad = 0.5 * kPi;
      pulse.duration_ns = std::abs(pulse.theta_rad) / (kTwoPi * pulse_rabi_ghz);
      pulse.carrier_ghz = std::abs(system.level_energy_ghz(sup[a][g.p], 0) -
                                   system.level_energy_ghz(sup[a][g.q], 0));
      return pulse;
    };
    std::vector<ProtocolPulse> flips;
    for (int t = 0; t < n0; ++t) {
      if (signs[t] > 0.0) continue;
      ProtocolPulse flip;
      flip.kind = ProtocolPulse::Kind::PhaseFlip;
      flip.i = composite(sup[a][t], 0);
      flips.push_back(flip);
    }
    // V = G_1^T ... G_n^T D, so decode applies D first and the transposed
    // rotations in reverse; encode is the exact inverse.
    protocol.decode.insert(protocol.decode.end(), flips.begin(), flips.end());
    for (int r = static_cast<int>(rotations.size()) - 1; r >= 0; --r) {
      const ProtocolPulse pulse = rotation_pulse(rotations[r], -1.0);
      if (std::abs(pulse.theta_rad) > 1e-12) protocol.decode.push_back(pulse);
    }
    for (const GivensOp& g : rotations) {
      const ProtocolPulse pulse = rotation_pulse(g, 1.0);
      if (std::abs(pulse.theta_rad) > 1e-12) protocol.encode.push_back(pulse);
    }
    protocol.encode.insert(protocol.encode.end(), flips.begin(), flips.end());

    for (int s = 1; s <= k; ++s) {
      const int level = sup[a][s];
      ProtocolPulse flag;
      flag.i = composite(level, 0);
      flag.j = composite(level, 1);
      flag.theta_rad = kPi;
      flag.phi_rad = 0.0;
      flag.duration_ns = pi_duration;
      flag.carrier_ghz = std::abs(system.level_energy_ghz(level, 1) -
                                  system.level_energy_ghz(level, 0));
      protocol.flag[s - 1].push_back(flag);
      protocol.reset[s - 1].push_back(flag);

      ProtocolPulse move;
      move.i = composite(level, 0);
      move.j = composite(sup[a][0], 0);
      move.theta_rad = kPi;
      move.phi_rad = 0.5 * kPi;
      move.duration_ns = pi_duration;
      move.carrier_ghz = std::abs(system.level_energy_ghz(level, 0) -
                                  system.level_energy_ghz(sup[a][0], 0));
      protocol.shift[s - 1].push_back(move);
    }
  }
  // Addressability: every pair of distinct transitions used by the protocol
  // must be separated by more than the Rabi width.
  struct UsedLine {
    int i, j;
    double carrier;
  };
  std::vector<UsedLine> lines;
  auto collect = [&lines](const std::vector<ProtocolPulse>& pulses) {
    for (const auto& p : pulses) {
      if (p.kind != ProtocolPulse::Kind::Rotation) continue;
      const int lo = std::min(p.i, p.j), hi = std::max(p.i, p.j);
      bool known = false;
      for (const auto& line : lines)
        if (line.i == lo && line.j == hi) known = true;
      if (!known) lines.push_back({lo, hi, p.carrier_ghz});
    }
  };
  collect(protocol.decode);
  collect(protocol.encode);
  for (int s = 0; s < k; ++s) {
    collect(protocol.flag[s]);
    collect(protocol.reset[s]);
    collect(protocol.shift[s]);
  }
  for (std::size_t x = 0; x < lines.size(); ++x) {
    for (std::size_t y = x + 1; y < lines.size(); ++y) {
      if (std::abs(lines[x].carrier - lines[y].carrier) <= pulse_rabi_ghz)
        throw ContractError(
            kModule, "protocol pulses at " + std::to_string(lines[x].carrier) +
                         " and " + std::to_string(lines[y].carrier) +
                         " GHz are spectrally closer than the Rabi width");
    }
  }

  double total = 0.0;
  auto add = [&total](const std::vector<ProtocolPulse>& pulses) {
    for (const auto& p : pulses) total += p.duration_ns;
  };
  add(protocol.decode);
  add(protocol.encode);
  for (int s = 0; s < k; ++s) {
    add(protocol.flag[s]);
    add(protocol.reset[s]);
    add(protocol.shift[s]);
  }
  protocol.duration_ns = total;
  return protocol;
}

ProtocolExecutor::ProtocolExecutor(const QecProtocol& protocol, double qudit_t2_ns,
                                   bool ideal_pulses)
    : protocol_(protocol), ideal_(ideal_pulses) {
  const int d = protocol.qudit_dim;
  const int dim = 2 * d;
  const double s = 0.5 * (d - 1);
  Mat sz_qudit = Mat::Zero(d, d);
  for (int k = 0; k < d; ++k) sz_qudit(k, k) = s - k;
  Mat sz_anc = Mat::Zero(2, 2);
  sz_anc(0, 0) = 0.5;
  sz_anc(1, 1) = -0.5;

  memory_model_.hamiltonian = Mat::Zero(dim, dim);
  if (qudit_t2_ns > 0.0)
    memory_model_.jumps.push_back(
        {Eigen::kroneckerProduct(sz_qudit, Mat::Identity(2, 2)).eval(),
         dynamics::dephasing_rate_for_t2(qudit_t2_ns)});
  if (protocol.ancilla_t2_ns > 0.0)
    memory_model_.jumps.push_back(
        {Eigen::kroneckerProduct(Mat::Identity(d, d), sz_anc).eval(),
         dynamics::dephasing_rate_for_t2(protocol.ancilla_t2_ns)});

  if (!ideal_) {
    auto prepare = [this, dim](const std::vector<ProtocolPulse>& pulses) {
      for (const auto& p : pulses) {
        if (p.kind != ProtocolPulse::Kind::Rotation || p.duration_ns <= 0.0)
          continue;
        dynamics::PulseSpec spec{p.i, p.j, p.theta_rad, p.phi_rad, p.duration_ns,
                                 p.carrier_ghz};
        dynamics::LindbladModel driven;
        driven.hamiltonian = dynamics::pulse_hamiltonian(spec, dim);
        driven.jumps = memory_model_.jumps;
        cache_.emplace_back(&p, dynamics::Propagator(driven, p.duration_ns));
      }
    };
    prepare(protocol_.decode);
    prepare(protocol_.encode);
    for (int s2 = 0; s2 < protocol_.order; ++s2) {
      prepare(protocol_.flag[s2]);
      prepare(protocol_.reset[s2]);
      prepare(protocol_.shift[s2]);
    }
  }
}

Mat ProtocolExecutor::apply(const Mat& rho, const ProtocolPulse& pulse) const {
  const int dim = 2 * protocol_.qudit_dim;
  if (pulse.kind == ProtocolPulse::Kind::PhaseFlip) {
    Mat u = Mat::Identity(dim, dim);
    // Virtual Z on one qudit level, both ancilla components.
    u(pulse.i, pulse.i) = -1.0;
    u(pulse.i + 1, pulse.i + 1) = -1.0;
    return u * rho * u.adjoint();
  }
  dynamics::PulseSpec spec{pulse.i, pulse.j, pulse.theta_rad, pulse.phi_rad,
                           pulse.duration_ns, pulse.carrier_ghz};
  if (ideal_ || pulse.duration_ns <= 0.0) {
    const Mat u = dynamics::pulse_unitary(spec, dim);
    return u * rho * u.adjoint();
  }
  for (const auto& [key, propagator] : cache_)
    if (key == &pulse) return propagator.apply(rho);
  throw ContractError(kModule, "pulse missing from the propagator cache");
}

Mat ProtocolExecutor::apply_list(Mat rho, const std::vector<ProtocolPulse>& pulses) const {
  for (const auto& p : pulses) rho = apply(rho, p);
  return rho;
}

Mat ProtocolExecutor::run(const Mat& rho_composite) const {
  const int d = protocol_.qudit_dim;
  const int dim = 2 * d;
  if (rho_composite.rows() != dim || rho_composite.cols() != dim)
    throw ValidationError(kModule, "state dimension does not match protocol");

  Mat p_up = Mat::Zero(dim, dim), p_down = Mat::Zero(dim, dim);
  for (int l = 0; l < d; ++l) {
    p_down(2 * l, 2 * l) = 1.0;
    p_up(2 * l + 1, 2 * l + 1) = 1.0;
  }

  Mat out = Mat::Zero(dim, dim);
  Mat current = apply_list(rho_composite, protocol_.decode);
  for (int s = 0; s < protocol_.order; ++s) {
    current = apply_list(current, protocol_.flag[s]);
    // Instantaneous projective ancilla measurement.
    Mat excited = p_up * current * p_up;
    current = p_down * current * p_down;
    if (excited.trace().real() > 1e-15) {
      excited = apply_list(excited, protocol_.reset[s]);
      excited = apply_list(excited, protocol_.shift[s]);
      out += apply_list(excited, protocol_.encode);
    }
  }
  out += apply_list(current, protocol_.encode);
  return out;
}

Mat run_protocol(const Mat& rho_composite, const QecProtocol& protocol,
                 double qudit_t2_ns, bool ideal_pulses) {
  ProtocolExecutor executor(protocol, qudit_t2_ns, ideal_pulses);
  return executor.run(rho_composite);
}

Vec logical_state(const QuditCode& code, Complex alpha, Complex beta) {
  Vec v = alpha * code.word0.cast<Complex>() + beta * code.word1.cast<Complex>();
  return v / v.norm();
}

std::vector<Vec> cardinal_logical_states(const QuditCode& code) {
  const double r = 1.0 / std::sqrt(2.0);
  return {logical_state(code, 1.0, 0.0),
          logical_state(code, 0.0, 1.0),
          logical_state(code, r, r),
          logical_state(code, r, -r),
          logical_state(code, r, Complex(0.0, r)),
          logical_state(code, r, Complex(0.0, -r))};
}

std::vector<GainPoint> memory_gain_curve(const QuditCode& code,
                                         const QecProtocol& protocol, double t2_ns,
                                         const std::vector<double>& t_over_t2,
                                         bool ideal_pulses, int threads) {
  if (t2_ns <= 0.0) throw ValidationError(kModule, "t2 must be positive");
  for (double t : t_over_t2)
    if (t <= 0.0) throw ValidationError(kModule, "memory times must be positive");
  const int d = code.dim();

  const ProtocolExecutor executor(protocol, t2_ns, ideal_pulses);
  const std::vector<Vec> cardinals = cardinal_logical_states(code);

  // Unprotected spin-1/2 reference under the identical T2.
  dynamics::LindbladModel half;
  half.hamiltonian = Mat::Zero(2, 2);
  Mat sz_half(2, 2);
  sz_half << 0.5, 0.0, 0.0, -0.5;
  half.jumps.push_back({sz_half, dynamics::dephasing_rate_for_t2(t2_ns)});
  const double r = 1.0 / std::sqrt(2.0);
  const std::vector<Vec> half_cardinals = {
      (Vec(2) << 1, 0).finished(),          (Vec(2) << 0, 1).finished(),
      (Vec(2) << r, r).finished(),          (Vec(2) << r, -r).finished(),
      (Vec(2) << r, Complex(0, r)).finished(),
      (Vec(2) << r, Complex(0, -r)).finished()};

  Vec anc_ground = Vec::Zero(2);
  anc_ground[0] = 1.0;

  std::vector<GainPoint> points(t_over_t2.size());
  parallel_for(t_over_t2.size(), threads, [&](std::size_t idx) {
    const double t_ns = t_over_t2[idx] * t2_ns;
    const dynamics::Propagator memory(executor.memory_model(), t_ns);
    const dynamics::Propagator memory_half(half, t_ns);

    double err = 0.0, err_half = 0.0;
    for (int c = 0; c < 6; ++c) {
      Vec target = Vec::Zero(2 * d);
      for (int l = 0; l < d; ++l) target[2 * l] = cardinals[c][l];
      Mat rho = target * target.adjoint();
      rho = memory.apply(rho);
      rho = executor.run(rho);
      const double f = std::clamp((target.adjoint() * rho * target)(0, 0).real(),
                                  0.0, 1.0);
      err += (1.0 - f) / 6.0;

      const Vec& psi = half_cardinals[c];
      const Mat rho_half = memory_half.apply(psi * psi.adjoint());
      const double f_half =
          std::clamp((psi.adjoint() * rho_half * psi)(0, 0).real(), 0.0, 1.0);
      err_half += (1.0 - f_half) / 6.0;
    }
    GainPoint point;
    point.t_over_t2 = t_over_t2[idx];
    point.corrected_error = err;
    point.spin_half_error = err_half;
    point.gain = err > 0.0 ? err_half / err : 0.0;
    points[idx] = point;
  });
  return points;
}

// --- three-qubit phase-flip code ------------------------------------------

namespace {

Mat pauli_at(const Mat& p, int qubit) {
  Mat out = Mat::Identity(1, 1);
  for (int q = 0; q < 3; ++q)
    out = Eigen::kroneckerProduct(out, q == qubit ? p : Mat::Identity(2, 2)).eval();
  return out;
}

struct PhaseFlipMachinery {
  Mat encode;  // 8x2 isometry |0> -> |+++>, |1> -> |--->
  std::vector<Mat> corrections;  // per syndrome index (s1<0)*1 + (s2<0)*2
  std::vector<Mat> projectors;
  Mat z[3];
};

const PhaseFlipMachinery& machinery() {
  static const PhaseFlipMachinery m = [] {
    PhaseFlipMachinery mm;
    const auto half = spin::spin_operators(0.5);
    const Mat sx = 2.0 * half.sx, sz = 2.0 * half.sz;  // Pauli matrices
    for (int q = 0; q < 3; ++q) mm.z[q] = pauli_at(sz, q);

    Vec plus(2), minus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    minus << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    auto triple = [](const Vec& v) {
      return Eigen::kroneckerProduct(v, Eigen::kroneckerProduct(v, v).eval()).eval();
    };
    mm.encode = Mat::Zero(8, 2);
    mm.encode.col(0) = triple(plus);
    mm.encode.col(1) = triple(minus);

    const Mat s1 = pauli_at(sx, 0) * pauli_at(sx, 1);
    const Mat s2 = pauli_at(sx, 1) * pauli_at(sx, 2);
    const Mat id = Mat::Identity(8, 8);
    for (int syndrome = 0; syndrome < 4; ++syndrome) {
      const double v1 = (syndrome & 1) ? -1.0 : 1.0;
      const double v2 = (syndrome & 2) ? -1.0 : 1.0;
      mm.projectors.push_back(0.25 * (id + v1 * s1) * (id + v2 * s2));
      if (v1 > 0 && v2 > 0)
        mm.corrections.push_back(id);
      else if (v1 < 0 && v2 > 0)
        mm.corrections.push_back(mm.z[0]);
      else if (v1 < 0 && v2 < 0)
        mm.corrections.push_back(mm.z[1]);
      else
        mm.corrections.push_back(mm.z[2]);
    }
    return mm;
  }();
  return m;
}

// One full encode -> error -> extract -> correct -> decode pass acting on a
// 2x2 logical density matrix. `error` acts on the 8-dim register.
Mat phase_flip_cycle(const Mat& rho_logical, const std::function<Mat(const Mat&)>& error) {
  const auto& mm = machinery();
  Mat rho = mm.encode * rho_logical * mm.encode.adjoint();
  rho = error(rho);
  Mat corrected = Mat::Zero(8, 8);
  for (int s = 0; s < 4; ++s) {
    const Mat branch = mm.projectors[s] * rho * mm.projectors[s];
    corrected += mm.corrections[s] * branch * mm.corrections[s].adjoint();
  }
  return mm.encode.adjoint() * corrected * mm.encode;
}

}  // namespace

PhaseFlipResult phase_flip_3q(const Mat& rho_logical, const std::vector<int>& z_qubits,
                              bool correlated) {
  (void)correlated;  // a joint Z(x)Z event is unitarily the same product
  if (rho_logical.rows() != 2 || rho_logical.cols() != 2)
    throw ValidationError(kModule, "logical input must be a 2x2 density matrix");
  const auto& mm = machinery();
  Mat error_op = Mat::Identity(8, 8);
  for (int q : z_qubits) {
    if (q < 0 || q > 2) throw ValidationError(kModule, "qubit index out of range");
    error_op = mm.z[q] * error_op;
  }
  auto error = [&error_op](const Mat& rho) {
    return (error_op * rho * error_op.adjoint()).eval();
  };

  PhaseFlipResult result;
  result.logical_out = phase_flip_cycle(rho_logical, error);
  result.fidelity = dynamics::fidelity(result.logical_out, rho_logical);

  // Success means the cycle is exactly the identity channel for this error
  // pattern, probed on a basis of logical operators.
  double worst = 0.0;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      Mat e = Mat::Zero(2, 2);
      e(a, b) = 1.0;
      worst = std::max(worst, (phase_flip_cycle(e, error) - e).norm());
    }
  }
  result.success = worst < 1e-9;
  return result;
}

double phase_flip_logical_error(double p_per_qubit) {
  if (p_per_qubit < 0.0 || p_per_qubit > 1.0)
    throw ValidationError(kModule, "error probability must be in [0, 1]");
  const auto& mm = machinery();
  auto channel = [&](const Mat& rho_in) {
    Mat rho = rho_in;
    for (int q = 0; q < 3; ++q)
      rho = ((1.0 - p_per_qubit) * rho + p_per_qubit * mm.z[q] * rho * mm.z[q])
                .eval();
    return rho;
  };
  Mat rho_logical = Mat::Zero(2, 2);
  rho_logical(0, 0) = 1.0;  // |0_L>; failure branches map it orthogonal
  const Mat out = phase_flip_cycle(rho_logical, channel);
  return 1.0 - std::clamp(out(0, 0).real(), 0.0, 1.0);
}

}  // namespace spinqpu::qec
