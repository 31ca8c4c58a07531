// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/dqs.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

namespace spinqpu::dqs {

namespace {

constexpr double kPi = 3.14159265358979323846;

Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

Mat embed_qubit_op(const Mat& op, int site, int n_sites) {
  Mat out = Mat::Identity(1, 1);
  for (int k = 0; k < n_sites; ++k)
    out = kron(out, k == site ? op : Mat::Identity(2, 2));
  return out;
}

struct TermGroup {
  std::vector<int> term_ids;  // commuting within the group
};

struct CompiledModel {
  int dim = 0;
  std::vector<Mat> terms;
  std::vector<Gate> prototypes;  // metadata per term (type, targets)
  std::vector<TermGroup> groups;
};

CompiledModel compile_chain(const SpinChainModel& model) {
  if (model.n_sites < 2) throw ValidationError(kModule, "chain needs >= 2 sites");
  const auto half = spin::spin_operators(0.5);
  CompiledModel compiled;
  compiled.dim = 1 << model.n_sites;

  auto bond_term = [&](int site) {
    const Mat sxsx = embed_qubit_op(half.sx, site, model.n_sites) *
                     embed_qubit_op(half.sx, site + 1, model.n_sites);
    const Mat sysy = embed_qubit_op(half.sy, site, model.n_sites) *
                     embed_qubit_op(half.sy, site + 1, model.n_sites);
    const Mat szsz = embed_qubit_op(half.sz, site, model.n_sites) *
                     embed_qubit_op(half.sz, site + 1, model.n_sites);
    switch (model.kind) {
      case ChainKind::XX:
        return (model.j_ghz * (sxsx + sysy)).eval();
      case ChainKind::XY:
        return (model.j_ghz * sxsx + model.jy_ghz * sysy).eval();
      case ChainKind::Heisenberg:
        return (model.j_ghz * (sxsx + sysy + szsz)).eval();
      case ChainKind::Ising:
        return (model.j_ghz * szsz).eval();
    }
    throw ValidationError(kModule, "unsupported chain kind");
  };

  TermGroup even_bonds, odd_bonds, fields;
  for (int site = 0; site + 1 < model.n_sites; ++site) {
    compiled.terms.push_back(bond_term(site));
    Gate proto;
    proto.type = GateType::TwoBodyEntangler;
    proto.targets = {site, site + 1};
    proto.term_id = static_cast<int>(compiled.terms.size()) - 1;
    compiled.prototypes.push_back(proto);
    (site % 2 == 0 ? even_bonds : odd_bonds).term_ids.push_back(proto.term_id);
  }
  if (model.field_ghz != 0.0) {
    const Mat& local = model.kind == ChainKind::Ising ? half.sx : half.sz;
    for (int site = 0; site < model.n_sites; ++site) {
      compiled.terms.push_back(model.field_ghz *
                               embed_qubit_op(local, site, model.n_sites));
      Gate proto;
      proto.type = GateType::SingleQuditRotation;
      proto.targets = {site};
      proto.term_id = static_cast<int>(compiled.terms.size()) - 1;
      compiled.prototypes.push_back(proto);
      fields.term_ids.push_back(proto.term_id);
    }
  }
  // All Ising ZZ bonds commute, so they form one group.
  if (model.kind == ChainKind::Ising) {
    TermGroup all_bonds;
    all_bonds.term_ids = even_bonds.term_ids;
    all_bonds.term_ids.insert(all_bonds.term_ids.end(), odd_bonds.term_ids.begin(),
                              odd_bonds.term_ids.end());
    compiled.groups.push_back(all_bonds);
  } else {
    compiled.groups.push_back(even_bonds);
    if (!odd_bonds.term_ids.empty()) compiled.groups.push_back(odd_bonds);
  }
  if (!fields.term_ids.empty()) compiled.groups.push_back(fields);
  return compiled;
}

CompiledModel compile_spin_boson(const SpinBosonModel& model) {
  if (model.n_b < 2) throw ValidationError(kModule, "boson truncation must be >= 2");
  const auto half = spin::spin_operators(0.5);
  const double s_min = 0.5 * (model.n_b - 1);
  const BosonEncoding enc = boson_qudit_encoding(model.n_b, s_min);

  CompiledModel compiled;
  compiled.dim = 2 * model.n_b;
  const Mat i_spin = Mat::Identity(2, 2), i_boson = Mat::Identity(model.n_b, model.n_b);

  // Spin (x) boson ordering. Local group: mode energy + spin energy.
  compiled.terms.push_back(kron(i_spin, model.mode_freq_ghz * enc.number));
  {
    Gate proto;
    proto.type = GateType::SingleQuditRotation;
    proto.targets = {1};
    proto.term_id = 0;
    compiled.prototypes.push_back(proto);
  }
  compiled.terms.push_back(kron(model.spin_freq_ghz * half.sz, i_boson));
  {
    Gate proto;
    proto.type = GateType::SingleQuditRotation;
    proto.targets = {0};
    proto.term_id = 1;
    compiled.prototypes.push_back(proto);
  }
  compiled.terms.push_back(
      kron(half.sx, model.coupling_ghz * (enc.a + enc.a.adjoint())));
  {
    Gate proto;
    proto.type = GateType::TwoBodyEntangler;
    proto.targets = {0, 1};
    proto.term_id = 2;
    compiled.prototypes.push_back(proto);
  }
  compiled.groups.push_back({{0, 1}});
  compiled.groups.push_back({{2}});
  return compiled;
}

CompiledModel compile(const TargetModel& model) {
  if (const auto* chain = std::get_if<SpinChainModel>(&model)) return compile_chain(*chain);
  return compile_spin_boson(std::get<SpinBosonModel>(model));
}

double spectral_norm_hermitian(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Mat hermitian_exp(const Mat& h, double t_ns) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(h);
  const Vec phases = (Complex(0.0, -kTwoPi * t_ns) *
                      eig.eigenvalues().cast<Complex>().array())
                         .exp()
                         .matrix();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

}  // namespace

int model_dimension(const TargetModel& model) { return compile(model).dim; }

Mat model_hamiltonian(const TargetModel& model) {
  const CompiledModel compiled = compile(model);
  Mat h = Mat::Zero(compiled.dim, compiled.dim);
  for (const Mat& term : compiled.terms) h += term;
  return h;
}

GateSequence trotterize(const TargetModel& model, double t_ns, int n_steps, int order,
                        double gate_rabi_ghz, bool ideal) {
  if (n_steps < 1) throw ValidationError(kModule, "n_steps must be >= 1");
  if (order != 1 && order != 2)
    throw ValidationError(kModule, "splitting order must be 1 or 2");
  if (gate_rabi_ghz <= 0.0) throw ValidationError(kModule, "gate rabi must be positive");

  const CompiledModel compiled = compile(model);
  GateSequence seq;
  seq.dim = compiled.dim;
  seq.term_generators = compiled.terms;

  std::vector<double> term_norm(compiled.terms.size());
  for (std::size_t k = 0; k < compiled.terms.size(); ++k)
    term_norm[k] = spectral_norm_hermitian(compiled.terms[k]);

  auto emit_group = [&](const TermGroup& group, double dt) {
    for (int id : group.term_ids) {
      Gate gate = compiled.prototypes[id];
      gate.dt_ns = dt;
      gate.angle_rad = kTwoPi * term_norm[id] * dt;
      gate.duration_ns = ideal ? 0.0 : gate.angle_rad / (kTwoPi * gate_rabi_ghz);
      seq.total_duration_ns += gate.duration_ns;
      seq.gates.push_back(gate);
    }
  };

  const double dt = t_ns / n_steps;
  const int n_groups = static_cast<int>(compiled.groups.size());
  for (int step = 0; step < n_steps; ++step) {
    if (order == 1 || n_groups == 1) {
      for (const auto& group : compiled.groups) emit_group(group, dt);
    } else {
      for (int g = 0; g < n_groups - 1; ++g) emit_group(compiled.groups[g], 0.5 * dt);
      emit_group(compiled.groups[n_groups - 1], dt);
      for (int g = n_groups - 2; g >= 0; --g) emit_group(compiled.groups[g], 0.5 * dt);
    }
  }
  return seq;
}

Mat sequence_unitary(const GateSequence& sequence) {
  Mat u = Mat::Identity(sequence.dim, sequence.dim);
  std::map<std::pair<int, double>, Mat> cache;
  for (const Gate& gate : sequence.gates) {
    const auto key = std::make_pair(gate.term_id, gate.dt_ns);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, hermitian_exp(sequence.term_generators[gate.term_id],
                                            gate.dt_ns))
               .first;
    u = it->second * u;
  }
  return u;
}

Mat exact_unitary(const TargetModel& model, double t_ns) {
  return hermitian_exp(model_hamiltonian(model), t_ns);
}

double trotter_error(const GateSequence& sequence, const TargetModel& model,
                     double t_ns) {
  const Mat diff = sequence_unitary(sequence) - exact_unitary(model, t_ns);
  Eigen::JacobiSVD<Mat> svd(diff);
  return svd.singularValues().maxCoeff();
}

Mat BosonEncoding::embed(const Mat& op) const {
  if (op.rows() != n_b || op.cols() != n_b)
    throw ValidationError(kModule, "operator does not match the truncation");
  Mat out = Mat::Zero(qudit_dim, qudit_dim);
  out.topLeftCorner(n_b, n_b) = op;
  return out;
}

BosonEncoding boson_qudit_encoding(int n_b, double qudit_spin) {
  if (n_b < 2) throw ValidationError(kModule, "boson truncation must be >= 2");
  if (!is_half_integer(qudit_spin))
    throw ValidationError(kModule, "qudit spin must be a half-integer");
  const int d = static_cast<int>(std::lround(2.0 * qudit_spin)) + 1;
  if (d < n_b)
    throw ContractError(kModule, "qudit with " + std::to_string(d) +
                                     " levels cannot host " + std::to_string(n_b) +
                                     " Fock states");
  BosonEncoding enc;
  enc.n_b = n_b;
  enc.qudit_dim = d;
  enc.a = Mat::Zero(n_b, n_b);
  for (int n = 0; n + 1 < n_b; ++n) enc.a(n, n + 1) = std::sqrt(double(n + 1));
  enc.number = enc.a.adjoint() * enc.a;
  for (int n = 0; n < n_b; ++n) enc.level_map.push_back(n);
  return enc;
}

CphaseResult switch_cphase(const SwitchParams& params) {
  if (params.rabi_ghz <= 0.0) throw ValidationError(kModule, "rabi must be positive");

  // Three spin-1/2 sites in a 1 T z field; g values chosen to realize the
  // requested gaps.
  spin::SpinSystemSpec spec;
  for (double gap : {params.qubit1_gap_ghz, params.switch_gap_ghz, params.qubit2_gap_ghz}) {
    spin::SpinSite site;
    site.spin = 0.5;
    const double g = gap / kGhzPerTesla;
    site.g = {g, g, g};
    spec.sites.push_back(site);
  }
  spec.couplings.push_back({0, 1, params.j1_ghz});
  spec.couplings.push_back({1, 2, params.j2_ghz});
  spec.field_tesla = Eigen::Vector3d(0.0, 0.0, 1.0);

  const Mat h_static = spin::build_hamiltonian(spec);
  const auto half = spin::spin_operators(0.5);
  const Mat sz_total = spin::total_sz(spec);
  const Mat sx_switch = spin::embed_operator(half.sx, 1, spec);

  // Drive resonant with the switch transition conditioned on both qubits
  // excited (m = +1/2): the exchange ZZ parts shift the switch gap by
  // J1 m1 + J2 m2.
  const double f_drive =
      params.switch_gap_ghz + 0.5 * params.j1_ghz + 0.5 * params.j2_ghz;

  // Selectivity: every other computational state must be detuned from the
  // drive by much more than the Rabi rate. Both couplings exactly zero is
  // the degenerate unconditional limit (global 2*pi excursion, identity
  // gate), not a collision.
  if (params.j1_ghz != 0.0 || params.j2_ghz != 0.0) {
    double min_detuning = std::numeric_limits<double>::infinity();
    for (double m1 : {0.5, -0.5}) {
      for (double m2 : {0.5, -0.5}) {
        if (m1 > 0.0 && m2 > 0.0) continue;
        const double gap =
            params.switch_gap_ghz + params.j1_ghz * m1 + params.j2_ghz * m2;
        min_detuning = std::min(min_detuning, std::abs(gap - f_drive));
      }
    }
    if (min_detuning <= 10.0 * params.rabi_ghz)
      throw ContractError(kModule,
                          "switch excitation is not selective: a spectator state "
                          "is within 10x the Rabi rate of the drive");
  }

  // Rotating frame at the drive frequency on all spins keeps the
  // excitation-conserving exchange terms static; RWA drops only the
  // counter-rotating drive component.
  const Mat h_rot = h_static - f_drive * sz_total + params.rabi_ghz * sx_switch;
  const double duration = 1.0 / params.rabi_ghz;  // full 2*pi excursion
  const Mat u = hermitian_exp(h_rot, duration);

  // Computational block: switch in its ground state (m = -1/2, index 1);
  // logical |0> = qubit ground (index 1), |1> = excited (index 0).
  auto composite = [](int i1, int isw, int i2) { return i1 * 4 + isw * 2 + i2; };
  auto site_index = [](int logical) { return 1 - logical; };
  CphaseResult result;
  result.duration_ns = duration;
  result.gate = Mat::Zero(4, 4);
  for (int b1 = 0; b1 < 2; ++b1)
    for (int b2 = 0; b2 < 2; ++b2)
      for (int c1 = 0; c1 < 2; ++c1)
        for (int c2 = 0; c2 < 2; ++c2)
          result.gate(b1 * 2 + b2, c1 * 2 + c2) =
              u(composite(site_index(b1), 1, site_index(b2)),
                composite(site_index(c1), 1, site_index(c2)));

  double max_leak = 0.0;
  for (int c = 0; c < 4; ++c)
    max_leak = std::max(max_leak, 1.0 - result.gate.col(c).squaredNorm());
  result.leakage = std::max(0.0, max_leak);

  // Strip single-qubit z phases relative to |00>.
  const double phi00 = std::arg(result.gate(0, 0));
  const double phi01 = std::arg(result.gate(1, 1));
  const double phi10 = std::arg(result.gate(2, 2));
  const double phi11 = std::arg(result.gate(3, 3));
  const double a1 = phi10 - phi00, b1 = phi01 - phi00;
  Vec strip(4);
  strip << std::exp(Complex(0, -phi00)), std::exp(Complex(0, -(phi00 + b1))),
      std::exp(Complex(0, -(phi00 + a1))), std::exp(Complex(0, -(phi00 + a1 + b1)));
  result.gate = strip.asDiagonal() * result.gate;
  double phase = phi11 - phi10 - phi01 + phi00;
  while (phase > kPi) phase -= kTwoPi;
  while (phase < -kPi) phase += kTwoPi;
  result.conditional_phase = phase;
  result.entangling_power = entangling_power(result.gate);
  return result;
}

double entangling_power(const Mat& gate_4x4) {
  if (gate_4x4.rows() != 4 || gate_4x4.cols() != 4)
    throw ValidationError(kModule, "entangling power needs a two-qubit gate");
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<Vec> cardinal(6, Vec(2));
  cardinal[0] << 1, 0;
  cardinal[1] << 0, 1;
  cardinal[2] << r, r;
  cardinal[3] << r, -r;
  cardinal[4] << r, Complex(0, r);
  cardinal[5] << r, Complex(0, -r);

  double total = 0.0;
  for (const Vec& psi1 : cardinal) {
    for (const Vec& psi2 : cardinal) {
      Vec out = gate_4x4 * kron(psi1, psi2);
      const double norm = out.norm();
      if (norm < 1e-12) continue;
      out /= norm;
      // Reduced state of qubit 1 and its linear entropy.
      Mat rho_a = Mat::Zero(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k)
            rho_a(i, j) += out[i * 2 + k] * std::conj(out[j * 2 + k]);
      total += 1.0 - (rho_a * rho_a).trace().real();
    }
  }
  return total / 36.0;
}

namespace {

// Pauli-string expansion bookkeeping for the binary encoding.
struct PauliCounts {
  int singles = 0;
  int entanglers = 0;
};

int entanglers_for_weight(int weight) {
  if (weight <= 1) return 0;
  if (weight == 2) return 1;
  return 2 * weight - 3;  // CNOT ladder down to a weight-2 rotation
}

// Counts the exponential cost of `op` (x) optional spin factor, where `op`
// acts on q qubits in base-2 Fock labeling and `extra_weight` accounts for
// qubits appended by the spin factor.
PauliCounts pauli_expansion_counts(const Mat& op, int q, int extra_weight) {
  const auto half = spin::spin_operators(0.5);
  const Mat paulis[4] = {Mat::Identity(2, 2), 2.0 * half.sx, 2.0 * half.sy,
                         2.0 * half.sz};
  const int dim = 1 << q;
  PauliCounts counts;
  const long n_strings = 1L << (2 * q);
  for (long code = 0; code < n_strings; ++code) {
    Mat p = Mat::Identity(1, 1);
    int weight = 0;
    long rest = code;
    for (int k = 0; k < q; ++k) {
      const int digit = static_cast<int>(rest % 4);
      rest /= 4;
      p = kron(p, paulis[digit]);
      if (digit != 0) ++weight;
    }
    const Complex coeff = (p.adjoint() * op).trace() / double(dim);
    if (std::abs(coeff) < 1e-12) continue;
    const int total_weight = weight + extra_weight;
    if (total_weight <= 1 && total_weight > 0)
      ++counts.singles;
    else if (total_weight >= 2)
      counts.entanglers += entanglers_for_weight(total_weight);
  }
  return counts;
}

}  // namespace

ResourcePair resource_compare(const SpinBosonModel& model) {
  const int n_b = model.n_b;
  if (n_b < 2 || (n_b & (n_b - 1)) != 0)
    throw ValidationError(kModule, "binary encoding needs n_b to be a power of 2");
  const int q = static_cast<int>(std::lround(std::log2(double(n_b))));
  constexpr double kNominalRabi = 0.01;  // GHz, for duration accounting
  const double pi_pulse = 1.0 / (2.0 * kNominalRabi);

  ResourcePair pair;
  pair.n_b = n_b;

  // Qudit route: one single-qudit rotation per local term, one qubit-qudit
  // entangler for the interaction.
  pair.qudit.single_qudit_gates = 2;
  pair.qudit.two_body_entanglers = 1;
  pair.qudit.hardware_dim = 2 * n_b;
  pair.qudit.target_dim = 2 * n_b;
  pair.qudit.total_duration_ns =
      (pair.qudit.single_qudit_gates + pair.qudit.two_body_entanglers) * pi_pulse;

  // Binary route: expand a+a and sigma_x (x) (a + a+) into Pauli strings.
  const BosonEncoding enc = boson_qudit_encoding(n_b, 0.5 * (n_b - 1));
  const Mat x_b = enc.a + enc.a.adjoint();
  const PauliCounts number_counts = pauli_expansion_counts(enc.number, q, 0);
  const PauliCounts coupling_counts = pauli_expansion_counts(x_b, q, 1);
  pair.binary.single_qudit_gates = number_counts.singles + 1;  // + spin energy
  pair.binary.two_body_entanglers =
      number_counts.entanglers + coupling_counts.entanglers;
  pair.binary.hardware_dim = 1 << (q + 1);
  pair.binary.target_dim = 2 * n_b;
  pair.binary.total_duration_ns =
      (pair.binary.single_qudit_gates + pair.binary.two_body_entanglers) * pi_pulse;
  return pair;
}

}  // namespace spinqpu::dqs
