// SPDX-License-Identifier: Apache-2.0
#include "spinqpu/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace spinqpu::transitions {

TransitionTable transition_table(const spin::EigenSystem& eig, const Mat& drive_op,
                                 double drive_amplitude_ghz) {
  if (drive_amplitude_ghz <= 0.0)
    throw ValidationError(kModule, "drive amplitude must be positive");
  if (drive_op.rows() != eig.dim() || drive_op.cols() != eig.dim())
    throw ValidationError(kModule, "drive operator dimension mismatch");
  const Mat drive_eig = eig.states.adjoint() * drive_op * eig.states;
  TransitionTable table;
  table.drive_amplitude_ghz = drive_amplitude_ghz;
  const int d = eig.dim();
  table.rows.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      TransitionRow row;
      row.i = i;
      row.j = j;
      row.freq_ghz = eig.energies_ghz[j] - eig.energies_ghz[i];
      row.rabi_ghz = drive_amplitude_ghz * std::abs(drive_eig(i, j));
      table.rows.push_back(row);
    }
  }
  return table;
}

TransitionTable transition_table(const spin::SpinSystemSpec& spec,
                                 const spin::EigenSystem& eig,
                                 double drive_amplitude_ghz) {
  return transition_table(eig, spin::total_sx(spec), drive_amplitude_ghz);
}

TransitionGraph addressable_edges(const TransitionTable& table, double omega_r_ghz,
                                  double t2_ns) {
  if (omega_r_ghz <= 0.0) throw ValidationError(kModule, "omega_r must be positive");
  if (t2_ns <= 0.0) throw ValidationError(kModule, "t2 must be positive");

  TransitionGraph graph;
  graph.omega_r_ghz = omega_r_ghz;
  graph.t2_ns = t2_ns;

  int n_nodes = 0;
  for (const auto& row : table.rows) n_nodes = std::max(n_nodes, row.j + 1);
  graph.n_nodes = n_nodes;

  // Blocking set: every line that is not forbidden in practice.
  const double nonzero_rabi = 1e-6 * table.drive_amplitude_ghz;
  std::vector<const TransitionRow*> lines;
  for (const auto& row : table.rows)
    if (row.rabi_ghz > nonzero_rabi) lines.push_back(&row);

  graph.min_isolation_ghz = std::numeric_limits<double>::infinity();
  graph.degenerate_pair_count = 0;
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      const double sep = std::abs(lines[a]->freq_ghz - lines[b]->freq_ghz);
      graph.min_isolation_ghz = std::min(graph.min_isolation_ghz, sep);
      if (sep <= omega_r_ghz) ++graph.degenerate_pair_count;
    }
  }
  if (lines.size() < 2) graph.min_isolation_ghz = 0.0;

  const double rabi_floor = 1.0 / t2_ns;  // GHz and 1/ns coincide numerically
  for (const auto& row : table.rows) {
    if (row.rabi_ghz < rabi_floor) continue;
    bool isolated = true;
    for (const TransitionRow* other : lines) {
      if (other == &row) continue;
      if (other->i == row.i && other->j == row.j) continue;
      if (std::abs(other->freq_ghz - row.freq_ghz) <= omega_r_ghz) {
        isolated = false;
        break;
      }
    }
    if (!isolated) continue;
    graph.edges.push_back({row.i, row.j, 1.0 / (2.0 * row.rabi_ghz)});
  }
  return graph;
}

RateMatrix operation_rates(const TransitionGraph& graph) {
  const int n = graph.n_nodes;
  RateMatrix rates;
  rates.w_ghz = RealMat::Zero(n, n);
  rates.reachable = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(
      n, n, false);

  std::vector<std::vector<std::pair<int, double>>> adjacency(n);
  for (const auto& e : graph.edges) {
    if (e.pulse_time_ns <= 0.0)
      throw ContractError(kModule, "edge with non-positive pulse time");
    adjacency[e.i].push_back({e.j, e.pulse_time_ns});
    adjacency[e.j].push_back({e.i, e.pulse_time_ns});
  }

  const double inf = std::numeric_limits<double>::infinity();
  for (int src = 0; src < n; ++src) {
    std::vector<double> dist(n, inf);
    dist[src] = 0.0;
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> frontier;
    frontier.push({0.0, src});
    while (!frontier.empty()) {
      const auto [d, u] = frontier.top();
      frontier.pop();
      if (d > dist[u]) continue;
      for (const auto& [v, w] : adjacency[u]) {
        const double cand = dist[u] + w;
        if (cand < dist[v]) {
          dist[v] = cand;
          frontier.push({cand, v});
        }
      }
    }
    for (int dst = 0; dst < n; ++dst) {
      if (dst == src) {
        rates.reachable(src, dst) = true;
        rates.w_ghz(src, dst) = inf;  // identity marker
      } else if (dist[dst] < inf) {
        rates.reachable(src, dst) = true;
        rates.w_ghz(src, dst) = 1.0 / dist[dst];
      }
    }
  }
  return rates;
}

Universality universality_parameter(const RateMatrix& rates, double t2_ns) {
  Universality result;
  const int n = static_cast<int>(rates.w_ghz.rows());
  double w_min = std::numeric_limits<double>::infinity();
  bool all_reachable = true;
  for (int i = 0; i < n && all_reachable; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!rates.reachable(i, j)) {
        all_reachable = false;
        break;
      }
      w_min = std::min(w_min, rates.w_ghz(i, j));
    }
  }
  if (!all_reachable || n < 2 || !std::isfinite(w_min)) {
    result.u_param = 0.0;
    result.w_min_ghz = 0.0;
    result.universal = false;
    return result;
  }
  result.w_min_ghz = w_min;
  result.u_param = t2_ns * w_min;
  result.universal = result.u_param > 1.0;
  return result;
}

std::vector<SweepPoint> field_sweep(const spin::SpinSystemSpec& spec,
                                    const std::vector<double>& b_tesla,
                                    double drive_amplitude_ghz, double omega_r_ghz,
                                    double t2_ns, int threads) {
  if (b_tesla.empty()) throw ValidationError(kModule, "empty sweep");
  spec.validate();

  Eigen::Vector3d direction = spec.field_tesla;
  if (direction.norm() < 1e-15)
    direction = Eigen::Vector3d(0.0, 0.0, 1.0);
  else
    direction.normalize();

  const Mat drive_op = spin::total_sx(spec);
  std::vector<SweepPoint> points(b_tesla.size());
  parallel_for(b_tesla.size(), threads, [&](std::size_t k) {
    spin::SpinSystemSpec local = spec;
    local.field_tesla = b_tesla[k] * direction;
    const spin::EigenSystem eig = spin::system_eigensystem(local);
    const TransitionTable table = transition_table(eig, drive_op, drive_amplitude_ghz);
    const TransitionGraph graph = addressable_edges(table, omega_r_ghz, t2_ns);
    const Universality uni = universality_parameter(operation_rates(graph), t2_ns);
    points[k] = {b_tesla[k],          uni.u_param,
                 uni.universal,       static_cast<int>(graph.edges.size()),
                 graph.min_isolation_ghz, graph.degenerate_pair_count};
  });
  return points;
}

}  // namespace spinqpu::transitions
