// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles kept independent of the implementation paths they check.
#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "spinqpu/transitions.hpp"

namespace spinqpu::testing {

/// Exhaustive simple-path enumeration over an undirected weighted graph:
/// minimal total pulse time from src to every node. Accumulates weights in
/// path order, matching Dijkstra's relaxation arithmetic bit for bit on the
/// optimal path.
class BruteForcePaths {
 public:
  explicit BruteForcePaths(const transitions::TransitionGraph& graph)
      : n_(graph.n_nodes), adjacency_(graph.n_nodes) {
    for (const auto& e : graph.edges) {
      adjacency_[e.i].push_back({e.j, e.pulse_time_ns});
      adjacency_[e.j].push_back({e.i, e.pulse_time_ns});
    }
  }

  std::vector<double> shortest_from(int src) const {
    std::vector<double> best(n_, std::numeric_limits<double>::infinity());
    std::vector<bool> visited(n_, false);
    best[src] = 0.0;
    visited[src] = true;
    walk(src, 0.0, visited, best);
    return best;
  }

 private:
  void walk(int node, double acc, std::vector<bool>& visited,
            std::vector<double>& best) const {
    for (const auto& [next, weight] : adjacency_[node]) {
      if (visited[next]) continue;
      const double total = acc + weight;
      if (total < best[next]) best[next] = total;
      visited[next] = true;
      walk(next, total, visited, best);
      visited[next] = false;
    }
  }

  int n_;
  std::vector<std::vector<std::pair<int, double>>> adjacency_;
};

/// Least-squares slope of log(y) against log(x).
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace spinqpu::testing
