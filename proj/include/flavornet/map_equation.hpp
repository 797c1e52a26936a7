#pragma once

// Two-level map equation for undirected weighted networks.
//
// With total edge weight W, node visit rates p_a = strength(a) / 2W and
// module exit rates q_i = cut(i) / 2W, the description length per step is
//
//   L = q H(Q) + sum_i pc_i H(P_i),   q = sum_i q_i,  pc_i = q_i + sum_{a in i} p_a
//
// which expands to
//
//   L = plogp(q) - 2 sum_i plogp(q_i) - sum_a plogp(p_a) + sum_i plogp(pc_i)
//
// with plogp(x) = x log2 x. The expanded form is what the optimizer updates
// incrementally; the node term is constant over partitions.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"

namespace flavornet {

inline double plogp(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

/// Running sums of the module-dependent terms of the map equation.
struct MapEquationTerms {
  double exit_sum = 0.0;             // q
  double exit_log_exit = 0.0;        // sum_i plogp(q_i)
  double total_log_total = 0.0;      // sum_i plogp(q_i + p_i)
  double node_log_node = 0.0;        // sum_a plogp(p_a)

  double codelength() const {
    return plogp(exit_sum) - 2.0 * exit_log_exit - node_log_node + total_log_total;
  }

  void add_module(double exit, double flow) {
    exit_sum += exit;
    exit_log_exit += plogp(exit);
    total_log_total += plogp(exit + flow);
  }

  void remove_module(double exit, double flow) {
    exit_sum -= exit;
    exit_log_exit -= plogp(exit);
    total_log_total -= plogp(exit + flow);
  }
};

/// Codelength in bits of `assignment` (node -> module label) on `n`.
/// Requires at least one edge and a label for every node of `n`.
inline double codelength(const Network& n, const std::map<NodeId, int>& assignment) {
  const double total = n.total_weight();
  if (!(total > 0.0)) throw DomainError("codelength needs a network with at least one edge");
  for (const auto& id : n.nodes()) {
    if (assignment.find(id) == assignment.end()) {
      throw DomainError("partition does not assign node '" + id + "'");
    }
  }
  const double two_w = 2.0 * total;
  std::map<int, double> exit;
  std::map<int, double> flow;
  MapEquationTerms terms;
  for (const auto& id : n.nodes()) {
    const int m = assignment.at(id);
    const double p = n.strength(id) / two_w;
    flow[m] += p;
    exit[m] += 0.0;
    terms.node_log_node += plogp(p);
    for (const auto& [nb, w] : n.neighbors(id)) {
      if (assignment.at(nb) != m) exit[m] += w / two_w;
    }
  }
  for (const auto& [m, q] : exit) terms.add_module(q, flow[m]);
  return std::max(0.0, terms.codelength());
}

}  // namespace flavornet
