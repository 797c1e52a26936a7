#pragma once

// Removal of ingredient pairs that both cuisines' training graphs claim.
//
// For a node n of a Western connected component C:
//   D_p = Western edges from n into C,  d_p = sum of their weights
//   D_n = Eastern edges from n into C,  d_n = sum of their weights
//   discrepancy(n) = max(d_p / d_n, d_n / d_p), defined only when D_n != {}.
//
// sanity_check repeats, until no node has a discrepancy: recompute Western
// components; in each component take the node of maximal discrepancy and
//   value < 3        -> drop D_p from Western and D_n from Eastern
//   d_p > d_n        -> drop D_n from Eastern
//   otherwise        -> drop D_p from Western (D_n when D_p is empty)

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"

namespace flavornet {

inline constexpr double kDiscrepancyThreshold = 3.0;

struct DiscrepancyReport {
  NodeId node;
  double d_p = 0.0;
  double d_n = 0.0;
  double value = 0.0;  // +inf when d_p == 0
};

/// Discrepancy of `node` inside the Western component `component` (sorted),
/// or nullopt when the node has no Eastern edge into the component.
inline std::optional<DiscrepancyReport> node_discrepancy(const NodeId& node,
                                                         const std::vector<NodeId>& component,
                                                         const Network& western,
                                                         const Network& eastern) {
  if (!std::binary_search(component.begin(), component.end(), node)) {
    throw DomainError("node '" + node + "' is not in the component");
  }
  auto in_component = [&](const NodeId& u) {
    return std::binary_search(component.begin(), component.end(), u);
  };
  DiscrepancyReport r{node, 0.0, 0.0, 0.0};
  bool any_eastern = false;
  for (const auto& [u, w] : eastern.neighbors(node)) {
    if (in_component(u)) {
      r.d_n += w;
      any_eastern = true;
    }
  }
  if (!any_eastern) return std::nullopt;
  for (const auto& [u, w] : western.neighbors(node)) {
    if (in_component(u)) r.d_p += w;
  }
  r.value = r.d_p > 0.0 ? std::max(r.d_p / r.d_n, r.d_n / r.d_p)
                        : std::numeric_limits<double>::infinity();
  return r;
}

enum class SanityAction { kDropBoth, kDropEastern, kDropWestern };

inline std::string_view to_string(SanityAction a) {
  switch (a) {
    case SanityAction::kDropBoth: return "drop_both";
    case SanityAction::kDropEastern: return "drop_eastern";
    case SanityAction::kDropWestern: return "drop_western";
  }
  return "";
}

struct AuditEntry {
  std::size_t iteration = 0;
  NodeId component_smallest_node;
  NodeId node;
  double d_p = 0.0;
  double d_n = 0.0;
  double value = 0.0;
  SanityAction action = SanityAction::kDropBoth;

  /// Infinite values serialise as null.
  nlohmann::json to_json() const {
    nlohmann::json j{{"iteration", iteration},
                     {"component_smallest_node", component_smallest_node},
                     {"node", node},
                     {"d_p", d_p},
                     {"d_n", d_n},
                     {"value", nullptr},
                     {"action", std::string(to_string(action))}};
    if (std::isfinite(value)) j["value"] = value;
    return j;
  }
};

struct SanityResult {
  Network western;
  Network eastern;
  std::vector<AuditEntry> log;
  std::size_t iterations = 0;  // outer passes that removed at least one edge
};

namespace detail {

// Larger value first, then more evidence (d_p + d_n), then smaller id.
inline bool more_discrepant(const DiscrepancyReport& a, const DiscrepancyReport& b) {
  if (a.value != b.value) return a.value > b.value;
  const double ea = a.d_p + a.d_n;
  const double eb = b.d_p + b.d_n;
  if (ea != eb) return ea > eb;
  return a.node < b.node;
}

inline void drop_edges_into(Network& g, const NodeId& node, const std::vector<NodeId>& component) {
  std::vector<NodeId> targets;
  for (const auto& [u, _] : g.neighbors(node)) {
    if (std::binary_search(component.begin(), component.end(), u)) targets.push_back(u);
  }
  for (const auto& u : targets) g.remove_edge(node, u);
}

}  // namespace detail

inline SanityResult sanity_check(const Network& western, const Network& eastern) {
  SanityResult res{western, eastern, {}, 0};
  while (true) {
    bool changed = false;
    const auto components = connected_components(res.western);
    for (const auto& comp : components) {
      std::optional<DiscrepancyReport> worst;
      for (const auto& node : comp) {
        auto d = node_discrepancy(node, comp, res.western, res.eastern);
        if (d && (!worst || detail::more_discrepant(*d, *worst))) worst = std::move(d);
      }
      if (!worst) continue;

      SanityAction action;
      if (worst->value < kDiscrepancyThreshold) {
        action = SanityAction::kDropBoth;
      } else if (worst->d_p > worst->d_n || worst->d_p == 0.0) {
        // With D_p empty the last branch would remove nothing; D_n goes instead.
        action = SanityAction::kDropEastern;
      } else {
        action = SanityAction::kDropWestern;
      }
      if (action != SanityAction::kDropEastern) detail::drop_edges_into(res.western, worst->node, comp);
      if (action != SanityAction::kDropWestern) detail::drop_edges_into(res.eastern, worst->node, comp);

      res.log.push_back({res.iterations, comp.front(), worst->node, worst->d_p, worst->d_n,
                         worst->value, action});
      changed = true;
    }
    if (!changed) break;
    ++res.iterations;
  }
  return res;
}

}  // namespace flavornet
