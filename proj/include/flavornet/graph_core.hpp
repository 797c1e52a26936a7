#pragma once

// Bipartite ingredient/compound graphs, the weighted one-mode ingredient
// network obtained by projecting them, per-node edge filtration, connected
// components and degree statistics.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flavornet/error.hpp"

namespace flavornet {

using NodeId = std::string;

/// Unordered pair of node identifiers, stored with `first <= second`.
struct NodePair {
  NodeId first;
  NodeId second;

  NodePair() = default;
  NodePair(NodeId a, NodeId b) : first(std::move(a)), second(std::move(b)) {
    if (second < first) std::swap(first, second);
  }

  bool is_self() const { return first == second; }

  friend auto operator<=>(const NodePair&, const NodePair&) = default;
  friend bool operator==(const NodePair&, const NodePair&) = default;
};

/// Ingredients on one side, compounds on the other, edges mean "contains".
class BipartiteGraph {
 public:
  /// Inserts the containment edge, creating endpoints as needed. Duplicate
  /// edges are ignored. Throws IntegrityError if an identifier would end up
  /// on both sides.
  void add_edge(const NodeId& ingredient, const NodeId& compound) {
    if (compounds_.count(ingredient) != 0) {
      throw IntegrityError("identifier '" + ingredient + "' is already a compound");
    }
    if (ingredients_.count(compound) != 0) {
      throw IntegrityError("identifier '" + compound + "' is already an ingredient");
    }
    if (ingredient == compound) {
      throw IntegrityError("identifier '" + ingredient + "' used as both ingredient and compound");
    }
    ingredients_.insert(ingredient);
    compounds_.insert(compound);
    if (contents_[ingredient].insert(compound).second) ++edge_count_;
  }

  /// Adds an ingredient without compounds.
  void add_ingredient(const NodeId& ingredient) {
    if (compounds_.count(ingredient) != 0) {
      throw IntegrityError("identifier '" + ingredient + "' is already a compound");
    }
    ingredients_.insert(ingredient);
    contents_[ingredient];
  }

  const std::set<NodeId>& ingredients() const noexcept { return ingredients_; }
  const std::set<NodeId>& compounds() const noexcept { return compounds_; }
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Compounds contained in `ingredient`; empty for unknown identifiers.
  const std::set<NodeId>& compounds_of(const NodeId& ingredient) const {
    static const std::set<NodeId> kEmpty;
    auto it = contents_.find(ingredient);
    return it == contents_.end() ? kEmpty : it->second;
  }

  std::vector<std::pair<NodeId, NodeId>> edges() const {
    std::vector<std::pair<NodeId, NodeId>> out;
    out.reserve(edge_count_);
    for (const auto& [ing, comps] : contents_) {
      for (const auto& c : comps) out.emplace_back(ing, c);
    }
    return out;
  }

 private:
  std::set<NodeId> ingredients_;
  std::set<NodeId> compounds_;
  std::map<NodeId, std::set<NodeId>> contents_;
  std::size_t edge_count_ = 0;
};

struct WeightedEdge {
  NodeId a;  // a < b
  NodeId b;
  double weight;
};

/// Simple undirected weighted graph. Absent pairs have weight zero and are
/// never stored; self-loops are rejected.
class Network {
 public:
  using Adjacency = std::map<NodeId, double>;

  void add_node(const NodeId& id) { adj_[id]; }

  /// Sets the weight of {a, b}, creating both nodes.
  void set_edge(const NodeId& a, const NodeId& b, double weight) {
    check_pair(a, b, weight);
    auto& ab = adj_[a];
    auto [it, inserted] = ab.insert_or_assign(b, weight);
    adj_[b][a] = weight;
    if (inserted) ++edge_count_;
  }

  /// Adds `weight` to {a, b}, creating the edge if absent.
  void add_weight(const NodeId& a, const NodeId& b, double weight) {
    check_pair(a, b, weight);
    auto& ab = adj_[a];
    auto it = ab.find(b);
    if (it == ab.end()) {
      ab.emplace(b, weight);
      adj_[b][a] = weight;
      ++edge_count_;
    } else {
      it->second += weight;
      adj_[b][a] = it->second;
    }
  }

  bool remove_edge(const NodeId& a, const NodeId& b) {
    auto ia = adj_.find(a);
    if (ia == adj_.end() || ia->second.erase(b) == 0) return false;
    adj_[b].erase(a);
    --edge_count_;
    return true;
  }

  bool has_node(const NodeId& id) const { return adj_.count(id) != 0; }

  bool has_edge(const NodeId& a, const NodeId& b) const { return weight(a, b) > 0.0; }

  double weight(const NodeId& a, const NodeId& b) const {
    auto ia = adj_.find(a);
    if (ia == adj_.end()) return 0.0;
    auto ib = ia->second.find(b);
    return ib == ia->second.end() ? 0.0 : ib->second;
  }

  /// Neighbours of `id` with edge weights; empty for unknown nodes.
  const Adjacency& neighbors(const NodeId& id) const {
    static const Adjacency kEmpty;
    auto it = adj_.find(id);
    return it == adj_.end() ? kEmpty : it->second;
  }

  std::size_t degree(const NodeId& id) const { return neighbors(id).size(); }

  double strength(const NodeId& id) const {
    double s = 0.0;
    for (const auto& [_, w] : neighbors(id)) s += w;
    return s;
  }

  double max_incident_weight(const NodeId& id) const {
    double m = 0.0;
    for (const auto& [_, w] : neighbors(id)) m = std::max(m, w);
    return m;
  }

  std::size_t node_count() const noexcept { return adj_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    out.reserve(adj_.size());
    for (const auto& [id, _] : adj_) out.push_back(id);
    return out;
  }

  /// Calls `fn(a, b, weight)` once per edge with a < b, in lexicographic order.
  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (const auto& [a, nbrs] : adj_) {
      for (auto it = nbrs.upper_bound(a); it != nbrs.end(); ++it) fn(a, it->first, it->second);
    }
  }

  std::vector<WeightedEdge> edges() const {
    std::vector<WeightedEdge> out;
    out.reserve(edge_count_);
    for_each_edge([&](const NodeId& a, const NodeId& b, double w) { out.push_back({a, b, w}); });
    return out;
  }

  double total_weight() const {
    double t = 0.0;
    for_each_edge([&](const NodeId&, const NodeId&, double w) { t += w; });
    return t;
  }

  friend bool operator==(const Network&, const Network&) = default;

 private:
  static void check_pair(const NodeId& a, const NodeId& b, double weight) {
    if (a == b) throw DomainError("self-loop on '" + a + "'");
    if (!(weight > 0.0)) throw DomainError("edge weight must be positive");
  }

  std::map<NodeId, Adjacency> adj_;
  std::size_t edge_count_ = 0;
};

using IngredientNetwork = Network;
using CooccurrenceGraph = Network;

/// Weight of {a, b} is the number of compounds shared by a and b. Every
/// ingredient becomes a node, isolated or not.
inline IngredientNetwork project(const BipartiteGraph& g) {
  std::map<NodeId, std::vector<const NodeId*>> holders;
  for (const auto& ing : g.ingredients()) {
    for (const auto& c : g.compounds_of(ing)) holders[c].push_back(&ing);
  }
  IngredientNetwork out;
  for (const auto& ing : g.ingredients()) out.add_node(ing);
  for (const auto& [_, ings] : holders) {
    for (std::size_t i = 0; i < ings.size(); ++i) {
      for (std::size_t j = i + 1; j < ings.size(); ++j) out.add_weight(*ings[i], *ings[j], 1.0);
    }
  }
  return out;
}

/// Keeps edge {u, v} of weight w iff w >= factor * wmax(u) or
/// w >= factor * wmax(v), with wmax taken from the input network. The node
/// set is preserved.
inline Network filter_local(const Network& n, double factor) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    throw DomainError("filtration factor must lie in [0, 1]");
  }
  std::map<NodeId, double> threshold;
  for (const auto& id : n.nodes()) threshold[id] = factor * n.max_incident_weight(id);

  Network out;
  for (const auto& id : n.nodes()) out.add_node(id);
  n.for_each_edge([&](const NodeId& a, const NodeId& b, double w) {
    if (w >= threshold[a] || w >= threshold[b]) out.set_edge(a, b, w);
  });
  return out;
}

/// Maximal connected node sets. Members are sorted; components are ordered
/// by their smallest member.
inline std::vector<std::vector<NodeId>> connected_components(const Network& n) {
  std::vector<std::vector<NodeId>> out;
  std::set<NodeId> seen;
  // nodes() is sorted, so the first unseen node is the smallest of its component
  for (const auto& start : n.nodes()) {
    if (!seen.insert(start).second) continue;
    std::vector<NodeId> comp{start};
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (const auto& [nb, _] : n.neighbors(comp[head])) {
        if (seen.insert(nb).second) comp.push_back(nb);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

struct DegreeHistogram {
  std::map<std::size_t, std::size_t> counts;  // degree -> number of nodes
  std::size_t nodes = 0;
  std::size_t edges = 0;
  double mean_degree = 0.0;
  double density = 0.0;
};

/// Mean degree and density of a simple graph with the given size.
inline double mean_degree(std::size_t nodes, std::size_t edges) {
  return nodes == 0 ? 0.0 : 2.0 * static_cast<double>(edges) / static_cast<double>(nodes);
}

inline double density(std::size_t nodes, std::size_t edges) {
  if (nodes < 2) return 0.0;
  const double v = static_cast<double>(nodes);
  return 2.0 * static_cast<double>(edges) / (v * (v - 1.0));
}

inline DegreeHistogram degree_histogram(const Network& n) {
  DegreeHistogram h;
  for (const auto& id : n.nodes()) ++h.counts[n.degree(id)];
  h.nodes = n.node_count();
  h.edges = n.edge_count();
  h.mean_degree = mean_degree(h.nodes, h.edges);
  h.density = density(h.nodes, h.edges);
  return h;
}

}  // namespace flavornet
