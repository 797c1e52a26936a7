#pragma once

// Constrained two-level map-equation community detection.
//
// Must-link pairs are contracted into super-nodes (their internal weight
// stays in the node's visit rate), cannot-link pairs become forbidden
// co-memberships and lose any direct edge. The optimizer is a greedy
// local-move / aggregate loop over the contracted graph, repeated for a
// number of seeded trials; the best flat partition is returned.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"
#include "flavornet/graph_io.hpp"
#include "flavornet/map_equation.hpp"
#include "flavornet/random.hpp"

namespace flavornet {

/// Disjoint community assignment. Community ids are 0..k-1, numbered in
/// order of each community's smallest member id.
struct Partition {
  std::map<NodeId, int> assignment;
  double codelength = 0.0;

  bool contains(const NodeId& id) const { return assignment.count(id) != 0; }

  /// Community of `id`, or -1 if the node is not in the partition.
  int community_of(const NodeId& id) const {
    auto it = assignment.find(id);
    return it == assignment.end() ? -1 : it->second;
  }

  bool same_community(const NodeId& a, const NodeId& b) const {
    const int ca = community_of(a);
    return ca >= 0 && ca == community_of(b);
  }

  std::size_t community_count() const {
    int top = -1;
    for (const auto& [_, c] : assignment) top = std::max(top, c);
    return static_cast<std::size_t>(top + 1);
  }

  /// Members of every community, indexed by community id.
  std::vector<std::vector<NodeId>> communities() const {
    std::vector<std::vector<NodeId>> out(community_count());
    for (const auto& [id, c] : assignment) out[static_cast<std::size_t>(c)].push_back(id);
    return out;
  }
};

/// Relabels arbitrary module labels into the canonical dense numbering.
inline std::map<NodeId, int> canonical_labels(const std::map<NodeId, int>& raw) {
  std::map<int, int> relabel;
  std::map<NodeId, int> out;
  for (const auto& [id, label] : raw) {
    auto [it, _] = relabel.try_emplace(label, static_cast<int>(relabel.size()));
    out.emplace(id, it->second);
  }
  return out;
}

struct ConstraintSet {
  std::set<NodePair> must_link;
  std::set<NodePair> cannot_link;
};

namespace detail {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// The network the optimizer actually sees: must-link groups contracted,
/// cannot-link edges removed, forbidden super-node pairs recorded.
struct ConstrainedContext {
  Network network;                                   // input minus cannot-link edges
  std::vector<std::vector<NodeId>> groups;           // super-node -> sorted members
  std::map<NodeId, std::size_t> group_of;
  std::vector<double> self_weight;                   // internal weight of each group
  std::vector<std::map<std::size_t, double>> links;  // super-node adjacency
  std::vector<std::set<std::size_t>> forbidden;      // super-nodes that may not share a module
  std::size_t dropped_pairs = 0;                     // constraint pairs touching absent nodes
};

/// Throws ConstraintError when the must-link closure contains a cannot-link pair.
inline ConstrainedContext apply_constraints(const Network& n, const ConstraintSet& c) {
  ConstrainedContext ctx;
  ctx.network = n;
  const auto nodes = n.nodes();
  std::map<NodeId, std::size_t> index;
  for (std::size_t i = 0; i < nodes.size(); ++i) index.emplace(nodes[i], i);

  auto usable = [&](const NodePair& p) {
    return !p.is_self() && index.count(p.first) != 0 && index.count(p.second) != 0;
  };

  detail::UnionFind uf(nodes.size());
  for (const auto& p : c.must_link) {
    if (!usable(p)) {
      ++ctx.dropped_pairs;
      continue;
    }
    uf.unite(index[p.first], index[p.second]);
  }
  std::vector<NodePair> cannot;
  for (const auto& p : c.cannot_link) {
    if (!usable(p)) {
      ++ctx.dropped_pairs;
      continue;
    }
    if (uf.find(index[p.first]) == uf.find(index[p.second])) {
      throw ConstraintError("cannot-link pair (" + p.first + ", " + p.second +
                            ") is joined by must-link constraints");
    }
    cannot.push_back(p);
  }

  for (const auto& p : cannot) ctx.network.remove_edge(p.first, p.second);

  std::map<std::size_t, std::size_t> root_to_group;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto [it, fresh] = root_to_group.try_emplace(uf.find(i), ctx.groups.size());
    if (fresh) ctx.groups.emplace_back();
    ctx.groups[it->second].push_back(nodes[i]);
    ctx.group_of.emplace(nodes[i], it->second);
  }

  const std::size_t k = ctx.groups.size();
  ctx.self_weight.assign(k, 0.0);
  ctx.links.assign(k, {});
  ctx.forbidden.assign(k, {});
  ctx.network.for_each_edge([&](const NodeId& a, const NodeId& b, double w) {
    const auto ga = ctx.group_of[a];
    const auto gb = ctx.group_of[b];
    if (ga == gb) {
      ctx.self_weight[ga] += w;
    } else {
      ctx.links[ga][gb] += w;
      ctx.links[gb][ga] += w;
    }
  });
  for (const auto& p : cannot) {
    const auto ga = ctx.group_of[p.first];
    const auto gb = ctx.group_of[p.second];
    ctx.forbidden[ga].insert(gb);
    ctx.forbidden[gb].insert(ga);
  }
  return ctx;
}

namespace detail {

// Graph of one optimisation level, in flow units (weights divided by 2W).
struct FlowLevel {
  std::vector<double> flow;                                       // p of each node
  std::vector<double> out;                                        // exit flow of each node alone
  std::vector<std::vector<std::pair<std::size_t, double>>> adj;   // neighbour, edge flow
  std::vector<std::vector<std::size_t>> members;                  // base super-nodes inside
};

inline FlowLevel base_level(const ConstrainedContext& ctx, double two_w) {
  const std::size_t k = ctx.groups.size();
  FlowLevel lvl;
  lvl.flow.assign(k, 0.0);
  lvl.out.assign(k, 0.0);
  lvl.adj.assign(k, {});
  lvl.members.resize(k);
  for (std::size_t g = 0; g < k; ++g) {
    lvl.members[g] = {g};
    double external = 0.0;
    for (const auto& [h, w] : ctx.links[g]) {
      lvl.adj[g].emplace_back(h, w / two_w);
      external += w;
    }
    lvl.out[g] = external / two_w;
    lvl.flow[g] = (2.0 * ctx.self_weight[g] + external) / two_w;
  }
  return lvl;
}

class LocalMover {
 public:
  // base_module[b] is written for every base super-node b on each move.
  LocalMover(const FlowLevel& lvl, const std::vector<std::set<std::size_t>>& forbidden,
             std::vector<std::size_t>& base_module)
      : lvl_(lvl), forbidden_(forbidden), base_module_(base_module) {
    const std::size_t n = lvl.flow.size();
    module_.resize(n);
    std::iota(module_.begin(), module_.end(), std::size_t{0});
    exit_ = lvl.out;
    flow_ = lvl.flow;
    size_.assign(n, 1);
    for (std::size_t m = 0; m < n; ++m) exit_sum_ += exit_[m];
  }

  /// Runs passes in random order until a pass moves nothing. Returns true if
  /// any node moved.
  bool run(Rng& rng) {
    const std::size_t n = module_.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    bool any = false;
    std::map<std::size_t, double> to_module;
    for (std::size_t pass = 0; pass < kMaxPasses; ++pass) {
      std::shuffle(order.begin(), order.end(), rng);
      bool moved = false;
      for (auto u : order) {
        if (lvl_.adj[u].empty()) continue;
        to_module.clear();
        for (const auto& [v, w] : lvl_.adj[u]) to_module[module_[v]] += w;
        const std::size_t from = module_[u];
        const double w_from = to_module.count(from) != 0 ? to_module[from] : 0.0;

        double best_delta = 0.0;
        std::size_t best = from;
        for (const auto& [m, w_to] : to_module) {
          if (m == from || !allowed(u, m)) continue;
          const double d = delta(u, from, w_from, m, w_to);
          if (d < best_delta - kEpsilon) {
            best_delta = d;
            best = m;
          }
        }
        if (size_[from] > 1 && !free_.empty()) {
          const std::size_t empty = free_.back();
          const double d = delta(u, from, w_from, empty, 0.0);
          if (d < best_delta - kEpsilon) {
            best_delta = d;
            best = empty;
          }
        }
        if (best != from) {
          apply(u, from, w_from, best, best == from ? 0.0 : weight_to(to_module, best));
          moved = true;
          any = true;
        }
      }
      if (!moved) break;
    }
    return any;
  }

  const std::vector<std::size_t>& modules() const { return module_; }

 private:
  static constexpr std::size_t kMaxPasses = 1000;
  static constexpr double kEpsilon = 1e-12;

  static double weight_to(const std::map<std::size_t, double>& to_module, std::size_t m) {
    auto it = to_module.find(m);
    return it == to_module.end() ? 0.0 : it->second;
  }

  bool allowed(std::size_t u, std::size_t target) const {
    for (auto b : lvl_.members[u]) {
      for (auto f : forbidden_[b]) {
        if (base_module_[f] == target) return false;
      }
    }
    return true;
  }

  double delta(std::size_t u, std::size_t from, double w_from, std::size_t to,
               double w_to) const {
    const double p = lvl_.flow[u];
    const double out = lvl_.out[u];
    const double old_a = exit_[from], old_b = exit_[to];
    const double new_a = old_a - out + 2.0 * w_from;
    const double new_b = old_b + out - 2.0 * w_to;
    const double new_sum = exit_sum_ - old_a - old_b + new_a + new_b;
    return plogp(new_sum) - plogp(exit_sum_) -
           2.0 * (plogp(new_a) + plogp(new_b) - plogp(old_a) - plogp(old_b)) +
           plogp(new_a + flow_[from] - p) + plogp(new_b + flow_[to] + p) -
           plogp(old_a + flow_[from]) - plogp(old_b + flow_[to]);
  }

  void apply(std::size_t u, std::size_t from, double w_from, std::size_t to, double w_to) {
    const double p = lvl_.flow[u];
    const double out = lvl_.out[u];
    const double new_a = exit_[from] - out + 2.0 * w_from;
    const double new_b = exit_[to] + out - 2.0 * w_to;
    exit_sum_ += new_a + new_b - exit_[from] - exit_[to];
    exit_[from] = std::max(0.0, new_a);
    exit_[to] = std::max(0.0, new_b);
    flow_[from] -= p;
    flow_[to] += p;
    if (size_[to] == 0) free_.erase(std::find(free_.begin(), free_.end(), to));
    --size_[from];
    ++size_[to];
    if (size_[from] == 0) {
      free_.push_back(from);
      exit_[from] = 0.0;
      flow_[from] = 0.0;
    }
    module_[u] = to;
    for (auto b : lvl_.members[u]) base_module_[b] = to;
  }

  const FlowLevel& lvl_;
  const std::vector<std::set<std::size_t>>& forbidden_;
  std::vector<std::size_t>& base_module_;
  std::vector<std::size_t> module_;
  std::vector<double> exit_;
  std::vector<double> flow_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> free_;
  double exit_sum_ = 0.0;
};

// Collapses each non-empty module of `lvl` into one node.
inline FlowLevel aggregate(const FlowLevel& lvl, const std::vector<std::size_t>& module) {
  std::map<std::size_t, std::size_t> dense;
  for (auto m : module) dense.try_emplace(m, dense.size());
  FlowLevel next;
  const std::size_t k = dense.size();
  next.flow.assign(k, 0.0);
  next.out.assign(k, 0.0);
  next.adj.assign(k, {});
  next.members.assign(k, {});
  std::vector<std::map<std::size_t, double>> links(k);
  for (std::size_t u = 0; u < module.size(); ++u) {
    const auto mu = dense[module[u]];
    next.flow[mu] += lvl.flow[u];
    next.members[mu].insert(next.members[mu].end(), lvl.members[u].begin(), lvl.members[u].end());
    for (const auto& [v, w] : lvl.adj[u]) {
      const auto mv = dense[module[v]];
      if (mu != mv) links[mu][mv] += w;
    }
  }
  for (std::size_t m = 0; m < k; ++m) {
    for (const auto& [h, w] : links[m]) {
      next.adj[m].emplace_back(h, w);
      next.out[m] += w;
    }
  }
  return next;
}

// One greedy trial: returns the module of every base super-node.
inline std::vector<std::size_t> run_trial(const ConstrainedContext& ctx, double two_w, Rng& rng) {
  FlowLevel lvl = base_level(ctx, two_w);
  std::vector<std::size_t> base_module(ctx.groups.size());
  std::iota(base_module.begin(), base_module.end(), std::size_t{0});
  while (true) {
    // Module ids of the mover are node indices of the current level.
    for (std::size_t u = 0; u < lvl.members.size(); ++u) {
      for (auto b : lvl.members[u]) base_module[b] = u;
    }
    LocalMover mover(lvl, ctx.forbidden, base_module);
    if (!mover.run(rng)) break;
    lvl = aggregate(lvl, mover.modules());
  }
  return base_module;
}

}  // namespace detail

/// Best of `trials` seeded greedy optimisations on the constrained network.
/// The reported codelength is evaluated on ctx.network.
inline Partition detect(const ConstrainedContext& ctx, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw DomainError("detect needs at least one trial");
  if (ctx.groups.empty()) throw DomainError("detect needs a non-empty network");

  auto expand = [&](const std::vector<std::size_t>& base_module) {
    std::map<NodeId, int> raw;
    for (std::size_t g = 0; g < ctx.groups.size(); ++g) {
      for (const auto& id : ctx.groups[g]) raw.emplace(id, static_cast<int>(base_module[g]));
    }
    return canonical_labels(raw);
  };

  const double total = ctx.network.total_weight();
  if (!(total > 0.0)) {
    std::vector<std::size_t> singletons(ctx.groups.size());
    std::iota(singletons.begin(), singletons.end(), std::size_t{0});
    return Partition{expand(singletons), 0.0};
  }

  Partition best;
  best.codelength = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, "trial", t));
    auto assignment = expand(detail::run_trial(ctx, 2.0 * total, rng));
    const double len = codelength(ctx.network, assignment);
    if (len < best.codelength) best = Partition{std::move(assignment), len};
  }
  return best;
}

inline Partition detect(const Network& n, const ConstraintSet& c, std::size_t trials,
                        std::uint64_t seed) {
  return detect(apply_constraints(n, c), trials, seed);
}

/// `#codelength<TAB>bits`, then `node<TAB>community` rows.
inline void write_partition(std::ostream& out, const Partition& p) {
  out << "#codelength\t" << format_number(p.codelength) << '\n';
  for (const auto& [id, c] : p.assignment) out << id << '\t' << c << '\n';
}

inline Partition read_partition(std::istream& in) {
  Partition p;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty()) continue;
    auto fields = detail::split(line, '\t');
    if (line.front() == '#') {
      if (fields[0] == "#codelength" && fields.size() == 2) {
        p.codelength = detail::parse_double(fields[1], line_no);
      }
      continue;
    }
    if (fields.size() != 2 || fields[0].empty()) {
      throw ParseError(line_no, "expected 'node<TAB>community'");
    }
    const double c = detail::parse_double(fields[1], line_no);
    if (c < 0.0 || c != static_cast<double>(static_cast<int>(c))) {
      throw ParseError(line_no, "community id must be a non-negative integer");
    }
    if (!p.assignment.emplace(std::string(fields[0]), static_cast<int>(c)).second) {
      throw IntegrityError("node '" + std::string(fields[0]) + "' assigned twice");
    }
  }
  return p;
}

}  // namespace flavornet
