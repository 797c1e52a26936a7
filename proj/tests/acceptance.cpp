// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "flavornet/flavornet.hpp"
#include "oracles.hpp"

using namespace flavornet;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = secs < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s [%d] %s: %s (%.2f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs, budget_s);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

struct PlantedRun {
  ModelReport with_knowledge;
  ModelReport without;
};

PlantedRun planted_run(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  auto data = generate_synthetic(spec);
  auto net = project(data.bipartite);
  auto prep = prepare_corpora(net, data.western, data.eastern, seed);
  PipelineConfig c;
  c.flavour_filter = 1.0;
  c.recipe_filter = 0.15;
  c.seed = seed;
  c.knowledge_fraction = 0.1;
  auto k = evaluate(net, prep.western, prep.eastern, c, 10, EvalTarget::kTest);
  c.knowledge_fraction = 0.0;
  auto u = evaluate(net, prep.western, prep.eastern, c, 10, EvalTarget::kTest);
  return {std::move(k), std::move(u)};
}

bool planted_ok(const PlantedRun& r) {
  return r.with_knowledge.sensitivity >= 0.8 && r.with_knowledge.specificity >= 0.8 &&
         r.with_knowledge.min_score() > r.without.min_score();
}

}  // namespace

int main() {
  criterion(1, "projection matches brute force on 200 random graphs", 10, [] {
    std::mt19937_64 rng(101);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
      auto g = oracle::random_bipartite(rng, 50, 100);
      auto n = project(g);
      bool same = oracle::edge_map(n) == oracle::projection(g) &&
                  n.node_count() == g.ingredients().size();
      ok += same;
    }
    return Outcome{ok == 200, fmt("%d/200 identical", ok)};
  });

  criterion(2, "local filtration keeps exactly the qualifying edges", 5, [] {
    std::mt19937_64 rng(202);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
      auto n = oracle::random_network(rng, 30, 0.2, i % 2 == 0);
      bool good = filter_local(n, 0.0) == n;
      std::set<std::pair<NodeId, NodeId>> previous;
      for (double f : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        auto kept = oracle::filtered_edges(n, f);
        std::set<std::pair<NodeId, NodeId>> got;
        auto filtered = filter_local(n, f);
        for (const auto& e : filtered.edges()) got.insert({e.a, e.b});
        good &= got == kept;
        if (f > 0.0) good &= std::includes(previous.begin(), previous.end(), got.begin(), got.end());
        for (const auto& id : n.nodes()) good &= n.degree(id) == 0 || filtered.degree(id) > 0;
        previous = got;
      }
      ok += good;
    }
    return Outcome{ok == 200, fmt("%d/200 graphs", ok)};
  });

  criterion(3, "codelength agrees with the entropy form", 5, [] {
    std::mt19937_64 rng(303);
    int ok = 0, total = 0;
    double worst = 0.0;
    while (total < 50) {
      auto n = oracle::random_network(rng, 12, 0.35, total % 2 == 0);
      if (n.edge_count() == 0) continue;
      ++total;
      std::uniform_int_distribution<int> label(0, 3);
      std::map<NodeId, int> a;
      for (const auto& id : n.nodes()) a[id] = label(rng);
      const double diff = std::abs(codelength(n, a) - oracle::codelength(n, a));
      worst = std::max(worst, diff);
      ok += diff <= 1e-9;
    }
    Network cycle;
    cycle.set_edge("a", "b", 1);
    cycle.set_edge("b", "c", 1);
    cycle.set_edge("c", "d", 1);
    cycle.set_edge("d", "a", 1);
    const double c4 = codelength(cycle, {{"a", 0}, {"b", 0}, {"c", 0}, {"d", 0}});
    return Outcome{ok == 50 && std::abs(c4 - 2.0) <= 1e-12,
                   fmt("%d/50 within 1e-9, max diff %.2e, 4-cycle %.12f", ok, worst, c4)};
  });

  criterion(4, "constrained detection reaches the exhaustive optimum", 60, [] {
    std::mt19937_64 rng(404);
    int hits = 0, satisfied = 0;
    for (int i = 0; i < 100; ++i) {
      std::uniform_int_distribution<std::size_t> size(3, 8);
      auto n = oracle::random_connected(rng, size(rng), 0.3);
      auto c = oracle::random_constraints(rng, n, 2, 3);
      auto best = oracle::exhaustive_minimum(n, c);
      auto p = detect(n, c, 20, static_cast<std::uint64_t>(i));
      bool holds = true;
      for (const auto& m : c.must_link) holds &= p.same_community(m.first, m.second);
      for (const auto& m : c.cannot_link) holds &= !p.same_community(m.first, m.second);
      satisfied += holds;
      hits += p.codelength <= best.codelength + 1e-9;
    }
    return Outcome{hits >= 95 && satisfied == 100,
                   fmt("%d/100 optimal, %d/100 satisfy constraints", hits, satisfied)};
  });

  criterion(5, "sanity check terminates and leaves no discrepancy", 10, [] {
    std::mt19937_64 rng(505);
    int ok = 0;
    for (int i = 0; i < 200; ++i) {
      auto w = oracle::random_network(rng, 20, 0.2);
      auto e = oracle::random_network(rng, 20, 0.2);
      auto r = sanity_check(w, e);
      bool good = r.iterations <= w.edge_count() + e.edge_count();
      r.western.for_each_edge([&](const NodeId& a, const NodeId& b, double) {
        good &= !r.eastern.has_edge(a, b);
      });
      for (const auto& comp : connected_components(r.western)) {
        for (const auto& node : comp) good &= !node_discrepancy(node, comp, r.western, r.eastern);
      }
      ok += good;
    }
    return Outcome{ok == 200, fmt("%d/200 pairs", ok)};
  });

  criterion(6, "planted clusters recovered with knowledge (seed 1)", 120, [] {
    auto r = planted_run(1);
    return Outcome{planted_ok(r),
                   fmt("knowledge sens %.3f spec %.3f, none sens %.3f spec %.3f",
                       r.with_knowledge.sensitivity, r.with_knowledge.specificity,
                       r.without.sensitivity, r.without.specificity)};
  });

  criterion(7, "sweep output identical across runs", 600, [] {
    SyntheticSpec spec;
    spec.seed = 7;
    auto data = generate_synthetic(spec);
    auto net = project(data.bipartite);
    auto prep = prepare_corpora(net, data.western, data.eastern, 7);
    SweepOptions opt;
    opt.step = 0.25;
    opt.threads = 4;
    opt.seed = 7;
    std::string csv[2];
    std::size_t cells = 0;
    for (auto& out : csv) {
      auto rows = sweep(net, prep.western, prep.eastern, opt);
      cells = rows.size();
      std::ostringstream s;
      write_sweep_csv(s, rows);
      out = s.str();
    }
    return Outcome{cells == 125 && csv[0] == csv[1],
                   fmt("%zu cells, %s", cells, csv[0] == csv[1] ? "byte-identical" : "differs")};
  });

  criterion(8, "size arithmetic", 1, [] {
    const std::size_t pairs = 856u * 855u / 2u;
    const double mean = mean_degree(856, 328504);
    const auto s = split_sizes(507);
    const auto k = knowledge_count(0.1, s.train);
    const bool good = pairs == 365940 && pairs >= 300000 && std::abs(mean - 767.5) < 0.05 &&
                      s.train == 405 && s.validation == 50 && s.test == 52 && k == 40;
    return Outcome{good, fmt("pairs %zu, mean degree %.3f, split %zu/%zu/%zu, knowledge %zu", pairs,
                             mean, s.train, s.validation, s.test, k)};
  });

  // robustness of criterion 6 across generator seeds; reported, not gated
  int planted_hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) planted_hits += planted_ok(planted_run(seed));
  std::printf("INFO planted recovery over seeds 1-20: %d/20\n", planted_hits);

  std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
