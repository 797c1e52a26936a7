#pragma once

// End-to-end training and evaluation: filtration, knowledge sampling,
// reconciliation, constrained detection, sensitivity/specificity scoring,
// parameter sweeps and pair ranking.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flavornet/community.hpp"
#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"
#include "flavornet/random.hpp"
#include "flavornet/reconciliation.hpp"
#include "flavornet/recipe_corpus.hpp"

namespace flavornet {

struct PipelineConfig {
  double flavour_filter = 1.0;      // flavour network filtration factor
  double recipe_filter = 0.15;      // recipe network filtration factor
  double knowledge_fraction = 0.1;  // share of training recipes turned into constraints
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  double step = 0.05;               // sweep grid spacing

  void validate() const {
    auto unit = [](double v, const char* name) {
      if (!(v >= 0.0 && v <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
    };
    unit(flavour_filter, "flavour filter");
    unit(recipe_filter, "recipe filter");
    unit(knowledge_fraction, "knowledge fraction");
    if (!(step > 0.0 && step <= 1.0)) throw DomainError("sweep step must lie in (0, 1]");
    if (trials == 0) throw DomainError("trials must be positive");
  }

  nlohmann::json to_json() const {
    return {{"ff", flavour_filter}, {"fr", recipe_filter}, {"knowledge", knowledge_fraction},
            {"trials", trials},     {"seed", seed},        {"step", step}};
  }

  static PipelineConfig from_json(const nlohmann::json& j) {
    PipelineConfig c;
    c.flavour_filter = j.value("ff", c.flavour_filter);
    c.recipe_filter = j.value("fr", c.recipe_filter);
    c.knowledge_fraction = j.value("knowledge", c.knowledge_fraction);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.step = j.value("step", c.step);
    return c;
  }
};

/// floor(fraction * n); the small slack absorbs binary rounding of fractions
/// such as 0.29 * 100.
inline std::size_t knowledge_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

inline std::pair<RecipeCorpus, RecipeCorpus> sample_knowledge(const RecipeCorpus& train_w,
                                                              const RecipeCorpus& train_e,
                                                              double fraction,
                                                              std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw DomainError("knowledge fraction must lie in [0, 1]");
  }
  return {train_w.subset(sample_indices(train_w.size(), knowledge_count(fraction, train_w.size()),
                                        derive_seed(seed, "knowledge-western"))),
          train_e.subset(sample_indices(train_e.size(), knowledge_count(fraction, train_e.size()),
                                        derive_seed(seed, "knowledge-eastern")))};
}

struct TrainResult {
  Partition partition;
  Network filtered;             // flavour network after filtration
  SanityResult reconciled;      // cleaned co-occurrence graphs and audit log
  ConstraintSet constraints;    // pairs handed to the detector
  std::size_t dropped_constraint_pairs = 0;
};

/// Filter the flavour network, sample knowledge recipes, build and filter
/// both co-occurrence graphs, reconcile them and run constrained detection.
inline TrainResult train(const Network& flavour, const RecipeCorpus& train_w,
                         const RecipeCorpus& train_e, const PipelineConfig& config) {
  config.validate();
  TrainResult r;
  r.filtered = filter_local(flavour, config.flavour_filter);
  auto [know_w, know_e] = sample_knowledge(train_w, train_e, config.knowledge_fraction,
                                           config.seed);
  const auto western = filter_local(build_cooccurrence(know_w), config.recipe_filter);
  const auto eastern = filter_local(build_cooccurrence(know_e), config.recipe_filter);
  r.reconciled = sanity_check(western, eastern);

  auto keep = [&](const NodeId& a, const NodeId& b) {
    return r.filtered.has_node(a) && r.filtered.has_node(b);
  };
  r.reconciled.western.for_each_edge([&](const NodeId& a, const NodeId& b, double) {
    if (keep(a, b)) r.constraints.must_link.emplace(a, b);
    else ++r.dropped_constraint_pairs;
  });
  r.reconciled.eastern.for_each_edge([&](const NodeId& a, const NodeId& b, double) {
    if (keep(a, b)) r.constraints.cannot_link.emplace(a, b);
    else ++r.dropped_constraint_pairs;
  });
  for (const auto& p : r.constraints.cannot_link) {
    if (r.constraints.must_link.count(p) != 0) {
      throw ConstraintError("pair (" + p.first + ", " + p.second +
                            ") survived reconciliation in both cuisines");
    }
  }
  r.partition = detect(r.filtered, r.constraints, config.trials, derive_seed(config.seed, "detect"));
  return r;
}

struct ScoreDetail {
  double mean = 0.0;
  std::size_t scored = 0;   // recipes contributing to the mean
  std::size_t skipped = 0;  // recipes with fewer than two partitioned ingredients
};

namespace detail {

template <typename Predicate>
ScoreDetail score_recipes(const Partition& p, const RecipeCorpus& recipes, Predicate&& hit) {
  ScoreDetail s;
  double total = 0.0;
  for (const auto& r : recipes.recipes()) {
    std::vector<int> comms;
    for (const auto& ing : r.ingredients) {
      const int c = p.community_of(ing);
      if (c >= 0) comms.push_back(c);
    }
    if (comms.size() < 2) {
      ++s.skipped;
      continue;
    }
    std::size_t hits = 0, pairs = 0;
    for (std::size_t i = 0; i < comms.size(); ++i) {
      for (std::size_t j = i + 1; j < comms.size(); ++j) {
        ++pairs;
        if (hit(comms[i] == comms[j])) ++hits;
      }
    }
    total += static_cast<double>(hits) / static_cast<double>(pairs);
    ++s.scored;
  }
  if (s.scored == 0) throw UndefinedScoreError("no recipe has two ingredients in the partition");
  s.mean = total / static_cast<double>(s.scored);
  return s;
}

}  // namespace detail

/// Mean share of co-assigned ingredient pairs per recipe.
inline ScoreDetail sensitivity_detail(const Partition& p, const RecipeCorpus& recipes) {
  return detail::score_recipes(p, recipes, [](bool same) { return same; });
}

/// Mean share of separated ingredient pairs per recipe.
inline ScoreDetail specificity_detail(const Partition& p, const RecipeCorpus& recipes) {
  return detail::score_recipes(p, recipes, [](bool same) { return !same; });
}

inline double sensitivity(const Partition& p, const RecipeCorpus& recipes) {
  return sensitivity_detail(p, recipes).mean;
}

inline double specificity(const Partition& p, const RecipeCorpus& recipes) {
  return specificity_detail(p, recipes).mean;
}

/// Redraws the train/validation division of `s` with unchanged part sizes.
/// The test part is left as it is.
inline CorpusSplit resplit(const CorpusSplit& s, std::uint64_t seed) {
  RecipeCorpus pool(s.train.label());
  for (const auto& r : s.train.recipes()) pool.add(r);
  for (const auto& r : s.validation.recipes()) pool.add(r);
  std::vector<std::size_t> order(pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto cut = static_cast<std::ptrdiff_t>(s.train.size());
  return CorpusSplit{pool.subset({order.begin(), order.begin() + cut}),
                     pool.subset({order.begin() + cut, order.end()}), s.test, seed};
}

enum class EvalTarget { kValidation, kTest };

struct RepetitionScore {
  double sensitivity = 0.0;
  double specificity = 0.0;
  double codelength = 0.0;
};

struct ModelReport {
  Partition partition;  // from the repetition with the highest min(sensitivity, specificity)
  double sensitivity = 0.0;
  double specificity = 0.0;
  double codelength = 0.0;
  PipelineConfig config;
  std::vector<RepetitionScore> repetitions;

  double min_score() const { return std::min(sensitivity, specificity); }

  nlohmann::json metrics_json() const {
    nlohmann::json reps = nlohmann::json::array();
    for (const auto& r : repetitions) {
      reps.push_back({{"sensitivity", r.sensitivity},
                      {"specificity", r.specificity},
                      {"codelength", r.codelength}});
    }
    return {{"sensitivity", sensitivity}, {"specificity", specificity},
            {"min_score", min_score()},   {"codelength", codelength},
            {"communities", partition.community_count()},
            {"config", config.to_json()}, {"repetitions", reps}};
  }
};

/// Repeated train-and-score runs. Repetition r reshuffles train/validation
/// with a seed derived from (config.seed, r) and trains with that seed.
inline ModelReport evaluate(const Network& flavour, const CorpusSplit& split_w,
                            const CorpusSplit& split_e, const PipelineConfig& config,
                            std::size_t repetitions, EvalTarget target = EvalTarget::kValidation) {
  if (repetitions == 0) throw DomainError("repetitions must be positive");
  config.validate();
  ModelReport report;
  report.config = config;
  double best_min = -1.0;
  for (std::size_t r = 0; r < repetitions; ++r) {
    const auto rep_seed = derive_seed(config.seed, "repetition", r);
    const auto w = resplit(split_w, derive_seed(rep_seed, "split-western"));
    const auto e = resplit(split_e, derive_seed(rep_seed, "split-eastern"));
    PipelineConfig rep_config = config;
    rep_config.seed = rep_seed;
    auto model = train(flavour, w.train, e.train, rep_config);
    const auto& score_w = target == EvalTarget::kTest ? w.test : w.validation;
    const auto& score_e = target == EvalTarget::kTest ? e.test : e.validation;
    RepetitionScore s{sensitivity(model.partition, score_w),
                      specificity(model.partition, score_e), model.partition.codelength};
    report.repetitions.push_back(s);
    if (std::min(s.sensitivity, s.specificity) > best_min) {
      best_min = std::min(s.sensitivity, s.specificity);
      report.partition = std::move(model.partition);
    }
  }
  const double n = static_cast<double>(repetitions);
  for (const auto& s : report.repetitions) {
    report.sensitivity += s.sensitivity / n;
    report.specificity += s.specificity / n;
    report.codelength += s.codelength / n;
  }
  return report;
}

/// {0, step, 2 step, ...} capped at 1, with 1 always included.
inline std::vector<double> grid_values(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw DomainError("sweep step must lie in (0, 1]");
  std::vector<double> out;
  for (std::size_t k = 0;; ++k) {
    const double v = static_cast<double>(k) * step;
    if (v > 1.0 + 1e-9) break;
    out.push_back(std::min(v, 1.0));
  }
  if (out.back() < 1.0 - 1e-9) out.push_back(1.0);
  return out;
}

struct SweepOptions {
  double step = 0.05;
  std::size_t repetitions = 5;
  std::size_t trials = 5;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::optional<double> fixed_flavour_filter;
  std::optional<double> fixed_recipe_filter;
  std::optional<double> fixed_knowledge;
};

struct SweepRow {
  PipelineConfig config;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double codelength = 0.0;
  bool failed = false;

  double min_score() const { return std::min(sensitivity, specificity); }
};

/// Max-min ranking: min(sens, spec) desc, sens + spec desc, then smaller
/// flavour filter, recipe filter and knowledge fraction.
inline bool ranks_before(const SweepRow& a, const SweepRow& b) {
  if (a.min_score() != b.min_score()) return a.min_score() > b.min_score();
  const double sa = a.sensitivity + a.specificity;
  const double sb = b.sensitivity + b.specificity;
  if (sa != sb) return sa > sb;
  if (a.config.flavour_filter != b.config.flavour_filter) {
    return a.config.flavour_filter < b.config.flavour_filter;
  }
  if (a.config.recipe_filter != b.config.recipe_filter) {
    return a.config.recipe_filter < b.config.recipe_filter;
  }
  return a.config.knowledge_fraction < b.config.knowledge_fraction;
}

/// Evaluates every grid cell and returns the rows ranked best first. Each
/// cell seeds itself from its coordinates on the full grid, so restricting a
/// parameter or changing the thread count leaves the other cells unchanged.
inline std::vector<SweepRow> sweep(const Network& flavour, const CorpusSplit& split_w,
                                   const CorpusSplit& split_e, const SweepOptions& opt) {
  if (opt.repetitions == 0) throw DomainError("repetitions must be positive");
  const auto values = grid_values(opt.step);
  const std::size_t side = values.size();
  auto axis = [&](const std::optional<double>& fixed) {
    std::vector<std::pair<std::size_t, double>> out;
    if (fixed) {
      if (!(*fixed >= 0.0 && *fixed <= 1.0)) throw DomainError("fixed value must lie in [0, 1]");
      out.emplace_back(side + 1, *fixed);  // off-grid coordinate
    } else {
      for (std::size_t i = 0; i < side; ++i) out.emplace_back(i, values[i]);
    }
    return out;
  };
  const auto ffs = axis(opt.fixed_flavour_filter);
  const auto frs = axis(opt.fixed_recipe_filter);
  const auto kns = axis(opt.fixed_knowledge);

  struct Cell {
    PipelineConfig config;
  };
  std::vector<Cell> cells;
  for (const auto& [i, ff] : ffs) {
    for (const auto& [j, fr] : frs) {
      for (const auto& [k, kn] : kns) {
        PipelineConfig c;
        c.flavour_filter = ff;
        c.recipe_filter = fr;
        c.knowledge_fraction = kn;
        c.trials = opt.trials;
        c.step = opt.step;
        c.seed = derive_seed(opt.seed, "cell", (i * (side + 2) + j) * (side + 2) + k);
        cells.push_back({c});
      }
    }
  }

  std::vector<SweepRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      SweepRow row;
      row.config = cells[idx].config;
      try {
        auto rep = evaluate(flavour, split_w, split_e, row.config, opt.repetitions);
        row.sensitivity = rep.sensitivity;
        row.specificity = rep.specificity;
        row.codelength = rep.codelength;
      } catch (const UndefinedScoreError&) {
        row.failed = true;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
      rows[idx] = row;
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(opt.threads, cells.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  std::sort(rows.begin(), rows.end(), ranks_before);
  return rows;
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "ff,fr,knowledge,sensitivity,specificity,min_score,codelength\n";
  for (const auto& r : rows) {
    out << format_number(r.config.flavour_filter) << ',' << format_number(r.config.recipe_filter)
        << ',' << format_number(r.config.knowledge_fraction) << ','
        << format_number(r.sensitivity) << ',' << format_number(r.specificity) << ','
        << format_number(r.min_score()) << ',' << format_number(r.codelength) << '\n';
  }
}

inline nlohmann::json sweep_row_json(const SweepRow& r) {
  return {{"ff", r.config.flavour_filter},  {"fr", r.config.recipe_filter},
          {"knowledge", r.config.knowledge_fraction},
          {"sensitivity", r.sensitivity},   {"specificity", r.specificity},
          {"min_score", r.min_score()},     {"codelength", r.codelength},
          {"seed", r.config.seed},          {"failed", r.failed}};
}

struct PairVerdict {
  NodePair pair;
  bool compatible = false;
  double score = 0.0;    // shared-compound weight in the unfiltered projection
  bool unknown = false;  // at least one ingredient is not in the partition

  nlohmann::json to_json() const {
    return {{"a", pair.first},
            {"b", pair.second},
            {"compatible", compatible},
            {"score", score},
            {"unknown", unknown}};
  }
};

/// Same community means compatible. Unknown ingredients give an incompatible
/// verdict flagged `unknown`; a == b is a DomainError.
inline PairVerdict classify_pair(const Partition& p, const Network& projection, const NodeId& a,
                                 const NodeId& b) {
  if (a == b) throw DomainError("self-pair '" + a + "'");
  PairVerdict v;
  v.pair = NodePair(a, b);
  v.unknown = !p.contains(a) || !p.contains(b);
  v.compatible = !v.unknown && p.same_community(a, b);
  v.score = projection.weight(a, b);
  return v;
}

/// Every node pair of `n`, compatible first, then by descending score, then
/// by pair; truncated to `limit`.
inline std::vector<PairVerdict> rank_pairs(const Network& n, const Partition& p,
                                           std::size_t limit) {
  if (limit == 0) return {};
  const auto nodes = n.nodes();
  std::vector<PairVerdict> all;
  if (!nodes.empty()) all.reserve(nodes.size() * (nodes.size() - 1) / 2);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t j = i + 1; j < nodes.size(); ++j) all.push_back(classify_pair(p, n, nodes[i], nodes[j]));
  }
  auto order = [](const PairVerdict& x, const PairVerdict& y) {
    if (x.compatible != y.compatible) return x.compatible;
    if (x.score != y.score) return x.score > y.score;
    return x.pair < y.pair;
  };
  const std::size_t keep = std::min(limit, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), order);
  all.resize(keep);
  return all;
}

/// Matched, balanced and split corpora ready for training.
struct PreparedCorpora {
  CorpusSplit western;
  CorpusSplit eastern;
  MatchResult western_match;
  MatchResult eastern_match;
};

inline PreparedCorpora prepare_corpora(const Network& flavour, const RecipeCorpus& western,
                                       const RecipeCorpus& eastern, std::uint64_t seed) {
  auto mw = match_to_network(western, flavour);
  auto me = match_to_network(eastern, flavour);
  auto [bw, be] = balance_corpora(mw.corpus, me.corpus, derive_seed(seed, "balance"));
  return PreparedCorpora{split_corpus(bw, derive_seed(seed, "split-western")),
                         split_corpus(be, derive_seed(seed, "split-eastern")), std::move(mw),
                         std::move(me)};
}

}  // namespace flavornet
