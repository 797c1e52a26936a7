#include <gtest/gtest.h>

#include <sstream>

#include "flavornet/pipeline.hpp"
#include "flavornet/synthetic.hpp"

using namespace flavornet;

namespace {

RecipeCorpus corpus_of(std::size_t n, const std::string& label = "western") {
  RecipeCorpus c(label);
  for (std::size_t i = 0; i < n; ++i) c.add({"r" + std::to_string(i), {"a", "b" + std::to_string(i)}});
  return c;
}

RecipeCorpus recipes(std::initializer_list<std::set<NodeId>> sets) {
  RecipeCorpus c;
  int i = 0;
  for (const auto& s : sets) c.add({"r" + std::to_string(i++), s});
  return c;
}

Partition partition(std::map<NodeId, int> a) { return Partition{std::move(a), 0.0}; }

struct Planted {
  SyntheticData data;
  Network network;
  PreparedCorpora corpora;
};

Planted planted(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.seed = seed;
  auto data = generate_synthetic(spec);
  auto net = project(data.bipartite);
  auto prepared = prepare_corpora(net, data.western, data.eastern, seed);
  return Planted{std::move(data), std::move(net), std::move(prepared)};
}

}  // namespace

TEST(PipelineConfig, ValidatesRanges) {
  PipelineConfig c;
  EXPECT_NO_THROW(c.validate());
  c.flavour_filter = 1.5;
  EXPECT_THROW(c.validate(), DomainError);
  c = PipelineConfig{};
  c.step = 0.0;
  EXPECT_THROW(c.validate(), DomainError);
  c = PipelineConfig{};
  c.trials = 0;
  EXPECT_THROW(c.validate(), DomainError);
}

TEST(PipelineConfig, JsonRoundTrip) {
  PipelineConfig c;
  c.flavour_filter = 0.35;
  c.recipe_filter = 0.2;
  c.knowledge_fraction = 0.4;
  c.trials = 7;
  c.seed = 12345678901234ULL;
  auto back = PipelineConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
}

TEST(SampleKnowledge, FloorOfFraction) {
  EXPECT_EQ(knowledge_count(0.1, 405), 40u);
  EXPECT_EQ(knowledge_count(0.29, 100), 29u);
  auto [w, e] = sample_knowledge(corpus_of(405), corpus_of(405, "eastern"), 0.1, 3);
  EXPECT_EQ(w.size(), 40u);
  EXPECT_EQ(e.size(), 40u);
}

TEST(SampleKnowledge, Extremes) {
  auto w = corpus_of(30);
  auto e = corpus_of(20, "eastern");
  auto [w0, e0] = sample_knowledge(w, e, 0.0, 1);
  EXPECT_TRUE(w0.empty());
  EXPECT_TRUE(e0.empty());
  auto [w1, e1] = sample_knowledge(w, e, 1.0, 1);
  EXPECT_EQ(w1, w);
  EXPECT_EQ(e1, e);
  EXPECT_THROW(sample_knowledge(w, e, 1.2, 1), DomainError);
}

TEST(SampleKnowledge, Deterministic) {
  auto w = corpus_of(100);
  EXPECT_EQ(sample_knowledge(w, w, 0.3, 9).first, sample_knowledge(w, w, 0.3, 9).first);
  EXPECT_NE(sample_knowledge(w, w, 0.3, 9).first, sample_knowledge(w, w, 0.3, 10).first);
}

TEST(Scores, PartialRecipe) {
  auto p = partition({{"a", 0}, {"b", 0}, {"c", 1}});
  auto r = recipes({{"a", "b", "c"}});
  EXPECT_NEAR(sensitivity(p, r), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(specificity(p, r), 2.0 / 3.0, 1e-15);
}

TEST(Scores, WholeRecipeInOneCommunity) {
  auto p = partition({{"a", 0}, {"b", 0}, {"c", 0}});
  auto r = recipes({{"a", "b", "c"}});
  EXPECT_EQ(sensitivity(p, r), 1.0);
  EXPECT_EQ(specificity(p, r), 0.0);
}

TEST(Scores, MeanOverRecipes) {
  auto p = partition({{"a", 0}, {"b", 0}, {"c", 1}, {"d", 2}});
  EXPECT_EQ(sensitivity(p, recipes({{"a", "b"}, {"c", "d"}})), 0.5);
}

TEST(Scores, UnknownIngredientsAreExcluded) {
  auto p = partition({{"a", 0}, {"b", 0}});
  auto d = sensitivity_detail(p, recipes({{"a", "b", "ghost"}, {"a", "ghost"}}));
  EXPECT_EQ(d.mean, 1.0);
  EXPECT_EQ(d.scored, 1u);
  EXPECT_EQ(d.skipped, 1u);
  EXPECT_THROW(sensitivity(p, recipes({{"a", "ghost"}})), UndefinedScoreError);
  EXPECT_THROW(specificity(p, RecipeCorpus{}), UndefinedScoreError);
}

TEST(Scores, PerRecipeComplement) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> label(0, 3), pick(0, 14), size(2, 7);
  for (int t = 0; t < 50; ++t) {
    std::map<NodeId, int> a;
    for (int i = 0; i < 15; ++i) a["i" + std::to_string(i)] = label(rng);
    auto p = partition(a);
    RecipeCorpus c;
    for (int r = 0; r < 10; ++r) {
      Recipe rec{"r" + std::to_string(r), {}};
      while (rec.ingredients.size() < static_cast<std::size_t>(size(rng))) {
        rec.ingredients.insert("i" + std::to_string(pick(rng)));
      }
      RecipeCorpus single;
      single.add(rec);
      EXPECT_NEAR(sensitivity(p, single) + specificity(p, single), 1.0, 1e-12);
      c.add(rec);
    }
    const double s = sensitivity(p, c), q = specificity(p, c);
    EXPECT_NEAR(s + q, 1.0, 1e-12);
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(ClassifyPair, Verdicts) {
  auto p = partition({{"apple", 0}, {"plum", 0}, {"onion", 1}});
  Network proj;
  proj.set_edge("apple", "plum", 4);
  auto yes = classify_pair(p, proj, "plum", "apple");
  EXPECT_TRUE(yes.compatible);
  EXPECT_EQ(yes.score, 4.0);
  EXPECT_EQ(yes.pair.first, "apple");
  auto no = classify_pair(p, proj, "apple", "onion");
  EXPECT_FALSE(no.compatible);
  EXPECT_FALSE(no.unknown);
  EXPECT_EQ(no.score, 0.0);
  auto unknown = classify_pair(p, proj, "apple", "unicorn");
  EXPECT_FALSE(unknown.compatible);
  EXPECT_TRUE(unknown.unknown);
  EXPECT_THROW(classify_pair(p, proj, "apple", "apple"), DomainError);
  EXPECT_EQ(yes.to_json()["compatible"], true);
}

TEST(RankPairs, SortedByCompatibilityThenScore) {
  Network n;
  n.set_edge("a", "b", 5);
  n.set_edge("b", "c", 1);
  auto p = partition({{"a", 0}, {"b", 0}, {"c", 0}});
  auto ranked = rank_pairs(n, p, 10);
  ASSERT_EQ(ranked.size(), 3u);
  EXPECT_EQ(ranked[0].pair, NodePair("a", "b"));
  EXPECT_EQ(ranked[1].pair, NodePair("b", "c"));
  EXPECT_EQ(ranked[2].pair, NodePair("a", "c"));
  EXPECT_TRUE(rank_pairs(n, p, 0).empty());
  EXPECT_EQ(rank_pairs(n, p, 2).size(), 2u);
}

TEST(RankPairs, IncompatibleAfterCompatible) {
  Network n;
  n.set_edge("a", "b", 1);
  n.set_edge("c", "d", 9);
  auto p = partition({{"a", 0}, {"b", 0}, {"c", 1}, {"d", 2}});
  auto ranked = rank_pairs(n, p, 100);
  ASSERT_EQ(ranked.size(), 6u);
  EXPECT_EQ(ranked[0].pair, NodePair("a", "b"));
  EXPECT_EQ(ranked[1].pair, NodePair("c", "d"));
  for (std::size_t i = 1; i < ranked.size(); ++i) EXPECT_FALSE(ranked[i].compatible);
}

TEST(RankPairs, EnumeratesAllPairs) {
  Network n;
  for (int i = 0; i < 856; ++i) n.add_node("i" + std::to_string(i));
  Partition p;
  for (const auto& id : n.nodes()) p.assignment[id] = 0;
  EXPECT_EQ(rank_pairs(n, p, 1000000).size(), 365940u);
}

TEST(Resplit, KeepsSizesAndTestPart) {
  RecipeCorpus c;
  for (int i = 0; i < 50; ++i) c.add({"r" + std::to_string(i), {"a", "b"}});
  auto s = split_corpus(c, 1);
  auto r = resplit(s, 2);
  EXPECT_EQ(r.train.size(), s.train.size());
  EXPECT_EQ(r.validation.size(), s.validation.size());
  EXPECT_EQ(r.test, s.test);
  std::set<std::string> ids;
  for (const auto* part : {&r.train, &r.validation, &r.test}) {
    for (const auto& rec : part->recipes()) EXPECT_TRUE(ids.insert(rec.id).second);
  }
  EXPECT_EQ(ids.size(), 50u);
}

TEST(GridValues, Spacing) {
  EXPECT_EQ(grid_values(0.05).size(), 21u);
  EXPECT_EQ(grid_values(0.25), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  EXPECT_EQ(grid_values(1.0), (std::vector<double>{0.0, 1.0}));
  auto odd = grid_values(0.3);
  ASSERT_EQ(odd.size(), 5u);
  EXPECT_EQ(odd.back(), 1.0);
  EXPECT_THROW(grid_values(0.0), DomainError);
  const auto g = grid_values(0.05).size();
  EXPECT_EQ(g * g * g, 9261u);
}

TEST(Train, UnsupervisedWithoutKnowledge) {
  auto pl = planted(1);
  PipelineConfig c;
  c.knowledge_fraction = 0.0;
  auto r = train(pl.network, pl.corpora.western.train, pl.corpora.eastern.train, c);
  EXPECT_TRUE(r.constraints.must_link.empty());
  EXPECT_TRUE(r.constraints.cannot_link.empty());
  auto direct = detect(filter_local(pl.network, 1.0), {}, 5, derive_seed(c.seed, "detect"));
  EXPECT_EQ(r.partition.assignment, direct.assignment);
}

TEST(Train, EmptyEasternCorpus) {
  auto pl = planted(1);
  PipelineConfig c;
  auto r = train(pl.network, pl.corpora.western.train, RecipeCorpus("eastern"), c);
  EXPECT_TRUE(r.constraints.cannot_link.empty());
  EXPECT_FALSE(r.constraints.must_link.empty());
  for (const auto& m : r.constraints.must_link) EXPECT_TRUE(r.partition.same_community(m.first, m.second));
}

TEST(Train, ConstraintsHoldAndAreDisjoint) {
  auto pl = planted(2);
  PipelineConfig c;
  c.knowledge_fraction = 0.3;
  auto r = train(pl.network, pl.corpora.western.train, pl.corpora.eastern.train, c);
  for (const auto& m : r.constraints.must_link) {
    EXPECT_EQ(r.constraints.cannot_link.count(m), 0u);
    EXPECT_TRUE(r.partition.same_community(m.first, m.second));
  }
  for (const auto& m : r.constraints.cannot_link) {
    EXPECT_FALSE(r.partition.same_community(m.first, m.second));
  }
}

TEST(Train, RecoversPlantedClustersWithKnowledge) {
  auto pl = planted(1);
  PipelineConfig c;
  c.seed = 1;
  auto r = train(pl.network, pl.corpora.western.train, pl.corpora.eastern.train, c);
  // every community is drawn from a single planted cluster
  for (const auto& comm : r.partition.communities()) {
    std::set<std::size_t> clusters;
    for (const auto& id : comm) clusters.insert(pl.data.labels.at(id));
    EXPECT_EQ(clusters.size(), 1u);
  }
}

TEST(Train, NoiselessDisjointClustersRecoveredExactly) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticSpec spec;
    spec.seed = seed;
    spec.compound_overlap = 0.0;
    spec.noise = 0.0;
    auto data = generate_synthetic(spec);
    auto net = project(data.bipartite);
    auto prepared = prepare_corpora(net, data.western, data.eastern, seed);
    PipelineConfig c;
    c.flavour_filter = 0.5;
    c.seed = seed;
    auto r = train(net, prepared.western.train, prepared.eastern.train, c);
    std::map<NodeId, int> truth;
    for (const auto& [id, label] : data.labels) truth[id] = static_cast<int>(label);
    EXPECT_EQ(r.partition.assignment, canonical_labels(truth)) << "seed " << seed;
  }
}

TEST(Evaluate, SingleRepetitionEqualsOneTrainAndScore) {
  auto pl = planted(3);
  PipelineConfig c;
  c.seed = 5;
  auto report = evaluate(pl.network, pl.corpora.western, pl.corpora.eastern, c, 1);
  const auto rep_seed = derive_seed(c.seed, "repetition", 0);
  auto w = resplit(pl.corpora.western, derive_seed(rep_seed, "split-western"));
  auto e = resplit(pl.corpora.eastern, derive_seed(rep_seed, "split-eastern"));
  PipelineConfig rc = c;
  rc.seed = rep_seed;
  auto model = train(pl.network, w.train, e.train, rc);
  EXPECT_EQ(report.sensitivity, sensitivity(model.partition, w.validation));
  EXPECT_EQ(report.specificity, specificity(model.partition, e.validation));
  EXPECT_EQ(report.partition.assignment, model.partition.assignment);
}

TEST(Evaluate, MeanOfRepetitionsAndDeterminism) {
  auto pl = planted(4);
  PipelineConfig c;
  for (auto [reps, target] : {std::pair{5u, EvalTarget::kValidation}, std::pair{10u, EvalTarget::kTest}}) {
    auto a = evaluate(pl.network, pl.corpora.western, pl.corpora.eastern, c, reps, target);
    ASSERT_EQ(a.repetitions.size(), reps);
    double s = 0.0, q = 0.0;
    for (const auto& r : a.repetitions) {
      s += r.sensitivity;
      q += r.specificity;
    }
    EXPECT_NEAR(a.sensitivity, s / reps, 1e-12);
    EXPECT_NEAR(a.specificity, q / reps, 1e-12);
    auto b = evaluate(pl.network, pl.corpora.western, pl.corpora.eastern, c, reps, target);
    EXPECT_EQ(a.sensitivity, b.sensitivity);
    EXPECT_EQ(a.specificity, b.specificity);
  }
  EXPECT_THROW(evaluate(pl.network, pl.corpora.western, pl.corpora.eastern, c, 0), DomainError);
}

TEST(Sweep, CornerGridHasEightRankedCells) {
  auto pl = planted(5);
  SweepOptions opt;
  opt.step = 1.0;
  opt.repetitions = 1;
  auto rows = sweep(pl.network, pl.corpora.western, pl.corpora.eastern, opt);
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_FALSE(ranks_before(rows[i], rows[i - 1]));
  for (const auto& r : rows) EXPECT_LE(r.min_score(), rows.front().min_score());
}

TEST(Sweep, FixedParametersAndThreadIndependence) {
  auto pl = planted(6);
  SweepOptions opt;
  opt.step = 0.5;
  opt.repetitions = 2;
  opt.fixed_flavour_filter = 1.0;
  auto one = sweep(pl.network, pl.corpora.western, pl.corpora.eastern, opt);
  ASSERT_EQ(one.size(), 9u);
  for (const auto& r : one) EXPECT_EQ(r.config.flavour_filter, 1.0);
  opt.threads = 3;
  auto three = sweep(pl.network, pl.corpora.western, pl.corpora.eastern, opt);
  std::ostringstream a, b;
  write_sweep_csv(a, one);
  write_sweep_csv(b, three);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "ff,fr,knowledge,sensitivity,specificity,min_score,codelength");
}

TEST(Ranking, MaxMinThenSumThenSmallerParameters) {
  SweepRow a, b;
  a.sensitivity = 0.9;
  a.specificity = 0.6;
  b.sensitivity = 0.7;
  b.specificity = 0.7;
  EXPECT_TRUE(ranks_before(b, a));
  a.specificity = 0.7;
  EXPECT_TRUE(ranks_before(a, b));
  b.sensitivity = 0.9;
  b.config.flavour_filter = 0.5;
  a.config.flavour_filter = 0.25;
  EXPECT_TRUE(ranks_before(a, b));
}
