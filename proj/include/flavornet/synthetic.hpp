#pragma once

// Planted-cuisine generator: clustered compound profiles plus two recipe
// corpora, one pairing ingredients inside clusters ("western") and one
// pairing across clusters ("eastern"), with known cluster labels.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"
#include "flavornet/random.hpp"
#include "flavornet/recipe_corpus.hpp"

namespace flavornet {

struct SyntheticSpec {
  std::size_t clusters = 4;
  std::size_t ingredients_per_cluster = 15;
  std::size_t compounds_per_cluster = 40;
  std::size_t compounds_per_ingredient = 10;
  double compound_overlap = 0.1;  // share of an ingredient's compounds taken from other clusters
  std::size_t recipes_per_corpus = 200;
  std::size_t recipe_size_min = 3;
  std::size_t recipe_size_max = 4;
  double noise = 0.05;            // chance that a recipe gets one off-pattern ingredient
  std::uint64_t seed = 0;

  void validate() const {
    if (clusters < 2) throw DomainError("need at least two clusters");
    if (ingredients_per_cluster == 0 || compounds_per_cluster == 0 ||
        compounds_per_ingredient == 0 || recipes_per_corpus == 0) {
      throw DomainError("synthetic sizes must be positive");
    }
    if (!(compound_overlap >= 0.0 && compound_overlap <= 1.0) || !(noise >= 0.0 && noise <= 1.0)) {
      throw DomainError("synthetic fractions must lie in [0, 1]");
    }
    if (recipe_size_min < 2 || recipe_size_min > recipe_size_max) {
      throw DomainError("recipe size range must satisfy 2 <= min <= max");
    }
    if (recipe_size_max > ingredients_per_cluster) {
      throw DomainError("recipe size exceeds the ingredients available in a cluster");
    }
    if (own_compounds() > compounds_per_cluster ||
        foreign_compounds() > compounds_per_cluster * (clusters - 1)) {
      throw DomainError("compounds per ingredient exceed the compound pools");
    }
  }

  std::size_t foreign_compounds() const {
    return static_cast<std::size_t>(
        std::lround(compound_overlap * static_cast<double>(compounds_per_ingredient)));
  }
  std::size_t own_compounds() const { return compounds_per_ingredient - foreign_compounds(); }

  nlohmann::json to_json() const {
    return {{"clusters", clusters},
            {"ingredients_per_cluster", ingredients_per_cluster},
            {"compounds_per_cluster", compounds_per_cluster},
            {"compounds_per_ingredient", compounds_per_ingredient},
            {"compound_overlap", compound_overlap},
            {"recipes_per_corpus", recipes_per_corpus},
            {"recipe_size_min", recipe_size_min},
            {"recipe_size_max", recipe_size_max},
            {"noise", noise},
            {"seed", seed}};
  }
};

struct SyntheticData {
  BipartiteGraph bipartite;
  RecipeCorpus western{"western"};
  RecipeCorpus eastern{"eastern"};
  std::map<NodeId, std::size_t> labels;  // ingredient -> planted cluster
};

namespace detail {

inline std::string numbered(const char* prefix, std::size_t cluster, std::size_t i) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%s%02zu_%03zu", prefix, cluster, i);
  return buf;
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace detail

inline std::string synthetic_ingredient(std::size_t cluster, std::size_t i) {
  return detail::numbered("ing", cluster, i);
}

inline std::string synthetic_compound(std::size_t cluster, std::size_t i) {
  return detail::numbered("cmp", cluster, i);
}

inline SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  SyntheticData data;
  const std::size_t k = spec.clusters;
  const std::size_t per = spec.ingredients_per_cluster;
  const std::size_t pool = spec.compounds_per_cluster;

  Rng rng(derive_seed(spec.seed, "synthetic-compounds"));
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < per; ++i) {
      const auto ing = synthetic_ingredient(c, i);
      data.labels[ing] = c;
      data.bipartite.add_ingredient(ing);
      for (auto j : sample_indices(pool, spec.own_compounds(), rng())) {
        data.bipartite.add_edge(ing, synthetic_compound(c, j));
      }
      // foreign compounds: uniform over the pools of all other clusters
      for (auto j : sample_indices(pool * (k - 1), spec.foreign_compounds(), rng())) {
        std::size_t other = j / pool;
        if (other >= c) ++other;
        data.bipartite.add_edge(ing, synthetic_compound(other, j % pool));
      }
    }
  }

  Rng recipes(derive_seed(spec.seed, "synthetic-recipes"));
  std::uniform_int_distribution<std::size_t> size_dist(spec.recipe_size_min, spec.recipe_size_max);
  std::bernoulli_distribution noisy(spec.noise);
  char id[32];

  for (std::size_t r = 0; r < spec.recipes_per_corpus; ++r) {
    const std::size_t c = detail::uniform_index(recipes, k);
    const std::size_t size = size_dist(recipes);
    std::vector<std::string> picked;
    for (auto i : sample_indices(per, size, recipes())) picked.push_back(synthetic_ingredient(c, i));
    if (noisy(recipes)) {
      std::size_t other = detail::uniform_index(recipes, k - 1);
      if (other >= c) ++other;
      picked[detail::uniform_index(recipes, size)] =
          synthetic_ingredient(other, detail::uniform_index(recipes, per));
    }
    std::snprintf(id, sizeof id, "w%05zu", r);
    data.western.add(Recipe{id, {picked.begin(), picked.end()}});
  }

  for (std::size_t r = 0; r < spec.recipes_per_corpus; ++r) {
    const std::size_t size = size_dist(recipes);
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), recipes);
    // round-robin over a random cluster order, distinct ingredients per cluster
    std::vector<std::size_t> take(k, 0);
    for (std::size_t s = 0; s < size; ++s) ++take[order[s % k]];
    std::vector<std::string> picked;
    std::vector<std::size_t> cluster_of;
    for (std::size_t c = 0; c < k; ++c) {
      if (take[c] == 0) continue;
      for (auto i : sample_indices(per, take[c], recipes())) {
        picked.push_back(synthetic_ingredient(c, i));
        cluster_of.push_back(c);
      }
    }
    if (noisy(recipes) && picked.size() >= 2) {
      const std::size_t anchor = detail::uniform_index(recipes, picked.size());
      std::size_t victim = detail::uniform_index(recipes, picked.size() - 1);
      if (victim >= anchor) ++victim;
      picked[victim] =
          synthetic_ingredient(cluster_of[anchor], detail::uniform_index(recipes, per));
    }
    std::snprintf(id, sizeof id, "e%05zu", r);
    data.eastern.add(Recipe{id, {picked.begin(), picked.end()}});
  }
  return data;
}

}  // namespace flavornet
