#pragma once

// Recipe corpora: loading, matching against the ingredient network,
// balancing, 80/10/10 splitting and co-occurrence graphs.

#include <cmath>
#include <cstdint>
#include <istream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flavornet/error.hpp"
#include "flavornet/graph_core.hpp"
#include "flavornet/graph_io.hpp"
#include "flavornet/random.hpp"

namespace flavornet {

struct Recipe {
  std::string id;
  std::set<NodeId> ingredients;

  friend bool operator==(const Recipe&, const Recipe&) = default;
};

/// Labelled, ordered list of recipes with unique ids.
class RecipeCorpus {
 public:
  RecipeCorpus() = default;
  explicit RecipeCorpus(std::string label) : label_(std::move(label)) {}

  /// Throws IntegrityError on a duplicate id and DomainError on an empty recipe.
  void add(Recipe r) {
    if (r.ingredients.empty()) throw DomainError("recipe '" + r.id + "' has no ingredients");
    if (!ids_.insert(r.id).second) throw IntegrityError("duplicate recipe id '" + r.id + "'");
    recipes_.push_back(std::move(r));
  }

  const std::string& label() const noexcept { return label_; }
  const std::vector<Recipe>& recipes() const noexcept { return recipes_; }
  std::size_t size() const noexcept { return recipes_.size(); }
  bool empty() const noexcept { return recipes_.empty(); }
  bool contains(const std::string& id) const { return ids_.count(id) != 0; }

  /// Sub-corpus made of the recipes at `indices`, in the order given.
  RecipeCorpus subset(const std::vector<std::size_t>& indices) const {
    RecipeCorpus out(label_);
    for (auto i : indices) out.add(recipes_.at(i));
    return out;
  }

  friend bool operator==(const RecipeCorpus& a, const RecipeCorpus& b) {
    return a.label_ == b.label_ && a.recipes_ == b.recipes_;
  }

 private:
  std::string label_;
  std::vector<Recipe> recipes_;
  std::set<std::string> ids_;
};

struct LoadedCorpus {
  RecipeCorpus corpus;
  std::size_t skipped_records = 0;  // records with an empty ingredient list
};

namespace detail {

inline Recipe parse_json_recipe(std::string_view line, std::size_t line_no) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("id") || !j.contains("ingredients") ||
      !j["ingredients"].is_array()) {
    throw ParseError(line_no, "expected {\"id\": ..., \"ingredients\": [...]}");
  }
  Recipe r;
  r.id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
  for (const auto& ing : j["ingredients"]) {
    if (!ing.is_string()) throw ParseError(line_no, "ingredient identifiers must be strings");
    auto s = ing.get<std::string>();
    if (!s.empty()) r.ingredients.insert(std::move(s));
  }
  return r;
}

inline Recipe parse_csv_recipe(std::string_view line, std::size_t line_no) {
  auto comma = line.find(',');
  if (comma == std::string_view::npos || comma == 0) {
    throw ParseError(line_no, "expected 'id,ingredient1;ingredient2;...'");
  }
  Recipe r;
  r.id = std::string(line.substr(0, comma));
  for (auto ing : split(line.substr(comma + 1), ';')) {
    if (!ing.empty()) r.ingredients.insert(std::string(ing));
  }
  return r;
}

}  // namespace detail

/// Reads JSON Lines (`{"id": ..., "ingredients": [...]}`) or the CSV
/// fallback `id,ing1;ing2;...`; the format is chosen per line by its first
/// character. Records without ingredients are skipped and counted.
inline LoadedCorpus load_recipes(std::istream& in, std::string label) {
  LoadedCorpus out{RecipeCorpus(std::move(label)), 0};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto line = detail::chomp(raw);
    if (line.empty() || line.front() == '#') continue;
    Recipe r = line.front() == '{' ? detail::parse_json_recipe(line, line_no)
                                   : detail::parse_csv_recipe(line, line_no);
    if (r.ingredients.empty()) {
      ++out.skipped_records;
      continue;
    }
    if (out.corpus.contains(r.id)) {
      throw IntegrityError("line " + std::to_string(line_no) + ": duplicate recipe id '" + r.id +
                           "'");
    }
    out.corpus.add(std::move(r));
  }
  return out;
}

inline LoadedCorpus load_recipes_file(const std::string& path, std::string label) {
  auto in = detail::open_input(path);
  return load_recipes(in, std::move(label));
}

inline void write_recipes(std::ostream& out, const RecipeCorpus& c) {
  for (const auto& r : c.recipes()) {
    nlohmann::json j{{"id", r.id}, {"ingredients", r.ingredients}};
    out << j.dump() << '\n';
  }
}

struct MatchResult {
  RecipeCorpus corpus;
  std::size_t input_recipes = 0;
  std::size_t dropped_recipes = 0;
  std::size_t unknown_ingredient_mentions = 0;

  nlohmann::json report() const {
    return {{"input_recipes", input_recipes},
            {"kept_recipes", corpus.size()},
            {"unknown_ingredient_mentions", unknown_ingredient_mentions}};
  }
};

/// Restricts every recipe to ingredients present in `n`; recipes left with
/// fewer than two ingredients are dropped.
inline MatchResult match_to_network(const RecipeCorpus& c, const Network& n) {
  MatchResult m{RecipeCorpus(c.label()), c.size(), 0, 0};
  for (const auto& r : c.recipes()) {
    Recipe kept{r.id, {}};
    for (const auto& ing : r.ingredients) {
      if (n.has_node(ing)) {
        kept.ingredients.insert(ing);
      } else {
        ++m.unknown_ingredient_mentions;
      }
    }
    if (kept.ingredients.size() < 2) {
      ++m.dropped_recipes;
      continue;
    }
    m.corpus.add(std::move(kept));
  }
  return m;
}

/// Downsamples the larger corpus, without replacement, to the size of the
/// smaller one. Selected recipes keep their original order.
inline std::pair<RecipeCorpus, RecipeCorpus> balance_corpora(const RecipeCorpus& a,
                                                             const RecipeCorpus& b,
                                                             std::uint64_t seed) {
  if (a.empty() || b.empty()) throw DomainError("cannot balance an empty corpus");
  if (a.size() == b.size()) return {a, b};
  const bool a_larger = a.size() > b.size();
  const RecipeCorpus& larger = a_larger ? a : b;
  const std::size_t target = std::min(a.size(), b.size());
  RecipeCorpus reduced = larger.subset(sample_indices(larger.size(), target, seed));
  return a_larger ? std::pair{std::move(reduced), b} : std::pair{a, std::move(reduced)};
}

struct SplitSizes {
  std::size_t train;
  std::size_t validation;
  std::size_t test;
};

/// floor(0.8 N) / floor(0.1 N) / remainder.
inline SplitSizes split_sizes(std::size_t n) {
  SplitSizes s{n * 8 / 10, n / 10, 0};
  s.test = n - s.train - s.validation;
  return s;
}

struct CorpusSplit {
  RecipeCorpus train;
  RecipeCorpus validation;
  RecipeCorpus test;
  std::uint64_t seed = 0;
};

/// Seeded shuffle followed by an 80/10/10 cut.
inline CorpusSplit split_corpus(const RecipeCorpus& c, std::uint64_t seed) {
  if (c.size() < 10) throw DomainError("need at least 10 recipes to split, got " +
                                       std::to_string(c.size()));
  std::vector<std::size_t> order(c.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto sizes = split_sizes(c.size());
  auto part = [&](std::size_t from, std::size_t count) {
    return c.subset(std::vector<std::size_t>(order.begin() + static_cast<std::ptrdiff_t>(from),
                                             order.begin() +
                                                 static_cast<std::ptrdiff_t>(from + count)));
  };
  return CorpusSplit{part(0, sizes.train), part(sizes.train, sizes.validation),
                     part(sizes.train + sizes.validation, sizes.test), seed};
}

/// Weight of {a, b} = number of recipes containing both a and b.
inline CooccurrenceGraph build_cooccurrence(const RecipeCorpus& c) {
  CooccurrenceGraph g;
  for (const auto& r : c.recipes()) {
    for (const auto& ing : r.ingredients) g.add_node(ing);
    for (auto i = r.ingredients.begin(); i != r.ingredients.end(); ++i) {
      for (auto j = std::next(i); j != r.ingredients.end(); ++j) g.add_weight(*i, *j, 1.0);
    }
  }
  return g;
}

}  // namespace flavornet
