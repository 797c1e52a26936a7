#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "flavornet/flavornet.hpp"

namespace fs = std::filesystem;
using namespace flavornet;
using nlohmann::json;

namespace {

void log(const std::string& msg) { std::cerr << "flavornet: " << msg << '\n'; }

json read_json_file(const std::string& path) {
  auto in = detail::open_input(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(0, path + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& j) {
  auto out = detail::open_output(path.string());
  out << j.dump(2) << '\n';
}

fs::path ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

std::string config_value(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// Feeds keys of a JSON object into the matching --key options that were not
// given on the command line.
void apply_config(CLI::App* sub, const std::string& path) {
  const auto j = read_json_file(path);
  if (!j.is_object()) throw CLI::ValidationError("--config", "expected a JSON object in " + path);
  for (const auto& [key, value] : j.items()) {
    auto* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) {
      throw CLI::ValidationError("--config", "unknown key '" + key + "' in " + path);
    }
    if (opt->count() > 0) continue;
    if (value.is_array()) {
      for (const auto& v : value) opt->add_result(config_value(v));
    } else {
      opt->add_result(config_value(value));
    }
    opt->run_callback();
  }
}

struct Pipeline {
  PipelineConfig config;

  void attach(CLI::App* app) {
    app->add_option("--ff", config.flavour_filter, "flavour network filtration factor");
    app->add_option("--fr", config.recipe_filter, "recipe network filtration factor");
    app->add_option("--knowledge", config.knowledge_fraction,
                    "fraction of training recipes used as knowledge");
    app->add_option("--trials", config.trials, "community detection trials");
    app->add_option("--step", config.step, "sweep grid spacing");
  }
};

struct Inputs {
  std::string network, western, eastern;

  void attach(CLI::App* app) {
    app->add_option("--network", network, "ingredient network (tsv)")->required();
    app->add_option("--western,--west", western, "compatible recipes (jsonl or csv)")->required();
    app->add_option("--eastern,--east", eastern, "contrasting recipes (jsonl or csv)")->required();
  }

  struct Loaded {
    Network network;
    PreparedCorpora corpora;
  };

  Loaded load(std::uint64_t seed) const {
    Loaded l;
    l.network = read_network_file(network);
    auto w = load_recipes_file(western, "western");
    auto e = load_recipes_file(eastern, "eastern");
    if (w.skipped_records + e.skipped_records > 0) {
      log("skipped " + std::to_string(w.skipped_records + e.skipped_records) + " empty recipes");
    }
    l.corpora = prepare_corpora(l.network, w.corpus, e.corpus, seed);
    log("western " + l.corpora.western_match.report().dump());
    log("eastern " + l.corpora.eastern_match.report().dump());
    return l;
  }
};

struct Model {
  Partition partition;
  Network network;
};

Model load_model(const std::string& dir) {
  const fs::path d(dir);
  auto in = detail::open_input((d / "partition.tsv").string());
  return Model{read_partition(in), read_network_file((d / "network.tsv").string())};
}

// Writes to <dir>/<name> when an output directory was given, stdout otherwise.
template <typename Fn>
void emit(const std::string& dir, const std::string& name, Fn&& fn) {
  if (dir.empty()) {
    fn(std::cout);
    return;
  }
  auto out = detail::open_output((ensure_dir(dir) / name).string());
  fn(out);
}

void write_audit(const fs::path& path, const std::vector<AuditEntry>& log_entries) {
  auto out = detail::open_output(path.string());
  for (const auto& entry : log_entries) out << entry.to_json().dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ingredient compatibility from flavour networks and recipe knowledge"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::string out_dir, config_path, format = "json";
  auto common = [&](CLI::App* sub, bool out_required) {
    sub->add_option("--seed", seed, "master seed");
    auto* o = sub->add_option("--out", out_dir, "output directory");
    if (out_required) o->required();
    sub->add_option("--config", config_path, "JSON file whose keys mirror the flags");
  };
  auto with_format = [&](CLI::App* sub) {
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* gen = app.add_subcommand("generate", "write a synthetic planted dataset");
  SyntheticSpec spec;
  common(gen, true);
  gen->add_option("--clusters", spec.clusters);
  gen->add_option("--ingredients-per-cluster", spec.ingredients_per_cluster);
  gen->add_option("--compounds-per-cluster", spec.compounds_per_cluster);
  gen->add_option("--compounds-per-ingredient", spec.compounds_per_ingredient);
  gen->add_option("--overlap", spec.compound_overlap);
  gen->add_option("--recipes", spec.recipes_per_corpus);
  gen->add_option("--recipe-size-min", spec.recipe_size_min);
  gen->add_option("--recipe-size-max", spec.recipe_size_max);
  gen->add_option("--noise", spec.noise);

  auto* proj = app.add_subcommand("project", "project a bipartite graph onto ingredients");
  std::string bip_path;
  double proj_ff = 0.0;
  common(proj, true);
  proj->add_option("--bipartite", bip_path, "ingredient<TAB>compound edge list")->required();
  proj->add_option("--ff", proj_ff, "filtration factor applied to the projection");

  auto* filt = app.add_subcommand("filter", "local filtration of a weighted network");
  std::string filt_in;
  double factor = 1.0;
  common(filt, true);
  filt->add_option("--network", filt_in)->required();
  filt->add_option("--factor,--ff", factor);

  auto* san = app.add_subcommand("sanity-check", "reconcile two co-occurrence networks");
  std::string san_w, san_e;
  common(san, true);
  san->add_option("--western,--west", san_w, "must-link candidate network")->required();
  san->add_option("--eastern,--east", san_e, "cannot-link candidate network")->required();

  auto* tr = app.add_subcommand("train", "train a model bundle");
  Inputs tr_in;
  Pipeline tr_cfg;
  common(tr, true);
  tr_in.attach(tr);
  tr_cfg.attach(tr);

  auto* ev = app.add_subcommand("evaluate", "repeated train and score");
  Inputs ev_in;
  Pipeline ev_cfg;
  std::size_t ev_reps = 10;
  std::string ev_target = "validation";
  common(ev, false);
  with_format(ev);
  ev_in.attach(ev);
  ev_cfg.attach(ev);
  ev->add_option("--repetitions,--reps", ev_reps);
  ev->add_option("--target", ev_target)->check(CLI::IsMember({"validation", "test"}));

  auto* sw = app.add_subcommand("sweep", "grid search over ff, fr and knowledge");
  Inputs sw_in;
  Pipeline sw_cfg;
  SweepOptions sw_opt;
  sw_opt.threads = std::max(1u, std::thread::hardware_concurrency());
  std::optional<double> fix_ff, fix_fr, fix_k;
  common(sw, false);
  with_format(sw);
  sw_in.attach(sw);
  sw_cfg.attach(sw);
  sw->add_option("--repetitions,--reps", sw_opt.repetitions);
  sw->add_option("--threads", sw_opt.threads);
  sw->add_option("--fix-ff", fix_ff);
  sw->add_option("--fix-fr", fix_fr);
  sw->add_option("--fix-knowledge", fix_k);

  auto* cl = app.add_subcommand("classify", "verdict for one ingredient pair");
  std::string cl_model;
  std::vector<std::string> cl_pair;
  common(cl, false);
  cl->add_option("--model", cl_model)->required();
  cl->add_option("--pair,pair", cl_pair, "two ingredients, comma separated or positional")
      ->delimiter(',')
      ->expected(2)
      ->required();

  auto* rk = app.add_subcommand("rank", "rank all ingredient pairs");
  std::string rk_model;
  std::size_t rk_limit = 20;
  common(rk, false);
  with_format(rk);
  rk->add_option("--model", rk_model)->required();
  rk->add_option("--limit", rk_limit);

  try {
    app.parse(argc, argv);
    for (auto* sub : app.get_subcommands()) {
      if (!config_path.empty()) apply_config(sub, config_path);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      spec.seed = seed;
      auto data = generate_synthetic(spec);
      const auto dir = ensure_dir(out_dir);
      auto b = detail::open_output((dir / "bipartite.tsv").string());
      write_bipartite(b, data.bipartite);
      auto w = detail::open_output((dir / "western.jsonl").string());
      write_recipes(w, data.western);
      auto e = detail::open_output((dir / "eastern.jsonl").string());
      write_recipes(e, data.eastern);
      auto l = detail::open_output((dir / "labels.tsv").string());
      for (const auto& [id, c] : data.labels) l << id << '\t' << c << '\n';
      write_json_file(dir / "spec.json", spec.to_json());
      log("wrote synthetic dataset to " + dir.string());
    } else if (proj->parsed()) {
      auto net = filter_local(project(load_bipartite_file(bip_path)), proj_ff);
      const auto dir = ensure_dir(out_dir);
      write_network_file((dir / "network.tsv").string(), net);
      const auto h = degree_histogram(net);
      auto hist = detail::open_output((dir / "degrees.csv").string());
      write_histogram_csv(hist, h);
      write_json_file(dir / "summary.json", histogram_summary_json(h));
      log("projected " + histogram_summary_json(h).dump());
    } else if (filt->parsed()) {
      auto in = read_network_file(filt_in);
      auto out = filter_local(in, factor);
      write_network_file((ensure_dir(out_dir) / "network.tsv").string(), out);
      log("kept " + std::to_string(out.edge_count()) + " of " + std::to_string(in.edge_count()) +
          " edges");
    } else if (san->parsed()) {
      auto r = sanity_check(read_network_file(san_w), read_network_file(san_e));
      const auto dir = ensure_dir(out_dir);
      write_network_file((dir / "western.tsv").string(), r.western);
      write_network_file((dir / "eastern.tsv").string(), r.eastern);
      write_audit(dir / "audit.jsonl", r.log);
      log(std::to_string(r.log.size()) + " discrepancies resolved");
    } else if (tr->parsed()) {
      auto config = tr_cfg.config;
      config.seed = seed;
      config.validate();
      auto in = tr_in.load(seed);
      auto model = train(in.network, in.corpora.western.train, in.corpora.eastern.train, config);
      const auto dir = ensure_dir(out_dir);
      auto p = detail::open_output((dir / "partition.tsv").string());
      write_partition(p, model.partition);
      write_network_file((dir / "network.tsv").string(), in.network);
      write_json_file(dir / "config.json", config.to_json());
      write_audit(dir / "audit.jsonl", model.reconciled.log);
      json metrics{{"codelength", model.partition.codelength},
                   {"communities", model.partition.community_count()},
                   {"must_link", model.constraints.must_link.size()},
                   {"cannot_link", model.constraints.cannot_link.size()},
                   {"dropped_constraint_pairs", model.dropped_constraint_pairs}};
      for (const auto& [name, w, e] :
           {std::tuple{"validation", &in.corpora.western.validation, &in.corpora.eastern.validation},
            std::tuple{"test", &in.corpora.western.test, &in.corpora.eastern.test}}) {
        try {
          metrics[name] = {{"sensitivity", sensitivity(model.partition, *w)},
                           {"specificity", specificity(model.partition, *e)}};
        } catch (const UndefinedScoreError& err) {
          metrics[name] = nullptr;
          log(std::string(name) + ": " + err.what());
        }
      }
      write_json_file(dir / "metrics.json", metrics);
      log("trained " + std::to_string(model.partition.community_count()) + " communities");
    } else if (ev->parsed()) {
      auto config = ev_cfg.config;
      config.seed = seed;
      auto in = ev_in.load(seed);
      auto report = evaluate(in.network, in.corpora.western, in.corpora.eastern, config, ev_reps,
                             ev_target == "test" ? EvalTarget::kTest : EvalTarget::kValidation);
      emit(out_dir, format == "csv" ? "metrics.csv" : "metrics.json", [&](std::ostream& out) {
        if (format == "csv") {
          out << "repetition,sensitivity,specificity,codelength\n";
          for (std::size_t r = 0; r < report.repetitions.size(); ++r) {
            const auto& s = report.repetitions[r];
            out << r << ',' << format_number(s.sensitivity) << ',' << format_number(s.specificity)
                << ',' << format_number(s.codelength) << '\n';
          }
          out << "mean," << format_number(report.sensitivity) << ','
              << format_number(report.specificity) << ',' << format_number(report.codelength)
              << '\n';
        } else {
          out << report.metrics_json().dump(2) << '\n';
        }
      });
    } else if (sw->parsed()) {
      auto config = sw_cfg.config;
      config.seed = seed;
      config.validate();
      sw_opt.step = config.step;
      sw_opt.trials = config.trials;
      sw_opt.seed = seed;
      sw_opt.fixed_flavour_filter = fix_ff;
      sw_opt.fixed_recipe_filter = fix_fr;
      sw_opt.fixed_knowledge = fix_k;
      auto in = sw_in.load(seed);
      auto rows = sweep(in.network, in.corpora.western, in.corpora.eastern, sw_opt);
      emit(out_dir, format == "csv" ? "sweep.csv" : "sweep.json", [&](std::ostream& out) {
        if (format == "csv") {
          write_sweep_csv(out, rows);
          return;
        }
        json arr = json::array();
        for (const auto& r : rows) arr.push_back(sweep_row_json(r));
        out << arr.dump(2) << '\n';
      });
      if (!rows.empty()) {
        if (!out_dir.empty()) write_json_file(fs::path(out_dir) / "best.json", sweep_row_json(rows.front()));
        log("best " + sweep_row_json(rows.front()).dump());
      }
    } else if (cl->parsed()) {
      auto m = load_model(cl_model);
      const auto verdict = classify_pair(m.partition, m.network, cl_pair.at(0), cl_pair.at(1));
      emit(out_dir, "verdict.json", [&](std::ostream& out) { out << verdict.to_json().dump() << '\n'; });
    } else if (rk->parsed()) {
      auto m = load_model(rk_model);
      auto ranked = rank_pairs(m.network, m.partition, rk_limit);
      emit(out_dir, format == "csv" ? "ranking.csv" : "ranking.json", [&](std::ostream& out) {
        if (format == "csv") {
          out << "a,b,compatible,score\n";
          for (const auto& v : ranked) {
            out << v.pair.first << ',' << v.pair.second << ',' << (v.compatible ? 1 : 0) << ','
                << format_number(v.score) << '\n';
          }
          return;
        }
        json arr = json::array();
        for (const auto& v : ranked) arr.push_back(v.to_json());
        out << arr.dump(2) << '\n';
      });
    }
  } catch (const IoError& e) {
    log(e.what());
    return 1;
  } catch (const Error& e) {
    log(e.what());
    return 2;
  }
  return 0;
}
