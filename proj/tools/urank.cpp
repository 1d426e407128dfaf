// urank: command-line front end for training, scoring and evaluating
// uncertainty-aware Beta-binomial ranking models.

#include "urank/clustering.hpp"
#include "urank/dataset.hpp"
#include "urank/empirical_bayes.hpp"
#include "urank/errors.hpp"
#include "urank/evaluation.hpp"
#include "urank/features.hpp"
#include "urank/model_io.hpp"
#include "urank/optimizer.hpp"
#include "urank/parallel.hpp"
#include "urank/scoring.hpp"
#include "urank/synthesis.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace urank;

namespace {

enum ExitCode { kOk = 0, kInput = 2, kNumeric = 3, kIo = 4 };

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw InputError(std::string("missing --") + what);
  if (!fs::is_regular_file(path)) throw InputError(std::string(what) + " file not found: " + path);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Shared inputs for building context vectors from interactions.
struct ContextInputs {
  std::string items;
  std::string clusters;
  int num_clusters = 64;

  void add(CLI::App* app) {
    app->add_option("--items", items, "item feature JSON-lines (item_id, dim, indices, values)");
    app->add_option("--clusters", clusters, "user cluster TSV (user_id, cluster)");
    app->add_option("--num-clusters", num_clusters, "number of user clusters K")->check(CLI::PositiveNumber);
  }
  void validate() const {
    require_file(items, "items");
    require_file(clusters, "clusters");
  }
  FeatureConfig config(Index d0) const {
    FeatureConfig cfg;
    cfg.d0 = d0;
    cfg.clusters = num_clusters;
    cfg.cluster_of = load_clusters(clusters);
    return cfg;
  }
  Dataset dataset(std::vector<InteractionRecord> records) const {
    auto raw = load_sparse_jsonl(items, "item_id");
    if (raw.empty()) throw InputError(items + ": no item features");
    const Index d0 = raw.front().second.dim();
    const ItemFeatures index = index_items(std::move(raw));
    return build_dataset(std::move(records), index, config(d0));
  }
};

// --- cluster ---------------------------------------------------------------

struct ClusterCmd {
  std::string histories;
  std::string out;
  int k = 64;
  std::uint64_t seed = 0;
  int max_iter = 100;
  int restarts = 8;

  void add(CLI::App* app) {
    app->add_option("--histories", histories, "user history JSON-lines keyed by user_id");
    app->add_option("--num-clusters", k, "number of clusters K")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "maximum assignment passes")->check(CLI::PositiveNumber);
    app->add_option("--restarts", restarts, "random initializations; the best final objective wins")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "initialization seed");
    app->add_option("--out", out, "output cluster TSV");
  }
  void run() const {
    require_file(histories, "histories");
    if (out.empty()) throw InputError("missing --out");
    std::vector<UserHistory> hs;
    for (auto& [id, vec] : load_sparse_jsonl(histories, "user_id")) {
      if (std::abs(vec.squared_norm() - 1.0) > 1e-9) throw InputError("history of " + id + " is not unit-norm");
      hs.push_back({id, std::move(vec)});
    }
    const KMeansResult r = spherical_kmeans(hs, k, seed, max_iter, restarts);
    write_clusters(out, r.labels);
  }
};

// --- synth -----------------------------------------------------------------

struct SynthCmd {
  std::string spec;
  std::string out_dir;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--spec", spec, "synthesis spec JSON");
    app->add_option("--seed", seed, "generator seed");
    app->add_option("--out-dir", out_dir, "directory for the generated files");
  }
  void run() const {
    require_file(spec, "spec");
    if (out_dir.empty()) throw InputError("missing --out-dir");
    const SyntheticData d = synthesize_dataset(load_synthesis_spec(spec), seed);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    const fs::path dir(out_dir);
    write_interactions(dir / "train.tsv", d.train.records);
    write_interactions(dir / "test.tsv", d.test.records);
    write_sparse_jsonl(dir / "items.jsonl", "item_id", d.items);
    std::vector<std::pair<std::string, SparseVector>> hist;
    for (const auto& h : d.histories) hist.emplace_back(h.user_id, h.item_indicator);
    write_sparse_jsonl(dir / "histories.jsonl", "user_id", hist);
    write_clusters(dir / "clusters.tsv", d.config.cluster_of);
    json truth{{"d0", d.config.d0},
               {"clusters", d.config.clusters},
               {"beta", std::vector<double>(d.truth.beta.data(), d.truth.beta.data() + d.truth.beta.size())},
               {"rho", std::vector<double>(d.truth.rho.data(), d.truth.rho.data() + d.truth.rho.size())}};
    write_file_atomic(dir / "truth.json", truth.dump() + "\n");
  }
};

// --- featurize -------------------------------------------------------------

struct FeaturizeCmd {
  std::string interactions;
  ContextInputs ctx;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--interactions", interactions, "interaction TSV");
    ctx.add(app);
    app->add_option("--out", out, "output context JSON-lines keyed by pair id");
  }
  void run() const {
    require_file(interactions, "interactions");
    ctx.validate();
    if (out.empty()) throw InputError("missing --out");
    const Dataset ds = ctx.dataset(load_interactions(interactions));
    std::vector<std::pair<std::string, SparseVector>> rows;
    for (std::size_t r = 0; r < ds.size(); ++r) {
      rows.emplace_back(pair_id(ds.records[r].user_id, ds.records[r].item_id), ds.context(r));
    }
    write_sparse_jsonl(out, "id", rows);
  }
};

// --- train -----------------------------------------------------------------

struct TrainCmd {
  std::string interactions;
  ContextInputs ctx;
  std::string kind = "prop";
  int rank = 32;
  std::uint64_t seed = 0;
  double grad_tol = 1e-6;
  int max_iter = 500;
  int max_outer = 20;
  std::string out;
  std::string report;

  void add(CLI::App* app) {
    app->add_option("--interactions", interactions, "training interaction TSV");
    ctx.add(app);
    app->add_option("--model-kind", kind, "prop | m-prop | m-log | l-log | m-bbl | l-bbl");
    app->add_option("--rank", rank, "low-rank posterior rank k")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "thin-SVD seed");
    app->add_option("--grad-tol", grad_tol, "MAP gradient tolerance")->check(CLI::PositiveNumber);
    app->add_option("--max-iter", max_iter, "MAP iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--max-outer", max_outer, "empirical-Bayes iteration cap")->check(CLI::PositiveNumber);
    app->add_option("--out", out, "output model JSON");
    app->add_option("--report", report, "output fit report JSON");
  }
  void run() const {
    require_file(interactions, "interactions");
    ctx.validate();
    if (out.empty()) throw InputError("missing --out");
    const ModelKind mk = parse_model_kind(kind);
    const auto start = std::chrono::steady_clock::now();
    const Dataset ds = ctx.dataset(load_interactions(interactions));
    EmpiricalBayesOptions opts;
    opts.rank = rank;
    opts.seed = seed;
    opts.fit.grad_tol = grad_tol;
    opts.fit.max_iter = max_iter;
    opts.max_outer = max_outer;
    const PosteriorModel model = fit_model(ds, mk, opts);
    save_model(model, out);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (model.diagnostics.map_warning) std::cerr << "warning: MAP fit stopped before meeting the gradient test\n";
    if (!report.empty()) {
      const FitDiagnostics& d = model.diagnostics;
      json j{{"model_kind", to_string(mk)},
             {"records", ds.size()},
             {"dim", ds.dim},
             {"rank", rank},
             {"beta_rank", model.beta_block.rank()},
             {"rho_rank", model.rho_block.rank()},
             {"seed", seed},
             {"outer_iterations", d.outer_iterations},
             {"marginal_nll_trace", d.marginal_nll_trace},
             {"c_beta_trace", d.c_beta_trace},
             {"c_rho_trace", d.c_rho_trace},
             {"final_marginal_nll", d.final_marginal_nll},
             {"clamped_fraction_beta", d.clamped_fraction_beta},
             {"clamped_fraction_rho", d.clamped_fraction_rho},
             {"map_warning", d.map_warning},
             {"wall_time_seconds", wall}};
      write_file_atomic(report, j.dump(2) + "\n");
    }
  }
};

// --- score -----------------------------------------------------------------

struct ScoreCmd {
  std::string model;
  std::string interactions;
  ContextInputs ctx;
  std::string measure = "UCQE";
  double nu = 0.95;
  double nu2 = 0.95;
  std::size_t samples = kDefaultSamples;
  std::uint64_t seed = 0;
  std::string out;

  void add(CLI::App* app) {
    app->add_option("--model", model, "model JSON from `train`");
    app->add_option("--interactions", interactions, "TSV of (user, item) pairs to score");
    ctx.add(app);
    app->add_option("--measure", measure, "UCBE | UCQE | EUQ | UCQUQ | UQP");
    app->add_option("--nu", nu, "quantile level (nu1 for UCQUQ)");
    app->add_option("--nu2", nu2, "outer quantile level for UCQUQ");
    app->add_option("--samples", samples, "QMC sample count m")->check(CLI::PositiveNumber);
    app->add_option("--seed", seed, "QMC scramble seed");
    app->add_option("--out", out, "output scores TSV");
  }
  void run() const {
    require_file(model, "model");
    require_file(interactions, "interactions");
    ctx.validate();
    if (out.empty()) throw InputError("missing --out");
    ScoreSpec spec;
    spec.measure = parse_measure(measure);
    spec.nu = nu;
    if (spec.measure == Measure::ucquq) spec.nu2 = nu2;
    spec.m = samples;
    spec.seed = seed;
    spec.validate();
    const PosteriorModel pm = load_model(model);
    const Dataset ds = ctx.dataset(load_interactions(interactions));
    std::vector<std::pair<std::string, SparseVector>> contexts;
    for (std::size_t r = 0; r < ds.size(); ++r) {
      contexts.emplace_back(pair_id(ds.records[r].user_id, ds.records[r].item_id), ds.context(r));
    }
    write_file_atomic(out, format_scores(score_batch(pm, contexts, spec), spec));
  }
};

// --- eval ------------------------------------------------------------------

struct Measures {
  double sauc = 0.0;
  double auc = 0.0;
  std::optional<double> loglik;
};

struct EvalCmd {
  std::string scores;
  std::string test;
  std::string train;
  ContextInputs ctx;
  std::string model;
  int folds = 0;
  std::uint64_t seed = 0;
  std::string weighting = "two-sided";
  std::string out;
  std::string samples_out;

  void add(CLI::App* app) {
    app->add_option("--scores", scores, "scores TSV from `score`");
    app->add_option("--test", test, "test interaction TSV");
    app->add_option("--train", train, "training interaction TSV (click histories)");
    ctx.add(app);
    app->add_option("--model", model, "model JSON; adds the per-impression test log-likelihood");
    app->add_option("--bootstrap", folds, "number of folds (0 disables)")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "fold assignment seed");
    app->add_option("--weighting", weighting, "SAUC weighting: two-sided | one-sided");
    app->add_option("--out", out, "output report JSON");
    app->add_option("--samples-out", samples_out, "per-sample TSV (user, item, label, reward, score)");
  }

  Measures measure(const std::vector<TestSample>& samples, const std::map<std::string, double>& score_map,
                   const PosteriorModel* pm, const Dataset& test_ds, SaucWeighting w) const {
    Measures m;
    m.sauc = sauc(samples, score_map, w);
    m.auc = auc(samples, score_map);
    if (pm != nullptr) m.loglik = test_loglik_per_impression(*pm, test_ds);
    return m;
  }

  void run() const {
    require_file(scores, "scores");
    require_file(test, "test");
    require_file(train, "train");
    ctx.validate();
    if (!model.empty()) require_file(model, "model");
    if (out.empty()) throw InputError("missing --out");
    SaucWeighting w;
    if (weighting == "two-sided") {
      w = SaucWeighting::two_sided;
    } else if (weighting == "one-sided") {
      w = SaucWeighting::one_sided;
    } else {
      throw InputError("unknown weighting '" + weighting + "' (valid: two-sided, one-sided)");
    }

    std::map<std::string, double> score_map;
    for (auto& [id, s] : parse_scores(read_file(scores), scores)) score_map[id] = s;
    const Dataset train_ds = ctx.dataset(load_interactions(train));
    const Dataset test_ds = ctx.dataset(load_interactions(test));
    const std::vector<TestSample> samples = make_test_samples(test_ds, train_ds);
    std::optional<PosteriorModel> pm;
    if (!model.empty()) pm = load_model(model);

    const Measures full = measure(samples, score_map, pm ? &*pm : nullptr, test_ds, w);
    json j{{"sauc", full.sauc}, {"auc", full.auc}, {"weighting", weighting}, {"test_samples", samples.size()}};
    if (full.loglik) j["test_loglik_per_impression"] = *full.loglik;

    if (folds > 0) {
      // Disjoint folds from a seeded permutation of the test samples.
      std::vector<std::size_t> perm(samples.size());
      std::iota(perm.begin(), perm.end(), std::size_t{0});
      std::mt19937_64 rng(seed);
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[std::uniform_int_distribution<std::size_t>(0, i - 1)(rng)]);
      }
      std::vector<double> s_vals, a_vals, l_vals;
      for (int f = 0; f < folds; ++f) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < perm.size(); ++i) {
          if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f) members.push_back(perm[i]);
        }
        std::sort(members.begin(), members.end());
        std::vector<TestSample> sub;
        std::vector<InteractionRecord> recs;
        std::vector<SparseVector> ctxs;
        for (std::size_t i : members) {
          sub.push_back(samples[i]);
          recs.push_back(test_ds.records[i]);
          ctxs.push_back(test_ds.context(i));
        }
        const Dataset sub_ds = make_dataset(test_ds.dim, std::move(recs), ctxs);
        Measures m;
        try {
          m = measure(sub, score_map, pm ? &*pm : nullptr, sub_ds, w);
        } catch (const InputError& e) {
          throw InputError("fold " + std::to_string(f) + ": " + e.what());
        }
        s_vals.push_back(m.sauc);
        a_vals.push_back(m.auc);
        if (m.loglik) l_vals.push_back(*m.loglik);
      }
      auto summary = [](const std::vector<double>& v) {
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        return json{{"mean", mean}, {"sd", sd}, {"folds", v}};
      };
      json b{{"folds", folds}, {"seed", seed}, {"sauc", summary(s_vals)}, {"auc", summary(a_vals)}};
      if (!l_vals.empty()) b["test_loglik_per_impression"] = summary(l_vals);
      j["bootstrap"] = b;
    }
    write_file_atomic(out, j.dump(2) + "\n");

    if (!samples_out.empty()) {
      std::ostringstream t;
      t << "user_id\titem_id\tlabel\treward\tscore\n";
      for (const auto& s : samples) {
        t << s.user_id << '\t' << s.item_id << '\t' << (s.label ? 1 : 0) << '\t' << fmt(s.reward) << '\t'
          << fmt(score_map.at(pair_id(s.user_id, s.item_id))) << '\n';
      }
      write_file_atomic(samples_out, t.str());
    }
  }
};

// Turns a flat JSON object into `--key value` arguments placed before the
// command-line flags, so that flags given explicitly win (last value taken).
std::vector<std::string> config_arguments(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (!j.is_object()) throw InputError(path + ": config must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : j.items()) {
    if (key == "config") throw InputError(path + ": nested config is not supported");
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw InputError(path + ": value of '" + key + "' must be a string, number or boolean");
    }
  }
  return args;
}

std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::string config;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config.empty()) return rest;
  require_file(config, "config");
  // Insert after the program name and subcommand.
  std::vector<std::string> out(rest.begin(), rest.begin() + std::min<std::size_t>(2, rest.size()));
  const auto extra = config_arguments(config);
  out.insert(out.end(), extra.begin(), extra.end());
  out.insert(out.end(), rest.begin() + std::min<std::size_t>(2, rest.size()), rest.end());
  return out;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware Beta-binomial ranking"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  int threads = 0;
  std::string config_unused;

  ClusterCmd cluster;
  SynthCmd synth;
  FeaturizeCmd featurize;
  TrainCmd train;
  ScoreCmd score;
  EvalCmd eval;
  std::vector<std::pair<CLI::App*, std::function<void()>>> commands;
  auto add = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--threads", threads, "worker threads (default: UNCERTAIN_RANK_THREADS or all cores)");
    sub->add_option("--config", config_unused, "JSON file of default flag values");
    cmd.add(sub);
    commands.emplace_back(sub, [&cmd] { cmd.run(); });
  };
  add("cluster", "spherical k-means over user histories", cluster);
  add("synth", "generate a synthetic dataset with known coefficients", synth);
  add("featurize", "write block-expanded context vectors", featurize);
  add("train", "fit a model with empirical Bayes", train);
  add("score", "rank (user, item) pairs by an uncertainty-aware measure", score);
  add("eval", "SAUC, AUC and test log-likelihood", eval);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::vector<char*> cargs;
    for (auto& a : args) cargs.push_back(a.data());
    try {
      app.parse(static_cast<int>(cargs.size()), cargs.data());
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kInput;
    }
    parallel::set_threads(threads);
    for (auto& [sub, run] : commands) {
      if (sub->parsed()) run();
    }
    return kOk;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const DomainError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kNumeric;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInput;
  }
}
