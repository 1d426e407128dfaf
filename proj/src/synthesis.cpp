#include "urank/synthesis.hpp"

#include "urank/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace urank {
namespace {

using nlohmann::json;

double log_gamma_variate(std::mt19937_64& rng, double shape) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    double v = g(rng);
    while (v == 0.0) v = g(rng);
    return std::log(v);
  }
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  while (u == 0.0) u = unif(rng);
  return log_gamma_variate(rng, shape + 1.0) + std::log(u) / shape;
}

std::int64_t draw_count(std::mt19937_64& rng, const CountDistribution& dist) {
  switch (dist.kind) {
  case CountDistribution::Kind::fixed: return static_cast<std::int64_t>(std::llround(dist.mean));
  case CountDistribution::Kind::poisson:
    return dist.mean == 0.0 ? 0 : std::poisson_distribution<std::int64_t>(dist.mean)(rng);
  case CountDistribution::Kind::geometric:
    return std::geometric_distribution<std::int64_t>(1.0 / (1.0 + dist.mean))(rng);
  }
  return 0;
}

CountDistribution parse_count(const json& j, const std::string& where) {
  CountDistribution d;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "poisson") {
    d.kind = CountDistribution::Kind::poisson;
  } else if (kind == "geometric") {
    d.kind = CountDistribution::Kind::geometric;
  } else if (kind == "fixed") {
    d.kind = CountDistribution::Kind::fixed;
  } else {
    throw InputError(where + ": unknown distribution kind '" + kind + "' (valid: poisson, geometric, fixed)");
  }
  d.mean = j.at("mean").get<double>();
  return d;
}

// k distinct values from [0, n) in draw order (partial Fisher-Yates).
std::vector<int> sample_distinct(std::mt19937_64& rng, int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

std::string numbered(char prefix, int i) {
  std::string digits = std::to_string(i);
  return std::string(1, prefix) + std::string(digits.size() < 5 ? 5 - digits.size() : 0, '0') + digits;
}

} // namespace

double sample_beta(std::mt19937_64& rng, double a1, double a2) {
  const double l1 = log_gamma_variate(rng, a1);
  const double l2 = log_gamma_variate(rng, a2);
  return 1.0 / (1.0 + std::exp(l2 - l1));
}

void SynthesisSpec::validate() const {
  if (d0 < 1) throw InputError("synthesis: d0 must be positive");
  if (clusters < 1) throw InputError("synthesis: clusters must be positive");
  if (users < clusters) throw InputError("synthesis: need at least one user per cluster");
  if (items < 1) throw InputError("synthesis: items must be positive");
  if (pairs_per_user < 0 || test_pairs_per_user < 0 || pairs_per_user + test_pairs_per_user > items) {
    throw InputError("synthesis: pairs per user must be non-negative and fit in the catalogue");
  }
  for (const auto* d : {&impressions, &test_impressions}) {
    if (!(d->mean >= 0.0) || !std::isfinite(d->mean)) throw InputError("synthesis: impression mean must be >= 0");
  }
  if (item_nnz < 1 || static_cast<Index>(item_nnz) > d0) throw InputError("synthesis: item_nnz must lie in [1, d0]");
  if (!(beta_sd >= 0.0) || !(rho_sd >= 0.0)) throw InputError("synthesis: standard deviations must be >= 0");
  if (!std::isfinite(beta_mean) || !std::isfinite(rho_mean)) throw InputError("synthesis: means must be finite");
  if (history_items < 1 || history_items > items) throw InputError("synthesis: history_items must lie in [1, items]");
}

SynthesisSpec parse_synthesis_spec(const std::string& json_text, const std::string& source) {
  SynthesisSpec s;
  try {
    const json j = json::parse(json_text);
    static const char* const required[] = {"d0",          "clusters",  "users",     "items",   "pairs_per_user",
                                           "test_pairs_per_user",      "impressions", "test_impressions",
                                           "item_nnz",    "beta_mean", "beta_sd",   "rho_mean", "rho_sd",
                                           "history_items"};
    for (const char* key : required) {
      if (!j.contains(key)) throw InputError(source + ": missing field '" + key + "'");
    }
    s.d0 = j.at("d0").get<Index>();
    s.clusters = j.at("clusters").get<int>();
    s.users = j.at("users").get<int>();
    s.items = j.at("items").get<int>();
    s.pairs_per_user = j.at("pairs_per_user").get<int>();
    s.test_pairs_per_user = j.at("test_pairs_per_user").get<int>();
    s.impressions = parse_count(j.at("impressions"), source);
    s.test_impressions = parse_count(j.at("test_impressions"), source);
    s.item_nnz = j.at("item_nnz").get<int>();
    s.beta_mean = j.at("beta_mean").get<double>();
    s.beta_sd = j.at("beta_sd").get<double>();
    s.rho_mean = j.at("rho_mean").get<double>();
    s.rho_sd = j.at("rho_sd").get<double>();
    s.history_items = j.at("history_items").get<int>();
  } catch (const json::exception& e) {
    throw InputError(source + ": " + e.what());
  }
  s.validate();
  return s;
}

SynthesisSpec load_synthesis_spec(const std::filesystem::path& path) {
  return parse_synthesis_spec(read_file(path), path.string());
}

SyntheticData synthesize_dataset(const SynthesisSpec& spec, std::uint64_t seed) {
  spec.validate();
  std::mt19937_64 rng(seed);
  SyntheticData out;
  out.config.d0 = spec.d0;
  out.config.clusters = spec.clusters;
  const Index d = out.config.expanded_dim();

  std::normal_distribution<double> normal;
  out.truth = CoefficientPair::zeros(d);
  for (Index i = 0; i < d; ++i) out.truth.beta[i] = spec.beta_mean + spec.beta_sd * normal(rng);
  for (Index i = 0; i < d; ++i) out.truth.rho[i] = spec.rho_mean + spec.rho_sd * normal(rng);

  for (int j = 0; j < spec.items; ++j) {
    std::vector<std::pair<Index, double>> entries;
    double norm_sq = 0.0;
    for (int idx : sample_distinct(rng, static_cast<int>(spec.d0), spec.item_nnz)) {
      double v = std::abs(normal(rng));
      while (v == 0.0) v = std::abs(normal(rng));
      entries.emplace_back(static_cast<Index>(idx), v);
      norm_sq += v * v;
    }
    const double scale = 1.0 / std::sqrt(norm_sq);
    for (auto& e : entries) e.second *= scale;
    out.items.emplace_back(numbered('i', j), SparseVector::from_pairs(spec.d0, std::move(entries)));
  }
  const ItemFeatures item_index = index_items(out.items);

  // Cluster c prefers items j with j mod K == c; histories mostly draw from there.
  std::uniform_int_distribution<int> pick_cluster(0, spec.clusters - 1);
  std::bernoulli_distribution off_preference(0.1);
  std::vector<int> cluster_of(static_cast<std::size_t>(spec.users));
  for (int u = 0; u < spec.users; ++u) {
    const int c = u < spec.clusters ? u : pick_cluster(rng);
    cluster_of[static_cast<std::size_t>(u)] = c;
    const std::string uid = numbered('u', u);
    out.config.cluster_of[uid] = c;

    std::vector<int> preferred;
    for (int j = c % spec.items; j < spec.items; j += spec.clusters) preferred.push_back(j);
    std::vector<Index> hist;
    for (int h = 0; h < spec.history_items; ++h) {
      if (off_preference(rng) || preferred.empty()) {
        hist.push_back(static_cast<Index>(std::uniform_int_distribution<int>(0, spec.items - 1)(rng)));
      } else {
        std::uniform_int_distribution<std::size_t> p(0, preferred.size() - 1);
        hist.push_back(static_cast<Index>(preferred[p(rng)]));
      }
    }
    out.histories.push_back(make_user_history(uid, static_cast<Index>(spec.items), std::move(hist)));
  }

  std::vector<InteractionRecord> train;
  std::vector<InteractionRecord> test;
  std::vector<SparseVector> train_ctx;
  std::vector<SparseVector> test_ctx;
  for (int u = 0; u < spec.users; ++u) {
    const std::string uid = numbered('u', u);
    const int c = cluster_of[static_cast<std::size_t>(u)];
    const auto chosen = sample_distinct(rng, spec.items, spec.pairs_per_user + spec.test_pairs_per_user);
    for (std::size_t t = 0; t < chosen.size(); ++t) {
      const bool is_test = t >= static_cast<std::size_t>(spec.pairs_per_user);
      const std::string& iid = out.items[static_cast<std::size_t>(chosen[t])].first;
      SparseVector x = assemble_context(item_index.at(iid), c, out.config);
      const AlphaTriple a = alphas(out.truth, x);
      const double theta = sample_beta(rng, a.alpha_plus, a.alpha_minus);
      const std::int64_t n = draw_count(rng, is_test ? spec.test_impressions : spec.impressions);
      const std::int64_t v = n == 0 ? 0 : std::binomial_distribution<std::int64_t>(n, theta)(rng);
      InteractionRecord rec{uid, iid, n, v};
      if (is_test) {
        test.push_back(std::move(rec));
        test_ctx.push_back(std::move(x));
      } else {
        train.push_back(std::move(rec));
        train_ctx.push_back(std::move(x));
      }
    }
  }
  out.train = make_dataset(d, std::move(train), train_ctx);
  out.test = make_dataset(d, std::move(test), test_ctx);
  return out;
}

} // namespace urank
