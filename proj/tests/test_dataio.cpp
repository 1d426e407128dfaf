#include "support.hpp"

#include "urank/clustering.hpp"
#include "urank/dataset.hpp"
#include "urank/errors.hpp"
#include "urank/features.hpp"
#include "urank/model.hpp"
#include "urank/synthesis.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

using namespace urank;
using urank::testing::TempDir;
using urank::testing::write_text;

namespace {

SynthesisSpec small_spec() {
  SynthesisSpec s;
  s.d0 = 4;
  s.clusters = 2;
  s.users = 30;
  s.items = 20;
  s.pairs_per_user = 5;
  s.test_pairs_per_user = 2;
  s.impressions = {CountDistribution::Kind::poisson, 8.0};
  s.test_impressions = {CountDistribution::Kind::fixed, 1.0};
  s.item_nnz = 2;
  s.beta_mean = 0.0;
  s.beta_sd = 1.0;
  s.rho_mean = 1.0;
  s.rho_sd = 0.5;
  s.history_items = 4;
  return s;
}

std::string contains_message(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

} // namespace

TEST_CASE("SparseVector invariants") {
  const SparseVector v(5, {1, 3}, {0.5, -2.0});
  CHECK(v.nnz() == 2);
  CHECK(v.squared_norm() == doctest::Approx(4.25));
  CHECK_THROWS_AS(SparseVector(5, {3, 1}, {1.0, 1.0}), InputError);
  CHECK_THROWS_AS(SparseVector(5, {1, 1}, {1.0, 1.0}), InputError);
  CHECK_THROWS_AS(SparseVector(5, {1}, {0.0}), InputError);
  CHECK_THROWS_AS(SparseVector(5, {5}, {1.0}), InputError);
  CHECK_THROWS_AS(SparseVector(5, {1}, {std::nan("")}), InputError);
  const auto w = SparseVector::from_pairs(5, {{3, -2.0}, {0, 0.0}, {1, 0.5}});
  CHECK(w == v);
  CHECK_THROWS_AS(SparseVector::from_pairs(5, {{1, 1.0}, {1, 2.0}}), InputError);
}

TEST_CASE("SparseDesign keeps rows and columns consistent") {
  std::mt19937_64 rng(3);
  std::vector<SparseVector> rows;
  for (int r = 0; r < 40; ++r) rows.push_back(urank::testing::random_sparse(rng, 9, 3));
  const SparseDesign x(9, rows);
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(40, 9);
  for (std::size_t r = 0; r < rows.size(); ++r) dense.row(static_cast<Eigen::Index>(r)) = rows[r].to_dense();
  for (Index c = 0; c < 9; ++c) {
    const auto ids = x.col_rows(c);
    const auto vals = x.col_values(c);
    double total = 0.0;
    for (std::size_t t = 0; t < ids.size(); ++t) {
      CHECK(vals[t] == dense(ids[t], c));
      if (t > 0) CHECK(ids[t - 1] < ids[t]);
      total += std::abs(vals[t]);
    }
    CHECK(total == doctest::Approx(dense.col(c).cwiseAbs().sum()));
  }
  CHECK(x.row(7) == rows[7]);
}

TEST_CASE("load_interactions parses records") {
  TempDir dir;
  write_text(dir / "a.tsv", "user_id\titem_id\timpressions\tclicks\nu1\ti1\t5\t2\n");
  const auto recs = load_interactions(dir / "a.tsv");
  REQUIRE(recs.size() == 1);
  CHECK(recs[0] == InteractionRecord{"u1", "i1", 5, 2});
}

TEST_CASE("load_interactions rejects clicks above impressions and names the record") {
  TempDir dir;
  write_text(dir / "a.tsv", "user_id\titem_id\timpressions\tclicks\nu1\ti1\t2\t5\n");
  CHECK_THROWS_AS(load_interactions(dir / "a.tsv"), InputError);
  const auto msg = contains_message([&] { load_interactions(dir / "a.tsv"); });
  CHECK(msg.find("u1") != std::string::npos);
  CHECK(msg.find(":2:") != std::string::npos);
}

TEST_CASE("load_interactions reports line and column of parse errors") {
  TempDir dir;
  write_text(dir / "a.tsv", "user_id\titem_id\timpressions\tclicks\nu1\ti1\t5\t2\nu2\ti2\tfive\t1\n");
  const auto msg = contains_message([&] { load_interactions(dir / "a.tsv"); });
  CHECK(msg.find(":3:3") != std::string::npos);
}

TEST_CASE("empty file after header gives an empty dataset") {
  TempDir dir;
  write_text(dir / "a.tsv", "user_id\titem_id\timpressions\tclicks\n");
  const auto recs = load_interactions(dir / "a.tsv");
  CHECK(recs.empty());
  const Dataset d = make_dataset(4, recs, {});
  CHECK(d.size() == 0);
  CHECK(d.total_impressions() == 0);
}

TEST_CASE("interaction, jsonl and cluster files round-trip") {
  TempDir dir;
  std::vector<InteractionRecord> recs{{"u1", "i1", 5, 2}, {"u2", "i9", 0, 0}, {"u1", "i3", 7, 7}};
  write_interactions(dir / "r.tsv", recs);
  CHECK(load_interactions(dir / "r.tsv") == recs);

  std::vector<std::pair<std::string, SparseVector>> rows{{"i1", SparseVector(6, {0, 4}, {0.6, 0.8})},
                                                        {"i2", SparseVector(6, {5}, {1.0})}};
  write_sparse_jsonl(dir / "items.jsonl", "item_id", rows);
  CHECK(load_sparse_jsonl(dir / "items.jsonl", "item_id") == rows);

  const std::map<std::string, int> clusters{{"u1", 0}, {"u2", 3}};
  write_clusters(dir / "c.tsv", clusters);
  CHECK(load_clusters(dir / "c.tsv") == clusters);
}

TEST_CASE("load_sparse_jsonl rejects malformed rows with the line number") {
  TempDir dir;
  write_text(dir / "x.jsonl", "{\"item_id\": \"i1\", \"dim\": 3, \"indices\": [0], \"values\": [1.0]}\n"
                              "{\"item_id\": \"i2\", \"dim\": 3, \"indices\": [3], \"values\": [1.0]}\n");
  const auto msg = contains_message([&] { load_sparse_jsonl(dir / "x.jsonl", "item_id"); });
  CHECK(msg.find(":2:") != std::string::npos);
}

TEST_CASE("write_file_atomic leaves no temporary behind") {
  TempDir dir;
  write_file_atomic(dir / "out.txt", "hello");
  CHECK(read_file(dir / "out.txt") == "hello");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir.path())) ++entries;
  CHECK(entries == 1);
}

TEST_CASE("assemble_context block placement") {
  FeatureConfig cfg;
  cfg.d0 = 2;
  cfg.clusters = 2;
  const SparseVector item(2, {0, 1}, {0.6, 0.8});
  const auto x1 = assemble_context(item, 1, cfg);
  CHECK(x1.dim() == 6);
  CHECK(x1 == SparseVector(6, {0, 1, 4, 5}, {0.6, 0.8, 0.6, 0.8}));
  const auto x0 = assemble_context(item, 0, cfg);
  CHECK(x0 == SparseVector(6, {0, 1, 2, 3}, {0.6, 0.8, 0.6, 0.8}));
  CHECK_THROWS_AS(assemble_context(item, 2, cfg), InputError);
  CHECK_THROWS_AS(assemble_context(SparseVector(2, {0}, {0.5}), 0, cfg), InputError);
}

TEST_CASE("assemble_context has norm sqrt(2) and is injective") {
  std::mt19937_64 rng(5);
  FeatureConfig cfg;
  cfg.d0 = 6;
  cfg.clusters = 4;
  std::vector<std::pair<SparseVector, int>> inputs;
  std::vector<SparseVector> outputs;
  for (int t = 0; t < 60; ++t) {
    SparseVector v = urank::testing::random_sparse(rng, 6, 1 + t % 3);
    v = v.scaled(1.0 / std::sqrt(v.squared_norm()));
    const int c = t % 4;
    const auto x = assemble_context(v, c, cfg);
    CHECK(std::sqrt(x.squared_norm()) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    inputs.emplace_back(v, c);
    outputs.push_back(x);
  }
  for (std::size_t a = 0; a < outputs.size(); ++a) {
    for (std::size_t b = a + 1; b < outputs.size(); ++b) {
      if (outputs[a] == outputs[b]) CHECK(inputs[a] == inputs[b]);
    }
  }
}

TEST_CASE("build_dataset reports missing items and clusters") {
  FeatureConfig cfg;
  cfg.d0 = 2;
  cfg.clusters = 1;
  cfg.cluster_of = {{"u1", 0}};
  const auto items = index_items({{"i1", SparseVector(2, {0}, {1.0})}});
  const auto d = build_dataset({{"u1", "i1", 3, 1}}, items, cfg);
  CHECK(d.size() == 1);
  CHECK(d.context(0) == SparseVector(4, {0, 2}, {1.0, 1.0}));
  CHECK_THROWS_AS(build_dataset({{"u1", "i2", 3, 1}}, items, cfg), InputError);
  CHECK_THROWS_AS(build_dataset({{"u2", "i1", 3, 1}}, items, cfg), InputError);
}

TEST_CASE("spherical_kmeans degenerate inputs") {
  std::vector<UserHistory> same;
  for (int u = 0; u < 5; ++u) same.push_back(make_user_history("u" + std::to_string(u), 4, {0, 2}));
  const auto two = spherical_kmeans(same, 2, 1);
  std::set<int> labels;
  for (const auto& [_, l] : two.labels) labels.insert(l);
  CHECK(labels.size() == 1);

  const auto one = spherical_kmeans(same, 1, 1);
  for (const auto& [_, l] : one.labels) CHECK(l == 0);

  CHECK_THROWS_AS(spherical_kmeans({}, 1, 0), InputError);
  CHECK_THROWS_AS(spherical_kmeans(same, 6, 0), InputError);
}

TEST_CASE("spherical_kmeans separates disjoint supports for every seed") {
  std::vector<UserHistory> h{make_user_history("a1", 6, {0, 1}),    make_user_history("a2", 6, {1, 2}),
                             make_user_history("a3", 6, {0, 1, 2}), make_user_history("b1", 6, {3}),
                             make_user_history("b2", 6, {4, 5}),    make_user_history("b3", 6, {3, 5})};
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto res = spherical_kmeans(h, 2, seed);
    const int a = res.labels.at("a1");
    const int b = res.labels.at("b1");
    CHECK(a != b);
    for (const auto& [user, label] : res.labels) CHECK(label == (user[0] == 'a' ? a : b));
  }
}

TEST_CASE("spherical_kmeans objective is non-decreasing") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<UserHistory> h;
    for (int u = 0; u < 80; ++u) {
      std::vector<Index> items;
      for (int t = 0; t < 5; ++t) items.push_back(std::uniform_int_distribution<Index>(0, 29)(rng));
      h.push_back(make_user_history("u" + std::to_string(u), 30, items));
    }
    const auto res = spherical_kmeans(h, 6, static_cast<std::uint64_t>(trial));
    for (std::size_t t = 1; t < res.objective_trace.size(); ++t) {
      CHECK(res.objective_trace[t] >= res.objective_trace[t - 1] - 1e-12);
    }
  }
}

TEST_CASE("synthesize_dataset respects counts and is deterministic") {
  const auto spec = small_spec();
  const auto a = synthesize_dataset(spec, 42);
  const auto b = synthesize_dataset(spec, 42);
  CHECK(a.train.records == b.train.records);
  CHECK(a.test.records == b.test.records);
  CHECK(a.truth.beta == b.truth.beta);
  CHECK(a.train.size() == static_cast<std::size_t>(spec.users * spec.pairs_per_user));
  CHECK(a.test.size() == static_cast<std::size_t>(spec.users * spec.test_pairs_per_user));
  for (const auto* d : {&a.train, &a.test}) {
    for (const auto& r : d->records) {
      CHECK(r.clicks >= 0);
      CHECK(r.clicks <= r.impressions);
    }
  }
  for (const auto& [_, v] : a.items) CHECK(v.squared_norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(synthesize_dataset(spec, 43).train.records != a.train.records);
}

TEST_CASE("synthesize_dataset with no impressions has no clicks") {
  auto spec = small_spec();
  spec.impressions = {CountDistribution::Kind::fixed, 0.0};
  const auto d = synthesize_dataset(spec, 1);
  for (const auto& r : d.train.records) CHECK(r.clicks == 0);
}

TEST_CASE("synthesize_dataset pooled click rate matches the Beta mean") {
  // d0 = 1 gives beta*^T x = 2 + 2 = 4 and rho*^T x = 3 + 3 = 6 for every context.
  SynthesisSpec s;
  s.d0 = 1;
  s.clusters = 2;
  s.users = 100;
  s.items = 10;
  s.pairs_per_user = 10;
  s.test_pairs_per_user = 0;
  s.impressions = {CountDistribution::Kind::fixed, 100.0};
  s.test_impressions = {CountDistribution::Kind::fixed, 1.0};
  s.item_nnz = 1;
  s.beta_mean = 2.0;
  s.beta_sd = 0.0;
  s.rho_mean = 3.0;
  s.rho_sd = 0.0;
  s.history_items = 2;
  const auto d = synthesize_dataset(s, 7);
  CHECK(d.train.total_impressions() == 100000);
  for (std::size_t r = 0; r < d.train.size(); ++r) {
    CHECK(d.train.context(r).dot(d.truth.beta) == doctest::Approx(4.0));
    CHECK(d.train.context(r).dot(d.truth.rho) == doctest::Approx(6.0));
  }
  std::int64_t clicks = 0;
  for (const auto& r : d.train.records) clicks += r.clicks;
  const double rate = static_cast<double>(clicks) / 1e5;
  CHECK(std::abs(rate - sigmoid(4.0)) <= 0.02);
}

TEST_CASE("sample_beta matches the Beta mean for tiny and large shapes") {
  std::mt19937_64 rng(17);
  for (auto [a1, a2] : {std::pair{0.01, 0.03}, std::pair{2.0, 5.0}, std::pair{400.0, 100.0}}) {
    double total = 0.0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) {
      const double t = sample_beta(rng, a1, a2);
      CHECK(t >= 0.0);
      CHECK(t <= 1.0);
      total += t;
    }
    const double mean = a1 / (a1 + a2);
    const double sd = std::sqrt(mean * (1 - mean) / (a1 + a2 + 1) / n);
    CHECK(std::abs(total / n - mean) <= 5.0 * sd);
  }
}

TEST_CASE("parse_synthesis_spec requires every field") {
  const std::string full = R"({"d0": 2, "clusters": 2, "users": 4, "items": 5, "pairs_per_user": 2,
    "test_pairs_per_user": 1, "impressions": {"kind": "poisson", "mean": 3}, "test_impressions": {"kind": "fixed", "mean": 1},
    "item_nnz": 1, "beta_mean": 0, "beta_sd": 1, "rho_mean": 0, "rho_sd": 1, "history_items": 2})";
  const auto s = parse_synthesis_spec(full, "spec");
  CHECK(s.users == 4);
  CHECK(s.impressions.kind == CountDistribution::Kind::poisson);
  std::string missing = full;
  missing.erase(missing.find("\"rho_sd\": 1, "), 13);
  const auto msg = contains_message([&] { parse_synthesis_spec(missing, "spec"); });
  CHECK(msg.find("rho_sd") != std::string::npos);
}
