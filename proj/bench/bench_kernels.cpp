// Serial reference loops against the OpenMP kernels.
//
//   bench_kernels --benchmark_filter=Multiply
//
// Thread count follows UNCERTAIN_RANK_THREADS / OMP_NUM_THREADS.

#include "urank/kernels.hpp"
#include "urank/objective.hpp"
#include "urank/synthesis.hpp"

#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

namespace {

using namespace urank;

SparseDesign make_design(std::size_t rows, Index cols, std::size_t nnz) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<Index> col(0, cols - 1);
  std::normal_distribution<double> normal;
  std::vector<SparseVector> r;
  r.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<Index> idx;
    while (idx.size() < nnz) {
      const Index c = col(rng);
      if (std::find(idx.begin(), idx.end(), c) == idx.end()) idx.push_back(c);
    }
    std::sort(idx.begin(), idx.end());
    std::vector<double> val(nnz);
    for (auto& v : val) v = normal(rng);
    r.emplace_back(cols, std::move(idx), std::move(val));
  }
  return SparseDesign(cols, r);
}

const SparseDesign& design() {
  static const SparseDesign x = make_design(200000, 4096, 16);
  return x;
}

template <bool Serial>
void Multiply(benchmark::State& state) {
  const auto& x = design();
  const Eigen::VectorXd w = Eigen::VectorXd::Random(x.cols());
  for (auto _ : state) {
    Eigen::VectorXd y = Serial ? kernels::serial::multiply(x, w) : kernels::multiply(x, w);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.nnz()));
}

template <bool Serial>
void MultiplyTranspose(benchmark::State& state) {
  const auto& x = design();
  const Eigen::VectorXd g = Eigen::VectorXd::Random(static_cast<Eigen::Index>(x.rows()));
  const std::span<const double> gs(g.data(), x.rows());
  for (auto _ : state) {
    Eigen::VectorXd y = Serial ? kernels::serial::multiply_transpose(x, gs) : kernels::multiply_transpose(x, gs);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.nnz()));
}

template <bool Serial>
void GramApply(benchmark::State& state) {
  const auto& x = design();
  const Eigen::MatrixXd q = Eigen::MatrixXd::Random(x.cols(), state.range(0));
  for (auto _ : state) {
    Eigen::MatrixXd y = Serial ? kernels::serial::gram_apply(x, q) : kernels::gram_apply(x, q);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(x.nnz()) * state.range(0));
}

template <bool Serial>
void Sum(benchmark::State& state) {
  std::vector<double> v(4000000);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (auto& e : v) e = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(Serial ? kernels::serial::sum(v) : kernels::sum(v));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(v.size()));
}

template <bool Serial>
void ObjectiveGradient(benchmark::State& state) {
  static const Dataset data = [] {
    SynthesisSpec s;
    s.d0 = 32;
    s.clusters = 16;
    s.users = 5000;
    s.items = 500;
    s.pairs_per_user = 20;
    s.test_pairs_per_user = 0;
    s.impressions = {CountDistribution::Kind::poisson, 20.0};
    s.test_impressions = {CountDistribution::Kind::fixed, 1.0};
    s.item_nnz = 4;
    s.beta_mean = 0.0;
    s.beta_sd = 1.0;
    s.rho_mean = 1.0;
    s.rho_sd = 1.0;
    s.history_items = 10;
    return synthesize_dataset(s, 1).train;
  }();
  const Objective obj(data, Likelihood::beta_binomial, false, Serial ? Execution::serial : Execution::parallel);
  const Eigen::VectorXd w = 0.1 * Eigen::VectorXd::Random(obj.parameter_size());
  const std::vector<double> c{1.0, 1.0};
  Eigen::VectorXd g;
  for (auto _ : state) benchmark::DoNotOptimize(obj.evaluate(w, c, &g));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}

BENCHMARK(Multiply<true>)->Name("Multiply/serial")->UseRealTime();
BENCHMARK(Multiply<false>)->Name("Multiply/omp")->UseRealTime();
BENCHMARK(MultiplyTranspose<true>)->Name("MultiplyTranspose/serial")->UseRealTime();
BENCHMARK(MultiplyTranspose<false>)->Name("MultiplyTranspose/omp")->UseRealTime();
BENCHMARK(GramApply<true>)->Name("GramApply/serial")->Arg(32)->UseRealTime();
BENCHMARK(GramApply<false>)->Name("GramApply/omp")->Arg(32)->UseRealTime();
BENCHMARK(Sum<true>)->Name("Sum/serial")->UseRealTime();
BENCHMARK(Sum<false>)->Name("Sum/omp")->UseRealTime();
BENCHMARK(ObjectiveGradient<true>)->Name("ObjectiveGradient/serial")->UseRealTime();
BENCHMARK(ObjectiveGradient<false>)->Name("ObjectiveGradient/omp")->UseRealTime();

} // namespace

BENCHMARK_MAIN();
