#pragma once

#include "urank/dataset.hpp"
#include "urank/sparse.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <string>
#include <vector>

namespace urank::testing {

inline SparseVector random_sparse(std::mt19937_64& rng, Index dim, int nnz, double scale = 1.0) {
  std::vector<std::pair<Index, double>> entries;
  std::vector<Index> pool(dim);
  for (Index i = 0; i < dim; ++i) pool[i] = i;
  std::shuffle(pool.begin(), pool.end(), rng);
  std::normal_distribution<double> normal(0.0, scale);
  for (int i = 0; i < nnz && i < static_cast<int>(dim); ++i) {
    double v = normal(rng);
    if (v == 0.0) v = scale;
    entries.emplace_back(pool[static_cast<std::size_t>(i)], v);
  }
  return SparseVector::from_pairs(dim, std::move(entries));
}

inline Eigen::VectorXd random_dense(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

/// Random records with contexts of the given dimension; n in [0, max_n].
inline Dataset random_dataset(std::mt19937_64& rng, Index dim, std::size_t records, int max_n, int nnz = 3,
                              double scale = 0.5) {
  std::vector<InteractionRecord> recs;
  std::vector<SparseVector> ctx;
  std::uniform_int_distribution<int> count(0, max_n);
  for (std::size_t r = 0; r < records; ++r) {
    const int n = count(rng);
    const int v = std::uniform_int_distribution<int>(0, n)(rng);
    recs.push_back({"u" + std::to_string(r % 7), "i" + std::to_string(r), n, v});
    ctx.push_back(random_sparse(rng, dim, nnz, scale));
  }
  return make_dataset(dim, std::move(recs), ctx);
}

inline Dataset subset(const Dataset& d, const std::vector<std::size_t>& order) {
  std::vector<InteractionRecord> recs;
  std::vector<SparseVector> ctx;
  for (std::size_t i : order) {
    recs.push_back(d.records[i]);
    ctx.push_back(d.context(i));
  }
  return make_dataset(d.dim, std::move(recs), ctx);
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

} // namespace urank::testing

#include <unistd.h>

#include <filesystem>
#include <fstream>

namespace urank::testing {

/// Scratch directory removed on scope exit.
class TempDir {
public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("urank-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
  std::filesystem::path path_;
};

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

} // namespace urank::testing

namespace urank::testing {

/// -ln BB(v; n, exp(zeta + eta), exp(eta)) in long double through lgammal;
/// an oracle independent of the library's polygamma and log-gamma code.
inline long double neg_log_bb_oracle(std::int64_t v, std::int64_t n, long double zeta, long double eta) {
  const long double ap = std::exp(zeta + eta);
  const long double am = std::exp(eta);
  const long double al = ap + am;
  const auto lg = [](long double u) { return std::lgamma(u); };
  return -((lg(ap + v) - lg(ap)) + (lg(am + (n - v)) - lg(am)) - (lg(al + n) - lg(al)));
}

struct FiniteDifferences {
  double g_beta, g_rho, h_beta, h_beta_rho, h_rho;
};

inline FiniteDifferences finite_differences(std::int64_t v, std::int64_t n, double zeta, double eta) {
  const long double z = zeta;
  const long double e = eta;
  const auto f = [&](long double dz, long double de) { return neg_log_bb_oracle(v, n, z + dz, e + de); };
  const long double h1 = 1e-5L;
  const long double h2 = 1e-4L;
  FiniteDifferences d{};
  d.g_beta = static_cast<double>((f(h1, 0) - f(-h1, 0)) / (2 * h1));
  d.g_rho = static_cast<double>((f(0, h1) - f(0, -h1)) / (2 * h1));
  d.h_beta = static_cast<double>((f(h2, 0) - 2 * f(0, 0) + f(-h2, 0)) / (h2 * h2));
  d.h_rho = static_cast<double>((f(0, h2) - 2 * f(0, 0) + f(0, -h2)) / (h2 * h2));
  d.h_beta_rho = static_cast<double>((f(h2, h2) - f(h2, -h2) - f(-h2, h2) + f(-h2, -h2)) / (4 * h2 * h2));
  return d;
}

inline bool close_rel(double a, double b, double rel, double abs_floor = 1e-9) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

} // namespace urank::testing

#include "urank/posterior.hpp"

namespace urank::testing {

/// Block with random orthonormal V (d x k), decreasing lambda and random c.
inline LowRankGaussianBlock random_block(std::mt19937_64& rng, int d, int k, double mean_scale = 1.0) {
  const Eigen::MatrixXd g = Eigen::MatrixXd::NullaryExpr(d, d, [&] { return std::normal_distribution<double>()(rng); });
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  LowRankGaussianBlock b;
  b.mean = random_dense(rng, d, mean_scale);
  b.V = (qr.householderQ() * Eigen::MatrixXd::Identity(d, d)).leftCols(k);
  std::vector<double> lam(static_cast<std::size_t>(k));
  std::uniform_real_distribution<double> u(std::log(1e-2), std::log(1e2));
  for (auto& l : lam) l = std::exp(u(rng));
  std::sort(lam.rbegin(), lam.rend());
  b.lambda = Eigen::Map<Eigen::VectorXd>(lam.data(), k);
  b.c = std::exp(u(rng));
  return b;
}

inline PosteriorModel random_model(std::mt19937_64& rng, ModelKind kind, int d, int k) {
  PosteriorModel m;
  m.kind = kind;
  m.dim = static_cast<Index>(d);
  m.rank = k;
  m.beta_block = random_block(rng, d, k);
  const Dispersion disp = dispersion_of(kind);
  const int rd = disp == Dispersion::contextual ? d : disp == Dispersion::scalar ? 1 : 0;
  m.rho_block = random_block(rng, rd, std::min(k, rd));
  return m;
}

} // namespace urank::testing
