#include "urank/errors.hpp"
#include "urank/specfun.hpp"

#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

using namespace urank;
using namespace urank::specfun;

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

// Phi^{-1} by bisection on erfc; independent of the rational approximation.
double erf_bisection_quantile(double nu) {
  double lo = -10.0;
  double hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::numbers::sqrt2) < nu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// L-infinity star discrepancy of a 2-d point set (exact over the grid of point coordinates).
double star_discrepancy(const std::vector<std::array<double, 2>>& pts) {
  std::vector<double> xs{1.0};
  std::vector<double> ys{1.0};
  for (const auto& p : pts) {
    xs.push_back(p[0]);
    ys.push_back(p[1]);
  }
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(pts.size());
  double worst = 0.0;
  for (double x : xs) {
    for (double y : ys) {
      std::size_t open = 0;
      std::size_t closed = 0;
      for (const auto& p : pts) {
        if (p[0] < x && p[1] < y) ++open;
        if (p[0] <= x && p[1] <= y) ++closed;
      }
      worst = std::max({worst, x * y - static_cast<double>(open) / n, static_cast<double>(closed) / n - x * y});
    }
  }
  return worst;
}

} // namespace

TEST_CASE("log_gamma at known values") {
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(5.0) == doctest::Approx(std::log(24.0)).epsilon(1e-14));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.0), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
}

TEST_CASE("log_gamma matches boost over [1e-6, 1e12]") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 2000; ++i) {
    const double u = log_uniform(rng, 1e-6, 1e12);
    const double ref = boost::math::lgamma(u);
    CHECK(std::abs(log_gamma(u) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
  }
}

TEST_CASE("log_gamma recurrence") {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 1000; ++i) {
    const double u = log_uniform(rng, 1e-3, 1e9);
    CHECK(std::abs((log_gamma(u + 1.0) - log_gamma(u)) - std::log(u)) <= 1e-11 * std::max(1.0, std::abs(log_gamma(u))));
  }
}

TEST_CASE("digamma and trigamma match boost") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 2000; ++i) {
    const double u = log_uniform(rng, 1e-4, 1e8);
    const double d = boost::math::digamma(u);
    const double t = boost::math::trigamma(u);
    CHECK(std::abs(digamma(u) - d) <= 1e-13 * std::max(1.0, std::abs(d)));
    CHECK(std::abs(trigamma(u) - t) <= 1e-13 * std::max(1e-8, std::abs(t)));
  }
}

TEST_CASE("polygamma_diff examples") {
  CHECK(polygamma_diff(1.0, 2, PolygammaOrder::digamma) == 1.5);
  CHECK(polygamma_diff(3.7, 0, PolygammaOrder::digamma) == 0.0);
  CHECK(polygamma_diff(3.7, 0, PolygammaOrder::trigamma) == 0.0);
  CHECK(polygamma_diff(1.0, 1, PolygammaOrder::trigamma) == -1.0);
  CHECK_THROWS_AS(polygamma_diff(0.0, 1, PolygammaOrder::digamma), DomainError);
  CHECK_THROWS_AS(polygamma_diff(-2.0, 1, PolygammaOrder::trigamma), DomainError);
}

TEST_CASE("polygamma_diff matches long-double finite sums on both sides of the crossover") {
  std::mt19937_64 rng(14);
  for (int i = 0; i < 600; ++i) {
    const double a = log_uniform(rng, 1e-6, 1e6);
    const auto count = std::uniform_int_distribution<std::int64_t>(0, 3000)(rng);
    long double dsum = 0.0L;
    long double tsum = 0.0L;
    for (std::int64_t t = 0; t < count; ++t) {
      const long double x = static_cast<long double>(a) + static_cast<long double>(t);
      dsum += 1.0L / x;
      tsum -= 1.0L / (x * x);
    }
    const double d = polygamma_diff(a, count, PolygammaOrder::digamma);
    const double t = polygamma_diff(a, count, PolygammaOrder::trigamma);
    CHECK(std::abs(d - static_cast<double>(dsum)) <= 1e-12 * std::abs(static_cast<double>(dsum)) + 1e-300);
    CHECK(std::abs(t - static_cast<double>(tsum)) <= 1e-12 * std::abs(static_cast<double>(tsum)) + 1e-300);
  }
}

TEST_CASE("polygamma_diff telescopes") {
  std::mt19937_64 rng(15);
  for (int i = 0; i < 500; ++i) {
    const double a = log_uniform(rng, 1e-3, 1e4);
    const auto c1 = std::uniform_int_distribution<std::int64_t>(0, 200)(rng);
    const auto c2 = std::uniform_int_distribution<std::int64_t>(0, 200)(rng);
    for (auto order : {PolygammaOrder::digamma, PolygammaOrder::trigamma}) {
      const double whole = polygamma_diff(a, c1 + c2, order);
      const double parts = polygamma_diff(a, c1, order) + polygamma_diff(a + static_cast<double>(c1), c2, order);
      CHECK(std::abs(whole - parts) <= 1e-12 * std::max(1.0, std::abs(whole)));
    }
  }
}

TEST_CASE("log_gamma_ratio and log_beta match boost") {
  std::mt19937_64 rng(16);
  for (int i = 0; i < 500; ++i) {
    const double a = log_uniform(rng, 1e-4, 1e5);
    const auto count = std::uniform_int_distribution<std::int64_t>(0, 500)(rng);
    long double ref = 0.0L;
    for (std::int64_t t = 0; t < count; ++t) ref += std::log(static_cast<long double>(a) + static_cast<long double>(t));
    CHECK(std::abs(log_gamma_ratio(a, count) - static_cast<double>(ref)) <=
          1e-12 * std::max(1.0, std::abs(static_cast<double>(ref))));

    const double b = log_uniform(rng, 1e-3, 1e3);
    const double c = log_uniform(rng, 1e-3, 1e3);
    const double lb = std::log(boost::math::beta(b, c));
    CHECK(std::abs(log_beta(b, c) - lb) <= 1e-12 * std::max(1.0, std::abs(lb)));
  }
}

TEST_CASE("beta_cdf examples and boundary values") {
  CHECK(beta_cdf(0.25, 1, 1) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(beta_cdf(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(beta_cdf(0.3, 2, 1) == doctest::Approx(0.09).epsilon(1e-14));
  CHECK(beta_cdf(0.0, 0.3, 2.0) == 0.0);
  CHECK(beta_cdf(1.0, 0.3, 2.0) == 1.0);
  CHECK_THROWS_AS(beta_cdf(-0.1, 1, 1), DomainError);
  CHECK_THROWS_AS(beta_cdf(0.5, 0.0, 1), DomainError);
  CHECK_THROWS_AS(beta_cdf(0.5, 1, -1), DomainError);
}

TEST_CASE("beta_cdf matches boost ibeta and is monotone") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 3000; ++i) {
    const double a1 = log_uniform(rng, 0.01, 1e4);
    const double a2 = log_uniform(rng, 0.01, 1e4);
    const double th = unit(rng);
    CHECK(std::abs(beta_cdf(th, a1, a2) - boost::math::ibeta(a1, a2, th)) <= 1e-12);
  }
  for (int i = 0; i < 50; ++i) {
    const double a1 = log_uniform(rng, 0.05, 100);
    const double a2 = log_uniform(rng, 0.05, 100);
    double prev = 0.0;
    for (int g = 0; g <= 200; ++g) {
      const double v = beta_cdf(g / 200.0, a1, a2);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("beta_quantile examples") {
  CHECK(beta_quantile(0.25, 1, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(beta_quantile(0.5, 2, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(beta_quantile(0.09, 2, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(beta_quantile(0.0, 1, 1), DomainError);
  CHECK_THROWS_AS(beta_quantile(1.0, 1, 1), DomainError);
}

TEST_CASE("beta_quantile matches boost ibeta_inv and round-trips") {
  std::mt19937_64 rng(18);
  std::uniform_real_distribution<double> unit(0.001, 0.999);
  for (int i = 0; i < 2000; ++i) {
    const double a1 = log_uniform(rng, 0.01, 1e4);
    const double a2 = log_uniform(rng, 0.01, 1e4);
    const double nu = unit(rng);
    const double q = beta_quantile(nu, a1, a2);
    // Near theta = 1 the density can exceed 1e7 and one ulp of theta moves the
    // CDF by more than 1e-9; there the best double must bracket nu.
    const double below = beta_cdf(std::nextafter(q, 0.0), a1, a2);
    const double above = beta_cdf(std::nextafter(q, 1.0), a1, a2);
    const bool resolved = std::abs(beta_cdf(q, a1, a2) - nu) <= 1e-9;
    CHECK((resolved || (below <= nu + 1e-9 && above >= nu - 1e-9)));
    const double ref = boost::math::ibeta_inv(a1, a2, nu);
    CHECK(std::abs(q - ref) <= 1e-10 + 1e-9 * q + 4.0 * (std::nextafter(q, 2.0) - q));
  }
}

TEST_CASE("beta_quantile returns zero when the quantile underflows") {
  const double q = beta_quantile(0.95, 6.96e-6, 6.68e-3);
  CHECK(q >= 0.0);
  CHECK(q < 1e-290);
}

TEST_CASE("normal_quantile") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.95) == doctest::Approx(1.6448536).epsilon(1e-7));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.9599640).epsilon(1e-7));
  CHECK(std::abs(normal_quantile(0.95) - erf_bisection_quantile(0.95)) <= 1e-9);
  CHECK(std::abs(normal_quantile(0.975) - erf_bisection_quantile(0.975)) <= 1e-9);
  CHECK_THROWS_AS(normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(normal_quantile(1.0), DomainError);

  const boost::math::normal_distribution<double> n01;
  std::mt19937_64 rng(19);
  for (int i = 0; i < 2000; ++i) {
    const double nu = log_uniform(rng, 1e-300, 0.5);
    for (double p : {nu, 1.0 - nu}) {
      if (!(p > 0.0 && p < 1.0)) continue;
      CHECK(std::abs(normal_quantile(p) - boost::math::quantile(n01, p)) <= 1e-9);
    }
  }
}

TEST_CASE("normal_quantile is odd about one half") {
  // Dyadic nu keeps 1 - nu exact.
  for (std::uint64_t k = 1; k < (1ULL << 20); k += 997) {
    const double nu = std::ldexp(static_cast<double>(k), -21);
    CHECK(std::abs(normal_quantile(nu) + normal_quantile(1.0 - nu)) <= 1e-12);
  }
}

TEST_CASE("sobol_pairs contract") {
  const auto p = sobol_pairs(4, 0);
  REQUIRE(p.size() == 4);
  std::set<std::array<double, 2>> distinct(p.begin(), p.end());
  CHECK(distinct.size() == 4);
  for (const auto& q : p) {
    CHECK(q[0] >= 0.0);
    CHECK(q[0] < 1.0);
    CHECK(q[1] >= 0.0);
    CHECK(q[1] < 1.0);
  }
  CHECK(sobol_pairs(257, 99) == sobol_pairs(257, 99));
  CHECK(sobol_pairs(64, 1) != sobol_pairs(64, 2));
}

TEST_CASE("sobol_pairs first points are the standard two-dimensional sequence") {
  const auto p = sobol_pairs(8, 0);
  const std::array<std::array<double, 2>, 8> expected{{{0.0, 0.0},
                                                       {0.5, 0.5},
                                                       {0.75, 0.25},
                                                       {0.25, 0.75},
                                                       {0.375, 0.375},
                                                       {0.875, 0.875},
                                                       {0.625, 0.125},
                                                       {0.125, 0.625}}};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(p[i][0] == expected[i][0]);
    CHECK(p[i][1] == expected[i][1]);
  }
}

TEST_CASE("sobol_pairs stratify every axis for power-of-two sizes, scrambled or not") {
  for (std::uint64_t seed : {0ULL, 7ULL, 12345ULL}) {
    const std::size_t m = 256;
    const auto p = sobol_pairs(m, seed);
    for (int axis = 0; axis < 2; ++axis) {
      std::vector<int> bins(m, 0);
      for (const auto& q : p) ++bins[static_cast<std::size_t>(q[axis] * static_cast<double>(m))];
      CHECK(std::all_of(bins.begin(), bins.end(), [](int b) { return b == 1; }));
    }
  }
}

TEST_CASE("sobol_pairs discrepancy beats pseudorandom points") {
  const std::size_t m = 1024;
  std::mt19937_64 rng(20);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::array<double, 2>> random(m);
  for (auto& q : random) q = {unit(rng), unit(rng)};
  CHECK(star_discrepancy(sobol_pairs(m, 0)) < star_discrepancy(random));
  CHECK(star_discrepancy(sobol_pairs(m, 3)) < star_discrepancy(random));
}
