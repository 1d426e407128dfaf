#include "urank/specfun.hpp"

#include "urank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace urank::specfun {
namespace {

constexpr double kLn2Pi = 1.8378770664093454836; // ln(2*pi)
constexpr double kEps = std::numeric_limits<double>::epsilon();

[[noreturn]] void domain_fail(const char* fn, const std::string& what) {
  throw DomainError(std::string(fn) + ": " + what);
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Stirling remainder: lnGamma(u) - [(u - 1/2) ln u - u + ln(2 pi)/2], u >= 10.
double stirling_delta(double u) {
  const double r = 1.0 / u;
  const double r2 = r * r;
  return r * (1.0 / 12.0 +
              r2 * (-1.0 / 360.0 +
                    r2 * (1.0 / 1260.0 +
                          r2 * (-1.0 / 1680.0 +
                                r2 * (1.0 / 1188.0 +
                                      r2 * (-691.0 / 360360.0 +
                                            r2 * (1.0 / 156.0 + r2 * (-3617.0 / 122400.0))))))));
}

constexpr double kAsymptoticStart = 10.0;

// Asymptotic digamma without the leading log term.
double digamma_tail(double u) {
  const double r = 1.0 / u;
  const double r2 = r * r;
  return -0.5 * r -
         r2 * (1.0 / 12.0 +
               r2 * (-1.0 / 120.0 +
                     r2 * (1.0 / 252.0 +
                           r2 * (-1.0 / 240.0 +
                                 r2 * (1.0 / 132.0 + r2 * (-691.0 / 32760.0 + r2 * (1.0 / 12.0)))))));
}

double trigamma_asymptotic(double u) {
  const double r = 1.0 / u;
  const double r2 = r * r;
  return r + 0.5 * r2 +
         r * r2 *
             (1.0 / 6.0 +
              r2 * (-1.0 / 30.0 +
                    r2 * (1.0 / 42.0 +
                          r2 * (-1.0 / 30.0 +
                                r2 * (5.0 / 66.0 + r2 * (-691.0 / 2730.0 + r2 * (7.0 / 6.0)))))));
}

void check_positive(const char* fn, double a, const char* name) {
  if (!(a > 0.0) || !std::isfinite(a)) domain_fail(fn, std::string(name) + " must be positive and finite, got " + fmt(a));
}

// lnGamma(a) - lnGamma(a + b) for a >= kAsymptoticStart, b > 0.
double log_gamma_drop(double a, double b) {
  const double s = a + b;
  return -(a - 0.5) * std::log1p(b / a) - b * std::log(s) + b + stirling_delta(a) - stirling_delta(s);
}

// a ln(theta) + b ln(1 - theta) - ln B(a, b), evaluated to keep cancellation
// under control when the parameters are large.
double log_front(double theta, double a, double b) {
  if (std::min(a, b) >= kAsymptoticStart) {
    const double s = a + b;
    const double p = a / s;
    const double q = b / s;
    const double r1 = (theta - p) / p;
    const double r2 = (p - theta) / q;
    const double t1 = a * (std::fabs(r1) < 0.5 ? std::log1p(r1) : std::log(theta / p));
    const double t2 = b * (std::fabs(r2) < 0.5 ? std::log1p(r2) : std::log((1.0 - theta) / q));
    return t1 + t2 + 0.5 * std::log(a / s * b / (2.0 * std::numbers::pi)) - stirling_delta(a) -
           stirling_delta(b) + stirling_delta(s);
  }
  return a * std::log(theta) + b * std::log1p(-theta) - log_beta(a, b);
}

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double x, double a, double b) {
  constexpr double tiny = 1e-300;
  constexpr int max_iter = 200000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= 0.5 * kEps) return h;
  }
  throw NumericError("beta_cdf: continued fraction did not converge for x=" + fmt(x) + ", a=" + fmt(a) +
                     ", b=" + fmt(b));
}

} // namespace

double log_gamma(double u) {
  if (!(u > 0.0) || !std::isfinite(u)) domain_fail("log_gamma", "argument must be positive and finite, got " + fmt(u));
  int sign = 0;
  return ::lgamma_r(u, &sign);
}

double digamma(double u) {
  check_positive("digamma", u, "u");
  double shift = 0.0;
  while (u < kAsymptoticStart) {
    shift -= 1.0 / u;
    u += 1.0;
  }
  return shift + std::log(u) + digamma_tail(u);
}

double trigamma(double u) {
  check_positive("trigamma", u, "u");
  double shift = 0.0;
  while (u < kAsymptoticStart) {
    shift += 1.0 / (u * u);
    u += 1.0;
  }
  return shift + trigamma_asymptotic(u);
}

double polygamma_diff(double a, std::int64_t count, PolygammaOrder order) {
  check_positive("polygamma_diff", a, "a");
  if (count < 0) domain_fail("polygamma_diff", "count must be nonnegative");

  const bool di = order == PolygammaOrder::digamma;
  double sum = 0.0;
  std::int64_t t = 0;
  if (count <= kPolygammaCrossover) {
    for (; t < count; ++t) {
      const double u = a + static_cast<double>(t);
      sum += di ? 1.0 / u : -1.0 / (u * u);
    }
    return sum;
  }
  // Exact terms until the lower endpoint enters the asymptotic range.
  for (; t < count && a + static_cast<double>(t) < kAsymptoticStart; ++t) {
    const double u = a + static_cast<double>(t);
    sum += di ? 1.0 / u : -1.0 / (u * u);
  }
  if (t == count) return sum;
  const double lo = a + static_cast<double>(t);
  const double hi = a + static_cast<double>(count);
  if (di) {
    const double gap = static_cast<double>(count - t);
    return sum + std::log1p(gap / lo) + digamma_tail(hi) - digamma_tail(lo);
  }
  return sum + trigamma_asymptotic(hi) - trigamma_asymptotic(lo);
}

double log_gamma_ratio(double a, std::int64_t count) {
  check_positive("log_gamma_ratio", a, "a");
  if (count < 0) domain_fail("log_gamma_ratio", "count must be nonnegative");
  if (count <= kPolygammaCrossover) {
    double sum = 0.0;
    for (std::int64_t t = 0; t < count; ++t) sum += std::log(a + static_cast<double>(t));
    return sum;
  }
  const double c = static_cast<double>(count);
  if (a >= kAsymptoticStart) return -log_gamma_drop(a, c);
  return log_gamma(a + c) - log_gamma(a);
}

double log_beta(double a, double b) {
  check_positive("log_beta", a, "a");
  check_positive("log_beta", b, "b");
  if (a < b) std::swap(a, b); // a >= b
  if (b >= kAsymptoticStart) {
    const double s = a + b;
    return 0.5 * kLn2Pi + (a - 0.5) * std::log(a / s) + b * std::log(b / s) - 0.5 * std::log(b) +
           stirling_delta(a) + stirling_delta(b) - stirling_delta(s);
  }
  if (a >= kAsymptoticStart) return log_gamma(b) + log_gamma_drop(a, b);
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

double beta_cdf(double theta, double a1, double a2) {
  if (!(theta >= 0.0 && theta <= 1.0)) domain_fail("beta_cdf", "theta must lie in [0,1], got " + fmt(theta));
  check_positive("beta_cdf", a1, "a1");
  check_positive("beta_cdf", a2, "a2");
  if (theta == 0.0) return 0.0;
  if (theta == 1.0) return 1.0;
  if (theta < (a1 + 1.0) / (a1 + a2 + 2.0)) {
    return std::exp(log_front(theta, a1, a2)) * beta_continued_fraction(theta, a1, a2) / a1;
  }
  const double y = 1.0 - theta;
  return 1.0 - std::exp(log_front(y, a2, a1)) * beta_continued_fraction(y, a2, a1) / a2;
}

double beta_log_pdf(double theta, double a1, double a2) {
  if (!(theta >= 0.0 && theta <= 1.0)) domain_fail("beta_pdf", "theta must lie in [0,1], got " + fmt(theta));
  check_positive("beta_pdf", a1, "a1");
  check_positive("beta_pdf", a2, "a2");
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (theta == 0.0) {
    if (a1 < 1.0) return inf;
    if (a1 > 1.0) return -inf;
    return std::log(a2);
  }
  if (theta == 1.0) {
    if (a2 < 1.0) return inf;
    if (a2 > 1.0) return -inf;
    return std::log(a1);
  }
  return log_front(theta, a1, a2) - std::log(theta) - std::log1p(-theta);
}

double beta_pdf(double theta, double a1, double a2) { return std::exp(beta_log_pdf(theta, a1, a2)); }

double beta_quantile(double nu, double a1, double a2) {
  if (!(nu > 0.0 && nu < 1.0)) domain_fail("beta_quantile", "nu must lie in (0,1), got " + fmt(nu));
  check_positive("beta_quantile", a1, "a1");
  check_positive("beta_quantile", a2, "a2");

  // Initial guess: normal approximation for a1, a2 >= 1, power-law tails otherwise.
  double x;
  if (a1 >= 1.0 && a2 >= 1.0) {
    const double y = -normal_quantile(nu);
    const double lam = (y * y - 3.0) / 6.0;
    const double h = 2.0 / (1.0 / (2.0 * a1 - 1.0) + 1.0 / (2.0 * a2 - 1.0));
    const double w = y * std::sqrt(h + lam) / h -
                     (1.0 / (2.0 * a2 - 1.0) - 1.0 / (2.0 * a1 - 1.0)) * (lam + 5.0 / 6.0 - 2.0 / (3.0 * h));
    x = a1 / (a1 + a2 * std::exp(2.0 * w));
  } else {
    const double s = a1 + a2;
    const double t = std::exp(a1 * std::log(a1 / s)) / a1;
    const double u = std::exp(a2 * std::log(a2 / s)) / a2;
    const double w = t + u;
    x = nu < t / w ? std::pow(a1 * w * nu, 1.0 / a1) : 1.0 - std::pow(a2 * w * (1.0 - nu), 1.0 / a2);
  }
  if (!(x > 0.0 && x < 1.0) || !std::isfinite(x)) x = 0.5;

  // Steps by single ulps toward nu and keeps the closer neighbour; only runs
  // where one ulp of theta moves the CDF noticeably (steep tails near 0 or 1).
  auto polish = [&](double t) {
    double f = beta_cdf(t, a1, a2);
    if (std::fabs(f - nu) <= 1e-12) return t;
    const double dir = f < nu ? 1.0 : 0.0;
    for (int step = 0; step < 64; ++step) {
      const double u = std::nextafter(t, dir);
      if (!(u > 0.0 && u < 1.0)) return t;
      const double fu = beta_cdf(u, a1, a2);
      if ((dir == 1.0) != (fu < nu)) return std::fabs(fu - nu) < std::fabs(f - nu) ? u : t;
      t = u;
      f = fu;
    }
    return t;
  };

  double lo = 0.0;
  double hi = 1.0;
  constexpr int max_iter = 200;
  double last_err = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    const double err = beta_cdf(x, a1, a2) - nu;
    last_err = err;
    if (err == 0.0) return x;
    if (err < 0.0) lo = x;
    else hi = x;

    double next = x - err / beta_pdf(x, a1, a2);
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      if (lo == 0.0) {
        // Geometric bisection down to the smallest subnormal; a quantile
        // below it rounds to zero.
        constexpr double tiny = std::numeric_limits<double>::denorm_min();
        if (hi < 1e-290 && beta_cdf(tiny, a1, a2) >= nu) return 0.0;
        next = std::sqrt(hi) * std::sqrt(tiny);
      } else if (hi - lo > 0.25 * hi && lo > 0.0) next = std::sqrt(lo * hi);
      else next = 0.5 * (lo + hi);
      if (!(next > lo && next < hi)) return polish(x); // bracket exhausted at double resolution
    }
    if (std::fabs(next - x) <= 2.0 * kEps * next) return polish(next);
    x = next;
  }
  std::ostringstream os;
  os.precision(17);
  os << "beta_quantile: no convergence after " << max_iter << " iterations (nu=" << nu << ", a1=" << a1
     << ", a2=" << a2 << ", last theta=" << x << ", residual=" << last_err << ", bracket=[" << lo << ", " << hi
     << "])";
  throw NumericError(os.str());
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Wichura's AS241 (PPND16), accurate to about 1e-16.
double normal_quantile(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) domain_fail("normal_quantile", "nu must lie in (0,1), got " + fmt(nu));
  const double q = nu - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? nu : 1.0 - nu;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
               1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
               0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
               0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
               7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

} // namespace urank::specfun
