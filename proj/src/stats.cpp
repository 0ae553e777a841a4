#include "n1sleep/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "n1sleep/error.hpp"

namespace n1sleep::stats {

namespace {

constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;
constexpr int kMaxIterations = 100000;

// Continued fraction for I_x(a,b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double x, double a, double b) {
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= kEps) return h;
  }
  return h;
}

// lgamma(x) - [(x - 1/2) log x - x + log(2 pi)/2], asymptotic series for x >= 10.
double stirling_error(double x) {
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12 - r2 * (1.0 / 360 - r2 * (1.0 / 1260 - r2 * (1.0 / 1680 - r2 / 1188))));
}

// log B(a, b) without the cancellation lgamma suffers when one argument is large.
double log_beta(double a, double b) {
  const double lo = std::min(a, b);
  const double hi = std::max(a, b);
  constexpr double kLarge = 10.0;
  if (hi < kLarge) return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
  const double corr = stirling_error(hi) - stirling_error(lo + hi);
  if (lo < kLarge)
    return std::lgamma(lo) - (hi - 0.5) * std::log1p(lo / hi) - lo * std::log(lo + hi) + lo + corr;
  return 0.5 * std::log(2.0 * M_PI) + (lo - 0.5) * std::log(lo / (lo + hi)) - (hi - 0.5) * std::log1p(lo / hi) -
         0.5 * std::log(lo + hi) + stirling_error(lo) + corr;
}

// x and y = 1 - x passed separately so callers can keep precision in whichever is small.
double inc_beta(double x, double y, double a, double b) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_x = x > 0.5 ? std::log1p(-y) : std::log(x);
  const double log_y = y > 0.5 ? std::log1p(-x) : std::log(y);
  const double log_front = a * log_x + b * log_y - log_beta(a, b);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(x, a, b) / a;
  return 1.0 - front * beta_continued_fraction(y, b, a) / b;
}

// Two-sided tail P(|T| >= |t|) for Student t with `df` degrees of freedom.
double two_sided_p(double t, double df) {
  if (std::isinf(t)) return 0.0;
  const double t2 = t * t;
  const double denom = df + t2;
  return std::clamp(inc_beta(df / denom, t2 / denom, 0.5 * df, 0.5), 0.0, 1.0);
}

struct Moments {
  double mean;
  double var;
};

Moments moments(std::span<const double> xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double d = x - mean;
    ss += d * d;
    comp += d;
  }
  const double n = static_cast<double>(xs.size());
  // Corrected two-pass variance.
  return {mean, std::max(0.0, (ss - comp * comp / n) / (n - 1.0))};
}

}  // namespace

double reg_inc_beta(double x, double a, double b) {
  if (!(x >= 0.0 && x <= 1.0) || !(a > 0.0) || !(b > 0.0))
    throw Error(ErrorKind::Domain, fmt::format("reg_inc_beta({}, {}, {}) outside domain", x, a, b));
  return std::clamp(inc_beta(x, 1.0 - x, a, b), 0.0, 1.0);
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw Error(ErrorKind::Domain, fmt::format("student_t_cdf: df = {} must be positive", df));
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  const double tail = 0.5 * two_sided_p(t, df);
  return t > 0.0 ? 1.0 - tail : tail;
}

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2)
    throw Error(ErrorKind::InsufficientData,
                fmt::format("welch_t needs at least 2 values per sample (got {} and {})", a.size(), b.size()));
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());

  TestResult r;
  r.n_a = a.size();
  r.n_b = b.size();
  r.mean_a = ma.mean;
  r.mean_b = mb.mean;
  r.mean_diff = mb.mean - ma.mean;

  const double qa = ma.var / na;
  const double qb = mb.var / nb;
  const double se2 = qa + qb;
  if (se2 == 0.0) {
    r.df = na + nb - 2.0;
    if (r.mean_diff == 0.0) {
      r.t = 0.0;
      r.p = 1.0;
    } else {
      r.t = std::copysign(std::numeric_limits<double>::infinity(), r.mean_diff);
      r.p = 0.0;
      r.degenerate_variance = true;
    }
    return r;
  }
  r.t = r.mean_diff / std::sqrt(se2);
  r.df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
  r.p = two_sided_p(r.t, r.df);
  return r;
}

double bonferroni(double p, std::size_t comparisons) noexcept {
  return std::min(1.0, p * static_cast<double>(std::max<std::size_t>(comparisons, 1)));
}

}  // namespace n1sleep::stats
