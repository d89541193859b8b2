#include <cmath>
#include <limits>

#include "attkit/errors.hpp"
#include "attkit/estimators.hpp"

namespace attkit {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

/* Lower regularized gamma P(a, x) by series, valid for x < a + 1. */
double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int k = 0; k < kMaxIter; ++k) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

/* Upper regularized gamma Q(a, x) by continued fraction (modified Lentz),
   valid for x >= a + 1. */
double gamma_q_continued_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw ConfigError("gamma shape must be positive");
  if (x < 0.0) throw ConfigError("gamma argument must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi2_sf(double x, int df) {
  if (df < 1) throw ConfigError("chi-squared degrees of freedom must be >= 1");
  if (std::isnan(x)) throw ConfigError("chi-squared statistic is NaN");
  if (x < 0.0) throw ConfigError("chi-squared statistic must be >= 0");
  return regularized_gamma_q(0.5 * static_cast<double>(df), 0.5 * x);
}

}  // namespace attkit
