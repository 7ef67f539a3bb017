#include "effhsim/special_functions.hpp"

#include <cmath>

namespace effhsim {

namespace {

// Maclaurin series F(x) = sum (-1)^n 2^n x^(2n+1) / (2n+1)!!; fast for |x| <= 1.
double dawson_series(double x) {
  double term = x, sum = x;
  for (int n = 1; n < 40; ++n) {
    term *= -2.0 * x * x / (2 * n + 1);
    sum += term;
    if (std::fabs(term) < 1e-18 * std::fabs(sum)) break;
  }
  return sum;
}

// Rybicki's exponentially convergent sampling sum,
//   F(x) = (1/sqrt(pi)) * sum_{n odd} exp(-(x - n h)^2) / n,
// with h = 0.25 the truncation error is below 1e-15.
double dawson_rybicki(double x) {
  constexpr double h = 0.25;
  long n0 = std::lround(x / h);
  if (n0 % 2 == 0) ++n0;
  double sum = 0.0;
  for (long k = -60; k <= 60; k += 2) {
    const long n = n0 + k;
    if (n == 0) continue;
    const double d = x - static_cast<double>(n) * h;
    if (d * d > 45.0) continue;
    sum += std::exp(-d * d) / static_cast<double>(n);
  }
  return sum / std::sqrt(M_PI);
}

// Asymptotic series F(x) ~ (1/2x) sum_k (2k-1)!!/(2x^2)^k, summed to its
// smallest term; below 1e-15 for |x| >= 7.
double dawson_asymptotic(double x) {
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0, prev = 1.0;
  for (int k = 1; k < 60; ++k) {
    term *= (2 * k - 1) * inv2x2;
    if (std::fabs(term) >= prev) break;
    prev = std::fabs(term);
    sum += term;
    if (prev < 1e-18) break;
  }
  return sum / (2.0 * x);
}

}  // namespace

double dawson(double x) {
  const double ax = std::fabs(x);
  double v;
  if (ax <= 1.0)
    v = dawson_series(ax);
  else if (ax < 7.0)
    v = dawson_rybicki(ax);
  else
    v = dawson_asymptotic(ax);
  return x < 0.0 ? -v : v;
}

}  // namespace effhsim
