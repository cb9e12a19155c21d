#pragma once

#include <cmath>
#include <stdexcept>

namespace ncomp {

inline double log_choose(int n, int k) {
  if (k < 0 || k > n) throw std::invalid_argument("log_choose: k out of range");
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

inline double choose(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  return std::round(std::exp(log_choose(n, k)));
}

// C(n,k) p^k (1-p)^(n-k), stable for small p^k terms.
inline double binom_pmf(int n, int k, double p) {
  if (k < 0 || k > n) return 0.0;
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  return std::exp(log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p));
}

// p^a (1-p)^b with the p=0 / p=1 corner cases pinned (0^0 = 1).
inline double pow_pq(double p, int a, int b) {
  double r = 1.0;
  if (a > 0) r *= std::pow(p, a);
  if (b > 0) r *= std::pow(1.0 - p, b);
  return r;
}

}  // namespace ncomp
