#pragma once

#include <stdexcept>
#include <vector>

#include "ncomp/distribution.hpp"
#include "ncomp/math.hpp"
#include "ncomp/sfm.hpp"

namespace ncomp {

// CDF of the largest wants-set size over N receivers after a systematic
// phase of kt slots with erasure probability pe. The inner binomial sum
// runs from i = 0 so the CDF reaches 1 at w = kt.
inline double w_max_cdf(int kt, double pe, int n, int w) {
  if (w < 0) return 0.0;
  if (w > kt) w = kt;
  double per = 0;
  for (int i = 0; i <= w; ++i) per += binom_pmf(kt, i, pe);
  if (per > 1.0) per = 1.0;
  double r = 1.0;
  for (int j = 0; j < n; ++j) r *= per;
  return r;
}

// Mean of the maximum of N iid Binomial(kt, pe) variables; the minimum
// number of coded slots a capacity-achieving random code needs.
inline double expected_u_rlnc(int kt, double pe, int n) {
  double e = 0;
  for (int w = 1; w <= kt; ++w)
    e += w * (w_max_cdf(kt, pe, n, w) - w_max_cdf(kt, pe, n, w - 1));
  return e;
}

// Exact pmf of the number of extra coded slots still needed after a first
// round of W_max transmissions: per-receiver deficit pmfs combined through
// the product of CDFs (the system needs the max over receivers).
inline Distribution v_rlnc_pdf(const DemandSets& demands, double pe) {
  const int w_max = demands.w_max;
  if (w_max < 1) throw std::invalid_argument("v_rlnc_pdf: w_max must be >= 1");
  const int n = static_cast<int>(demands.wants.size());
  // per-receiver CDFs over [0, W_n]
  std::vector<std::vector<double>> cdf(n);
  for (int i = 0; i < n; ++i) {
    const int wn = static_cast<int>(demands.wants[i].size());
    std::vector<double> pmf(wn + 1, 0.0);
    for (int w = wn; w <= w_max; ++w) pmf[0] += binom_pmf(w_max, w, 1.0 - pe);
    for (int v = 1; v <= wn; ++v) pmf[v] = binom_pmf(w_max, wn - v, 1.0 - pe);
    cdf[i].resize(wn + 1);
    double acc = 0;
    for (int v = 0; v <= wn; ++v) {
      acc += pmf[v];
      cdf[i][v] = acc;
    }
  }
  Distribution d;
  d.exact = true;
  d.pmf.resize(w_max + 1);
  double prev = 0;
  for (int v = 0; v <= w_max; ++v) {
    double sys = 1.0;
    for (int i = 0; i < n; ++i) {
      const int wn = static_cast<int>(cdf[i].size()) - 1;
      sys *= wn == -1 ? 1.0 : cdf[i][std::min(v, wn)];
    }
    d.pmf[v] = sys - prev;
    prev = sys;
  }
  return d;
}

// Expected number of algorithmic packets decoded exactly at coded slot u:
// a receiver with W_n <= u decodes all W_n duplicates at u iff its u-th
// reception is its W_n-th success.
inline double rlnc_expected_decoded(const DemandSets& demands, double pe, int u) {
  if (u < 1 || u > demands.w_max)
    throw std::invalid_argument("rlnc_expected_decoded: u out of range");
  double e = 0;
  for (const auto& wants : demands.wants) {
    const int wn = static_cast<int>(wants.size());
    if (wn == 0 || wn > u) continue;
    e += wn * choose(u - 1, wn - 1) * pow_pq(pe, u - wn, wn);
  }
  return e;
}

// Combined-round pmf: zero mass below u_min, then the extra-slot pmf shifted.
inline Distribution shifted_h_pdf(int u_min, const Distribution& v_pdf) {
  Distribution d;
  d.exact = v_pdf.exact;
  d.support_min = v_pdf.support_min + u_min;
  d.pmf = v_pdf.pmf;
  return d;
}

}  // namespace ncomp
