#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncomp/clique_cover.hpp"
#include "ncomp/distribution.hpp"
#include "ncomp/math.hpp"
#include "ncomp/rlnc.hpp"
#include "ncomp/sfm.hpp"

namespace ncomp {

// Total and cumulative per-packet diversities of an ordered collection.
// cumulative[u-1][k] counts appearances of packet k within the first u sets.
struct DiversityProfile {
  std::vector<int> total;
  std::vector<std::vector<int>> cumulative;

  int at(int k, int u) const { return cumulative[u - 1][k]; }
};

inline DiversityProfile diversity_profile(const Collection& coll, int k) {
  DiversityProfile p;
  p.total.assign(k, 0);
  std::vector<int> run(k, 0);
  for (const auto& s : coll.sets) {
    for (int q : s.packets) ++run[q];
    p.cumulative.push_back(run);
  }
  p.total = run;
  return p;
}

// Pmf of how many of its wanted packets a receiver still misses after the
// whole collection was transmitted. Packet k survives all its d_k coded
// appearances with probability pe^{d_k}; the count of survivors is a
// Poisson binomial, evaluated by convolution.
inline Distribution v_n_pdf(const std::vector<int>& wants,
                            const DiversityProfile& profile, double pe) {
  if (wants.empty()) throw std::invalid_argument("v_n_pdf: empty wants set");
  std::vector<double> pmf = {1.0};
  for (int k : wants) {
    double miss = pow_pq(pe, profile.total[k], 0);  // pe^{d_k}
    std::vector<double> next(pmf.size() + 1, 0.0);
    for (std::size_t v = 0; v < pmf.size(); ++v) {
      next[v] += pmf[v] * (1.0 - miss);
      next[v + 1] += pmf[v] * miss;
    }
    pmf = std::move(next);
  }
  Distribution d;
  d.pmf = std::move(pmf);
  d.exact = true;
  return d;
}

// System-level pmf of extra coded slots needed beyond the collection size.
// The CDF is the product of per-receiver CDFs; values at V >= 2 are the
// paper-style approximation, hence exact = false.
inline Distribution v_idnc_pdf(const StateFeedbackMatrix& sfm,
                               const Collection& coll, double pe) {
  const auto demands = derive_demands(sfm);
  const auto profile = diversity_profile(coll, sfm.n_packets);
  for (int k = 0; k < sfm.n_packets; ++k)
    if (!demands.targets[k].empty() && profile.total[k] < 1)
      throw std::invalid_argument("v_idnc_pdf: collection misses a wanted packet");
  const int u = static_cast<int>(coll.sets.size());
  std::vector<std::vector<double>> cdf(sfm.n_receivers);
  for (int n = 0; n < sfm.n_receivers; ++n) {
    if (demands.wants[n].empty()) {
      cdf[n] = {1.0};
      continue;
    }
    auto pn = v_n_pdf(demands.wants[n], profile, pe);
    cdf[n].resize(pn.pmf.size());
    double acc = 0;
    for (std::size_t v = 0; v < pn.pmf.size(); ++v) {
      acc += pn.pmf[v];
      cdf[n][v] = acc;
    }
  }
  Distribution d;
  d.exact = false;
  d.pmf.resize(u + 1);
  double prev = 0;
  for (int v = 0; v <= u; ++v) {
    double sys = 1.0;
    for (int n = 0; n < sfm.n_receivers; ++n) {
      int wn = static_cast<int>(cdf[n].size()) - 1;
      sys *= cdf[n][std::min(v, wn)];
    }
    d.pmf[v] = sys - prev;
    prev = sys;
  }
  return d;
}

// Expected algorithmic packets decoded at slot u of the ordered collection:
// packet k in set M_u decodes at a targeted receiver iff its first
// d_k(u)-1 appearances were erased and the u-th is not.
inline double idnc_expected_decoded(const DemandSets& demands,
                                    const Collection& coll, double pe, int u) {
  if (u < 1 || u > static_cast<int>(coll.sets.size()))
    throw std::invalid_argument("idnc_expected_decoded: u out of range");
  const int k = static_cast<int>(demands.targets.size());
  const auto profile = diversity_profile(coll, k);
  double e = 0;
  for (int q : coll.sets[u - 1].packets) {
    int d_u = profile.at(q, u);
    e += static_cast<double>(demands.targets[q].size()) *
         pow_pq(pe, d_u - 1, 0) * (1.0 - pe);
  }
  return e;
}

// Mean decoding delay from per-slot expected decode counts.
inline double expected_delay(const std::vector<double>& e_du) {
  double num = 0, den = 0;
  for (std::size_t u = 0; u < e_du.size(); ++u) {
    num += (u + 1) * e_du[u];
    den += e_du[u];
  }
  if (den <= 0.0) throw std::invalid_argument("expected_delay: all-zero input");
  return num / den;
}

struct DelayReport {
  std::vector<double> expected_decoded;  // E[D_u], u = 1..U
  double mean_delay = 0;                 // E[L]
  int t_total = 0;
  std::string scheme;
};

inline DelayReport idnc_delay_report(const DemandSets& demands,
                                     const Collection& coll, double pe) {
  DelayReport r;
  r.scheme = "IDNC";
  r.t_total = demands.t_total;
  for (int u = 1; u <= static_cast<int>(coll.sets.size()); ++u)
    r.expected_decoded.push_back(idnc_expected_decoded(demands, coll, pe, u));
  r.mean_delay = expected_delay(r.expected_decoded);
  return r;
}

inline DelayReport rlnc_delay_report(const DemandSets& demands, double pe) {
  DelayReport r;
  r.scheme = "RLNC";
  r.t_total = demands.t_total;
  for (int u = 1; u <= demands.w_max; ++u)
    r.expected_decoded.push_back(rlnc_expected_decoded(demands, pe, u));
  r.mean_delay = expected_delay(r.expected_decoded);
  return r;
}

inline nlohmann::json delay_report_to_json(const DelayReport& r) {
  return {{"scheme", r.scheme},
          {"expected_decoded", r.expected_decoded},
          {"mean_delay", r.mean_delay},
          {"t_total", r.t_total}};
}

}  // namespace ncomp
