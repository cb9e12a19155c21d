#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ncomp {

// Probability mass function over a finite integer support starting at
// support_min. `exact` marks closed-form pmfs; approximations carry false.
struct Distribution {
  int support_min = 0;
  std::vector<double> pmf;
  bool exact = true;

  double at_value(int v) const {
    int i = v - support_min;
    if (i < 0 || i >= static_cast<int>(pmf.size())) return 0.0;
    return pmf[i];
  }
  int support_max() const {
    return support_min + static_cast<int>(pmf.size()) - 1;
  }
  double total_mass() const {
    double s = 0;
    for (double p : pmf) s += p;
    return s;
  }
  double mean() const {
    double m = 0;
    for (std::size_t i = 0; i < pmf.size(); ++i)
      m += (support_min + static_cast<double>(i)) * pmf[i];
    return m;
  }
};

inline Distribution empirical_pdf(const std::vector<int>& values) {
  if (values.empty()) throw std::invalid_argument("empirical_pdf: empty input");
  int hi = *std::max_element(values.begin(), values.end());
  if (*std::min_element(values.begin(), values.end()) < 0)
    throw std::invalid_argument("empirical_pdf: negative value");
  Distribution d;
  d.pmf.assign(hi + 1, 0.0);
  for (int v : values) d.pmf[v] += 1.0;
  for (double& p : d.pmf) p /= static_cast<double>(values.size());
  return d;
}

// Mean of squared pmf differences over the union support, aligned by value.
inline double pdf_mse(const Distribution& a, const Distribution& b) {
  int lo = std::min(a.support_min, b.support_min);
  int hi = std::max(a.support_max(), b.support_max());
  if (a.pmf.empty() && b.pmf.empty()) return 0.0;
  double s = 0;
  int count = 0;
  for (int v = lo; v <= hi; ++v) {
    double d = a.at_value(v) - b.at_value(v);
    s += d * d;
    ++count;
  }
  return s / count;
}

inline void distribution_to_csv(const Distribution& d, std::ostream& out) {
  out << "value,probability\n";
  for (std::size_t i = 0; i < d.pmf.size(); ++i)
    out << (d.support_min + static_cast<int>(i)) << ',' << d.pmf[i] << '\n';
}

inline nlohmann::json distribution_to_json(const Distribution& d) {
  return {{"support_min", d.support_min}, {"pmf", d.pmf}, {"exact", d.exact}};
}

}  // namespace ncomp
