#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ncomp/rng.hpp"

namespace ncomp {

// Binary demand matrix after the systematic phase. Rows are receivers,
// columns are packets still wanted by at least one receiver. Columns keep
// a mapping back to the original packet id so reports can refer to the
// packets by their pre-compression index.
struct StateFeedbackMatrix {
  int n_receivers = 0;
  int n_packets = 0;  // K, after all-zero columns are dropped
  std::vector<std::uint8_t> entries;  // row-major N x K
  std::vector<int> packet_ids;        // column -> original 0-based packet id

  std::uint8_t at(int n, int k) const {
    return entries[static_cast<std::size_t>(n) * n_packets + k];
  }
  std::uint8_t& at(int n, int k) {
    return entries[static_cast<std::size_t>(n) * n_packets + k];
  }
};

// Drops columns wanted by nobody; surviving columns keep the ids assigned
// in `ids` (or their raw index when `ids` is empty).
inline StateFeedbackMatrix compress_columns(int n_receivers, int n_cols,
                                            const std::vector<std::uint8_t>& raw,
                                            const std::vector<int>& ids = {}) {
  std::vector<int> keep;
  for (int k = 0; k < n_cols; ++k) {
    bool wanted = false;
    for (int n = 0; n < n_receivers && !wanted; ++n)
      wanted = raw[static_cast<std::size_t>(n) * n_cols + k] != 0;
    if (wanted) keep.push_back(k);
  }
  StateFeedbackMatrix sfm;
  sfm.n_receivers = n_receivers;
  sfm.n_packets = static_cast<int>(keep.size());
  sfm.entries.resize(static_cast<std::size_t>(n_receivers) * keep.size());
  sfm.packet_ids.reserve(keep.size());
  for (int k : keep) sfm.packet_ids.push_back(ids.empty() ? k : ids[k]);
  for (int n = 0; n < n_receivers; ++n)
    for (std::size_t j = 0; j < keep.size(); ++j)
      sfm.entries[static_cast<std::size_t>(n) * keep.size() + j] =
          raw[static_cast<std::size_t>(n) * n_cols + keep[j]];
  return sfm;
}

inline StateFeedbackMatrix sfm_from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) throw std::invalid_argument("sfm_from_rows: no rows");
  const int n = static_cast<int>(rows.size());
  const int kt = static_cast<int>(rows[0].size());
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(n) * kt);
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != kt)
      throw std::invalid_argument("sfm_from_rows: ragged rows");
    for (int v : r) raw.push_back(v ? 1 : 0);
  }
  return compress_columns(n, kt, raw);
}

// Random post-systematic-phase state: each entry is 1 independently with
// probability pe (the packet was erased at that receiver), then columns
// received by everyone are removed.
inline StateFeedbackMatrix generate_sfm(int kt, int n, double pe, Rng& rng) {
  if (kt < 1) throw std::invalid_argument("generate_sfm: kt must be >= 1");
  if (n < 1) throw std::invalid_argument("generate_sfm: n must be >= 1");
  if (!(pe >= 0.0 && pe < 1.0))
    throw std::invalid_argument("generate_sfm: pe must be in [0,1)");
  std::bernoulli_distribution lost(pe);
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(n) * kt);
  for (auto& e : raw) e = lost(rng) ? 1 : 0;
  return compress_columns(n, kt, raw);
}

struct DemandSets {
  std::vector<std::vector<int>> wants;    // per receiver, column indices
  std::vector<std::vector<int>> targets;  // per packet, receiver indices
  int w_min = 0;
  int w_max = 0;
  int t_total = 0;
};

inline DemandSets derive_demands(const StateFeedbackMatrix& sfm) {
  DemandSets d;
  d.wants.resize(sfm.n_receivers);
  d.targets.resize(sfm.n_packets);
  for (int n = 0; n < sfm.n_receivers; ++n)
    for (int k = 0; k < sfm.n_packets; ++k)
      if (sfm.at(n, k)) {
        d.wants[n].push_back(k);
        d.targets[k].push_back(n);
        ++d.t_total;
      }
  d.w_min = sfm.n_receivers == 0 ? 0 : static_cast<int>(d.wants[0].size());
  for (const auto& w : d.wants) {
    d.w_max = std::max(d.w_max, static_cast<int>(w.size()));
    d.w_min = std::min(d.w_min, static_cast<int>(w.size()));
  }
  return d;
}

// Strict upper-triangular pairwise conflict structure: c[i][j] = 1 iff some
// receiver wants both packet i and packet j.
struct ConflictMatrix {
  int n_packets = 0;
  std::vector<std::uint8_t> upper;  // packed row-major, entries with i < j
  int m0 = 0;                       // number of zero (compatible) entries

  static std::size_t index(int i, int j, int k) {
    // row i holds k-1-i entries, columns i+1..k-1
    return static_cast<std::size_t>(i) * (2 * k - i - 1) / 2 + (j - i - 1);
  }
  bool conflict(int i, int j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    return upper[index(i, j, n_packets)] != 0;
  }
};

inline ConflictMatrix conflict_matrix(const StateFeedbackMatrix& sfm) {
  ConflictMatrix c;
  c.n_packets = sfm.n_packets;
  const int k = sfm.n_packets;
  c.upper.assign(static_cast<std::size_t>(k) * (k - 1) / 2, 0);
  for (int n = 0; n < sfm.n_receivers; ++n)
    for (int i = 0; i < k; ++i) {
      if (!sfm.at(n, i)) continue;
      for (int j = i + 1; j < k; ++j)
        if (sfm.at(n, j)) c.upper[ConflictMatrix::index(i, j, k)] = 1;
    }
  c.m0 = static_cast<int>(std::count(c.upper.begin(), c.upper.end(), 0));
  return c;
}

// Builds a conflict matrix directly from a packed upper triangle (useful for
// random-structure experiments where no SFM exists).
inline ConflictMatrix conflict_matrix_from_upper(int k, std::vector<std::uint8_t> upper) {
  if (upper.size() != static_cast<std::size_t>(k) * (k - 1) / 2)
    throw std::invalid_argument("conflict_matrix_from_upper: bad triangle size");
  ConflictMatrix c;
  c.n_packets = k;
  c.upper = std::move(upper);
  c.m0 = static_cast<int>(std::count(c.upper.begin(), c.upper.end(), 0));
  return c;
}

// Text format: first line "N K", then N lines of K space-separated 0/1.
inline StateFeedbackMatrix parse_sfm(std::istream& in) {
  int n = 0, k = 0;
  if (!(in >> n >> k) || n < 1 || k < 0)
    throw std::runtime_error("parse_sfm: bad header");
  std::vector<std::uint8_t> raw(static_cast<std::size_t>(n) * k);
  for (auto& e : raw) {
    int v = 0;
    if (!(in >> v) || (v != 0 && v != 1))
      throw std::runtime_error("parse_sfm: bad entry");
    e = static_cast<std::uint8_t>(v);
  }
  return compress_columns(n, k, raw);
}

inline void format_sfm(const StateFeedbackMatrix& sfm, std::ostream& out) {
  out << sfm.n_receivers << ' ' << sfm.n_packets << '\n';
  for (int n = 0; n < sfm.n_receivers; ++n) {
    for (int k = 0; k < sfm.n_packets; ++k)
      out << (k ? " " : "") << int(sfm.at(n, k));
    out << '\n';
  }
}

}  // namespace ncomp
