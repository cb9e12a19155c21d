#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ncomp/sfm.hpp"

namespace ncomp {

// An XOR-able packet set: no two members conflict under the governing
// conflict matrix. `packets` is kept sorted; `mask` mirrors it as a bitset.
struct EncodingSet {
  std::vector<int> packets;
  std::uint64_t mask = 0;

  bool operator==(const EncodingSet& o) const { return mask == o.mask; }
};

inline EncodingSet encoding_set_from_mask(std::uint64_t mask) {
  EncodingSet s;
  s.mask = mask;
  while (mask) {
    s.packets.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return s;
}

// Ordered list of maximal encoding sets covering every wanted packet.
struct Collection {
  std::vector<EncodingSet> sets;

  std::uint64_t covered() const {
    std::uint64_t m = 0;
    for (const auto& s : sets) m |= s.mask;
    return m;
  }
  std::vector<int> diversities(int k) const {
    std::vector<int> d(k, 0);
    for (const auto& s : sets)
      for (int p : s.packets) ++d[p];
    return d;
  }
  // Selection score of Eq.-(9) style: sum over packets of diversity times
  // targeted-receiver count.
  long long sigma(const std::vector<std::vector<int>>& targets) const {
    long long sig = 0;
    for (const auto& s : sets)
      for (int p : s.packets) sig += static_cast<long long>(targets[p].size());
    return sig;
  }
};

// Compatibility adjacency: bit j of adj[i] set iff packets i and j can be
// coded together (no conflict). K is capped at 64 by the mask representation.
inline std::vector<std::uint64_t> compat_adjacency(const ConflictMatrix& c) {
  if (c.n_packets > 64)
    throw std::invalid_argument("compat_adjacency: K > 64 unsupported");
  std::vector<std::uint64_t> adj(c.n_packets, 0);
  for (int i = 0; i < c.n_packets; ++i)
    for (int j = i + 1; j < c.n_packets; ++j)
      if (!c.conflict(i, j)) {
        adj[i] |= 1ULL << j;
        adj[j] |= 1ULL << i;
      }
  return adj;
}

namespace detail {

inline void bron_kerbosch(std::uint64_t r, std::uint64_t p, std::uint64_t x,
                          const std::vector<std::uint64_t>& adj,
                          std::vector<std::uint64_t>& out) {
  if (p == 0 && x == 0) {
    out.push_back(r);
    return;
  }
  // pivot: vertex of P|X with most neighbours in P
  std::uint64_t px = p | x;
  int pivot = -1, best = -1;
  for (std::uint64_t t = px; t; t &= t - 1) {
    int v = std::countr_zero(t);
    int deg = std::popcount(p & adj[v]);
    if (deg > best) {
      best = deg;
      pivot = v;
    }
  }
  std::uint64_t cand = p & ~adj[pivot];
  for (std::uint64_t t = cand; t; t &= t - 1) {
    int v = std::countr_zero(t);
    std::uint64_t vb = 1ULL << v;
    bron_kerbosch(r | vb, p & adj[v], x & adj[v], adj, out);
    p &= ~vb;
    x |= vb;
  }
}

inline bool set_less(const EncodingSet& a, const EncodingSet& b) {
  return std::lexicographical_compare(a.packets.begin(), a.packets.end(),
                                      b.packets.begin(), b.packets.end());
}

}  // namespace detail

// All maximal cliques of the compatibility graph, in canonical order
// (lexicographic over sorted member lists, which also sorts by smallest
// member first).
inline std::vector<EncodingSet> maximal_encoding_sets(const ConflictMatrix& c) {
  if (c.n_packets < 1)
    throw std::invalid_argument("maximal_encoding_sets: K must be >= 1");
  auto adj = compat_adjacency(c);
  std::uint64_t all = c.n_packets == 64 ? ~0ULL : (1ULL << c.n_packets) - 1;
  std::vector<std::uint64_t> masks;
  detail::bron_kerbosch(0, all, 0, adj, masks);
  std::vector<EncodingSet> sets;
  sets.reserve(masks.size());
  for (auto m : masks) sets.push_back(encoding_set_from_mask(m));
  std::sort(sets.begin(), sets.end(), detail::set_less);
  return sets;
}

// All minimal collections (smallest families of maximal sets satisfying the
// diversity constraint), found by iterative branching: extend every partial
// collection through an uncovered packet of smallest remaining diversity,
// branching on each remaining set containing it. Duplicates reached along
// different paths are merged. A nonzero state_cap bounds the number of
// distinct partial collections kept per level; past it the search throws
// std::length_error so callers can fall back to the greedy cover instead of
// exhausting memory on pathological instances.
inline std::vector<Collection> minimal_collections(
    const std::vector<EncodingSet>& sets, int k, std::size_t state_cap = 0) {
  if (k < 1) throw std::invalid_argument("minimal_collections: K must be >= 1");
  if (sets.empty())
    throw std::invalid_argument("minimal_collections: no encoding sets");
  std::uint64_t all = k == 64 ? ~0ULL : (1ULL << k) - 1;
  {
    std::uint64_t cov = 0;
    for (const auto& s : sets) cov |= s.mask;
    if (cov != all)
      throw std::invalid_argument("minimal_collections: sets do not cover all packets");
  }
  const int ns = static_cast<int>(sets.size());
  auto dedupe = [](std::vector<std::vector<int>>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  std::vector<std::vector<int>> level = {{}};  // sorted set-index lists
  for (;;) {
    std::vector<std::vector<int>> next;
    for (const auto& part : level) {
      if (state_cap && next.size() > 4 * state_cap) {
        dedupe(next);
        if (next.size() > state_cap)
          throw std::length_error("minimal_collections: state cap exceeded");
      }
      std::uint64_t covered = 0, used = 0;
      for (int idx : part) {
        covered |= sets[idx].mask;
        used |= 1ULL << idx;
      }
      std::uint64_t uncovered = all & ~covered;
      // packet of smallest diversity among unused sets, ties to lowest index
      int pick = -1, pick_div = ns + 1;
      for (std::uint64_t t = uncovered; t; t &= t - 1) {
        int p = std::countr_zero(t);
        int div = 0;
        for (int s = 0; s < ns; ++s)
          if (!(used >> s & 1) && (sets[s].mask >> p & 1)) ++div;
        if (div < pick_div) {
          pick_div = div;
          pick = p;
        }
      }
      for (int s = 0; s < ns; ++s) {
        if ((used >> s & 1) || !(sets[s].mask >> pick & 1)) continue;
        auto grown = part;
        grown.insert(std::upper_bound(grown.begin(), grown.end(), s), s);
        next.push_back(std::move(grown));
      }
    }
    dedupe(next);
    if (state_cap && next.size() > state_cap)
      throw std::length_error("minimal_collections: state cap exceeded");
    level = std::move(next);
    std::vector<Collection> done;
    for (const auto& part : level) {
      std::uint64_t covered = 0;
      for (int idx : part) covered |= sets[idx].mask;
      if (covered == all) {
        Collection c;
        for (int idx : part) c.sets.push_back(sets[idx]);
        done.push_back(std::move(c));
      }
    }
    if (!done.empty()) return done;
    if (level.empty())
      throw std::logic_error("minimal_collections: search exhausted");
  }
}

// Greedy cover heuristic: repeatedly take the set covering the most
// not-yet-covered packets, ties broken by canonical order. May exceed the
// minimal collection size.
inline Collection greedy_collection(const std::vector<EncodingSet>& sets, int k) {
  if (sets.empty())
    throw std::invalid_argument("greedy_collection: no encoding sets");
  std::uint64_t all = k == 64 ? ~0ULL : (1ULL << k) - 1;
  Collection out;
  std::uint64_t covered = 0;
  std::vector<bool> used(sets.size(), false);
  while (covered != all) {
    int best = -1, gain = -1;
    for (std::size_t s = 0; s < sets.size(); ++s) {
      if (used[s]) continue;
      int g = std::popcount(sets[s].mask & ~covered);
      if (g > gain) {
        gain = g;
        best = static_cast<int>(s);
      }
    }
    if (best < 0 || gain <= 0)
      throw std::invalid_argument("greedy_collection: sets do not cover all packets");
    used[best] = true;
    covered |= sets[best].mask;
    out.sets.push_back(sets[best]);
  }
  return out;
}

namespace detail {

inline bool collection_less(const Collection& a, const Collection& b) {
  // canonical signature order: sorted sets of sorted packets
  auto sig = [](const Collection& c) {
    std::vector<std::vector<int>> s;
    for (const auto& e : c.sets) s.push_back(e.packets);
    std::sort(s.begin(), s.end());
    return s;
  };
  return sig(a) < sig(b);
}

}  // namespace detail

// Picks the collection maximizing sigma and reorders its sets greedily by
// descending marginal benefit (sum of T_k over packets not already placed),
// ties broken lexicographically by sorted packet indices.
inline Collection select_and_order(const std::vector<Collection>& collections,
                                   const DemandSets& demands) {
  if (collections.empty())
    throw std::invalid_argument("select_and_order: no collections");
  const Collection* best = &collections[0];
  long long best_sig = best->sigma(demands.targets);
  for (std::size_t i = 1; i < collections.size(); ++i) {
    long long sig = collections[i].sigma(demands.targets);
    if (sig > best_sig ||
        (sig == best_sig && detail::collection_less(collections[i], *best))) {
      best = &collections[i];
      best_sig = sig;
    }
  }
  Collection ordered;
  std::vector<EncodingSet> pool = best->sets;
  std::uint64_t placed = 0;
  while (!pool.empty()) {
    std::size_t pick = 0;
    long long pick_benefit = -1;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      long long b = 0;
      for (int p : pool[i].packets)
        if (!(placed >> p & 1)) b += static_cast<long long>(demands.targets[p].size());
      if (b > pick_benefit ||
          (b == pick_benefit && detail::set_less(pool[i], pool[pick]))) {
        pick_benefit = b;
        pick = i;
      }
    }
    placed |= pool[pick].mask;
    ordered.sets.push_back(pool[pick]);
    pool.erase(pool.begin() + pick);
  }
  return ordered;
}

// Staircase upper bound on the minimum collection size as a function of the
// zero count m0 alone.
inline int u_upper_bound(int k, int m0) {
  const int total = k * (k - 1) / 2;
  if (m0 < 0 || m0 > total)
    throw std::invalid_argument("u_upper_bound: m0 out of range");
  if (m0 == 0) return k;
  int cum = 0;
  for (int j = 1; j < k; ++j) {
    cum += k - j;  // interval for bound k-j ends at cum
    if (m0 <= cum) return k - j;
  }
  return 1;
}

// Lower bound by the cheapest-merge process: start from K singletons and
// repeatedly merge the two smallest sets (sizes m,n) at a cost of m*n zeros.
inline int u_lower_bound(int k, int m0) {
  const int total = k * (k - 1) / 2;
  if (m0 < 0 || m0 > total)
    throw std::invalid_argument("u_lower_bound: m0 out of range");
  std::vector<int> sizes(k, 1);
  int spent = 0;
  while (sizes.size() > 1) {
    std::sort(sizes.begin(), sizes.end());
    int cost = sizes[0] * sizes[1];
    if (spent + cost > m0) break;
    spent += cost;
    sizes[1] += sizes[0];
    sizes.erase(sizes.begin());
  }
  return static_cast<int>(sizes.size());
}

inline int geller_bound(int k, int m0) {
  return static_cast<int>((static_cast<long long>(k) * k + k + 2LL * m0 - 1) /
                          (k + 2LL * m0));
}

// Exact chromatic number of the conflict graph (edges = conflicts), by
// branch and bound. Capped because of the exponential worst case.
inline int chromatic_oracle(const ConflictMatrix& c, int cap = 12) {
  if (c.n_packets > cap)
    throw std::invalid_argument("chromatic_oracle: K exceeds cap");
  const int k = c.n_packets;
  if (k == 0) return 0;
  std::vector<std::uint64_t> adj(k, 0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      if (i != j && c.conflict(i, j)) adj[i] |= 1ULL << j;

  // greedy clique on the conflict graph as a lower bound / seed
  int clique = 1;
  {
    std::uint64_t cand = k == 64 ? ~0ULL : (1ULL << k) - 1;
    std::uint64_t cur = 0;
    while (cand) {
      int bestv = -1, bestd = -1;
      for (std::uint64_t t = cand; t; t &= t - 1) {
        int v = std::countr_zero(t);
        int d = std::popcount(adj[v] & cand);
        if (d > bestd) {
          bestd = d;
          bestv = v;
        }
      }
      cur |= 1ULL << bestv;
      cand &= adj[bestv];
    }
    clique = std::popcount(cur);
  }

  std::vector<int> color(k, -1);
  // order vertices by degree, densest first
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return std::popcount(adj[a]) > std::popcount(adj[b]);
  });

  auto feasible = [&](int limit) {
    std::fill(color.begin(), color.end(), -1);
    // backtracking with symmetry pruning: vertex i may use at most
    // (max color used so far)+1
    int vi = 0;
    std::vector<int> next_color(k, 0);
    while (true) {
      if (vi == k) return true;
      int v = order[vi];
      int maxused = 0;
      for (int j = 0; j < vi; ++j) maxused = std::max(maxused, color[order[j]] + 1);
      int start = next_color[vi];
      int chosen = -1;
      int ceiling = std::min(limit, maxused + 1);
      for (int cc = start; cc < ceiling; ++cc) {
        bool ok = true;
        for (std::uint64_t t = adj[v]; t && ok; t &= t - 1)
          if (color[std::countr_zero(t)] == cc) ok = false;
        if (ok) {
          chosen = cc;
          break;
        }
      }
      if (chosen >= 0) {
        color[v] = chosen;
        next_color[vi] = chosen + 1;
        ++vi;
        if (vi < k) next_color[vi] = 0;
      } else {
        next_color[vi] = 0;
        color[v] = -1;
        --vi;
        if (vi < 0) return false;
        color[order[vi]] = -1;
      }
    }
  };

  for (int limit = clique; limit <= k; ++limit)
    if (feasible(limit)) return limit;
  return k;
}

enum class SolverMode { exact, greedy };

// End-to-end solve: maximal sets, minimal collections (or greedy past the
// caps), and the selected ordered collection.
struct SolveResult {
  std::vector<EncodingSet> maximal_sets;
  std::vector<Collection> minimal;  // empty when greedy was used
  Collection chosen;
  bool suboptimal = false;  // greedy fallback or requested greedy mode
};

inline SolveResult solve_idnc(const ConflictMatrix& c, const DemandSets& demands,
                              SolverMode mode = SolverMode::exact,
                              int exact_k_cap = 20, int exact_set_cap = 5000,
                              std::size_t exact_state_cap = 1u << 18) {
  SolveResult r;
  r.maximal_sets = maximal_encoding_sets(c);
  bool use_greedy = mode == SolverMode::greedy || c.n_packets > exact_k_cap ||
                    static_cast<int>(r.maximal_sets.size()) > exact_set_cap;
  if (!use_greedy) {
    try {
      r.minimal =
          minimal_collections(r.maximal_sets, c.n_packets, exact_state_cap);
    } catch (const std::length_error&) {
      use_greedy = true;  // instance too wide to enumerate exactly
    }
  }
  if (use_greedy) {
    r.chosen = select_and_order({greedy_collection(r.maximal_sets, c.n_packets)},
                                demands);
    r.suboptimal = true;
  } else {
    r.chosen = select_and_order(r.minimal, demands);
  }
  return r;
}

}  // namespace ncomp
