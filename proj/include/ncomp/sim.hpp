#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "ncomp/clique_cover.hpp"
#include "ncomp/rng.hpp"
#include "ncomp/sfm.hpp"

namespace ncomp {

// Per-receiver erasure source for coded slots: either iid Bernoulli(pe)
// draws or a fixed X/O pattern that must cover the whole run.
struct ErasureSchedule {
  bool fixed = false;
  double pe = 0.0;
  std::vector<std::vector<std::uint8_t>> pattern;  // [receiver][slot], 1 = erased

  static ErasureSchedule random(double p) {
    ErasureSchedule s;
    s.pe = p;
    return s;
  }
  static ErasureSchedule from_pattern(std::vector<std::vector<std::uint8_t>> pat) {
    ErasureSchedule s;
    s.fixed = true;
    s.pattern = std::move(pat);
    return s;
  }

  // erasure flags for coded slot `slot` (0-based), one per receiver
  std::vector<std::uint8_t> draw(int n_receivers, int slot, Rng& rng) const {
    std::vector<std::uint8_t> e(n_receivers);
    if (fixed) {
      if (static_cast<int>(pattern.size()) != n_receivers)
        throw std::runtime_error("ErasureSchedule: receiver count mismatch");
      for (int n = 0; n < n_receivers; ++n) {
        if (slot >= static_cast<int>(pattern[n].size()))
          throw std::runtime_error("ErasureSchedule: fixed pattern exhausted");
        e[n] = pattern[n][slot];
      }
    } else {
      std::bernoulli_distribution erased(pe);
      for (int n = 0; n < n_receivers; ++n) e[n] = erased(rng) ? 1 : 0;
    }
    return e;
  }
};

// Fixed-schedule text format: first line "N SLOTS", then N lines of X/O
// characters (X = erased).
inline ErasureSchedule parse_schedule(std::istream& in) {
  int n = 0, slots = 0;
  if (!(in >> n >> slots) || n < 1 || slots < 0)
    throw std::runtime_error("parse_schedule: bad header");
  std::vector<std::vector<std::uint8_t>> pat(n);
  for (int i = 0; i < n; ++i) {
    std::string row;
    if (!(in >> row) || static_cast<int>(row.size()) != slots)
      throw std::runtime_error("parse_schedule: bad row");
    for (char c : row) {
      if (c == 'X')
        pat[i].push_back(1);
      else if (c == 'O')
        pat[i].push_back(0);
      else
        throw std::runtime_error("parse_schedule: expected X or O");
    }
  }
  return ErasureSchedule::from_pattern(std::move(pat));
}

struct DecodeEvent {
  int receiver = 0;
  int packet = 0;  // original packet id
  int slot = 0;    // 1-based coded slot index
};

struct SlotRecord {
  bool rlnc = false;
  std::vector<int> packets;  // original ids of the XORed set; empty for RLNC
  std::vector<std::uint8_t> erased;
  std::vector<DecodeEvent> decoded;
};

struct TransmissionTrace {
  std::vector<SlotRecord> slots;
  std::vector<int> round_starts;   // 0-based slot index where each round begins
  std::vector<int> v_per_round;    // residual need measured after each round
  std::vector<DecodeEvent> decode_events;
  bool suboptimal_solver = false;  // some round fell back to the greedy solver

  int total_slots() const { return static_cast<int>(slots.size()); }
  // Mean decoding delay over all algorithmic packets, Eq.-(24) style.
  double average_delay() const {
    if (decode_events.empty())
      throw std::logic_error("average_delay: no decode events");
    double s = 0;
    for (const auto& e : decode_events) s += e.slot;
    return s / static_cast<double>(decode_events.size());
  }
};

namespace detail {

// Remaining demand during a run, tracked against original packet ids.
struct WantsState {
  int n_receivers;
  std::vector<std::vector<std::uint8_t>> want;  // [receiver][original packet id]
  int remaining = 0;

  explicit WantsState(const StateFeedbackMatrix& sfm)
      : n_receivers(sfm.n_receivers) {
    int max_id = 0;
    for (int id : sfm.packet_ids) max_id = std::max(max_id, id + 1);
    want.assign(sfm.n_receivers, std::vector<std::uint8_t>(max_id, 0));
    for (int n = 0; n < sfm.n_receivers; ++n)
      for (int k = 0; k < sfm.n_packets; ++k)
        if (sfm.at(n, k)) {
          want[n][sfm.packet_ids[k]] = 1;
          ++remaining;
        }
  }

  bool done() const { return remaining == 0; }

  // Compressed SFM over currently wanted packets, ids preserved.
  StateFeedbackMatrix current_sfm() const {
    int cols = want.empty() ? 0 : static_cast<int>(want[0].size());
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(n_receivers) * cols);
    for (int n = 0; n < n_receivers; ++n)
      for (int k = 0; k < cols; ++k) raw.push_back(want[n][k]);
    std::vector<int> ids(cols);
    for (int k = 0; k < cols; ++k) ids[k] = k;
    return compress_columns(n_receivers, cols, raw, ids);
  }
};

// Memoized per-round solve. The solution depends only on the 0/1 demand
// matrix (packet ids are translated by the caller), and Monte Carlo runs hit
// the same residual matrices over and over, so caching the chosen collection
// amortizes the solver cost across trials.
struct RoundSolution {
  Collection chosen;
  bool suboptimal = false;
};

inline RoundSolution solve_round_cached(const StateFeedbackMatrix& sfm,
                                        SolverMode mode) {
  static std::mutex mu;
  static std::unordered_map<std::string, RoundSolution> memo;

  std::ostringstream key;
  key << (mode == SolverMode::exact ? 'e' : 'g') << ' ';
  format_sfm(sfm, key);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = memo.find(key.str());
    if (it != memo.end()) return it->second;
  }
  auto solved = solve_idnc(conflict_matrix(sfm), derive_demands(sfm), mode);
  RoundSolution sol{solved.chosen, solved.suboptimal};
  {
    std::lock_guard<std::mutex> lock(mu);
    if (memo.size() > 1 << 16) memo.clear();
    memo.emplace(key.str(), sol);
  }
  return sol;
}

// Exact minimum number of coded slots for the residual demand; 0 when done.
inline int residual_u_idnc(const WantsState& st) {
  if (st.done()) return 0;
  auto sol = solve_round_cached(st.current_sfm(), SolverMode::exact);
  return static_cast<int>(sol.chosen.sets.size());
}

// Transmits one XOR set; receivers decode iff exactly one wanted member and
// no erasure. Returns the slot record.
inline SlotRecord transmit_set(WantsState& st, const std::vector<int>& packet_ids,
                               const std::vector<std::uint8_t>& erased, int slot_no,
                               std::vector<DecodeEvent>& events) {
  SlotRecord rec;
  rec.packets = packet_ids;
  rec.erased = erased;
  for (int n = 0; n < st.n_receivers; ++n) {
    if (erased[n]) continue;
    int hit = -1, hits = 0;
    for (int id : packet_ids)
      if (st.want[n][id]) {
        hit = id;
        ++hits;
      }
    if (hits == 1) {
      st.want[n][hit] = 0;
      --st.remaining;
      DecodeEvent e{n, hit, slot_no};
      rec.decoded.push_back(e);
      events.push_back(e);
    }
  }
  return rec;
}

}  // namespace detail

// Semi-online IDNC: solve, transmit the whole ordered collection, collect
// feedback, repeat. v_per_round holds the exact residual minimum after each
// round (round 1's entry is the V instance used by distribution checks).
inline TransmissionTrace run_semi_online_idnc(const StateFeedbackMatrix& sfm,
                                              const ErasureSchedule& sched,
                                              Rng& rng,
                                              SolverMode mode = SolverMode::exact) {
  if (sfm.n_packets < 1)
    throw std::invalid_argument("run_semi_online_idnc: empty SFM");
  detail::WantsState st(sfm);
  TransmissionTrace tr;
  while (!st.done()) {
    tr.round_starts.push_back(tr.total_slots());
    auto cur = st.current_sfm();
    auto solved = detail::solve_round_cached(cur, mode);
    tr.suboptimal_solver = tr.suboptimal_solver || solved.suboptimal;
    for (const auto& set : solved.chosen.sets) {
      std::vector<int> ids;
      for (int p : set.packets) ids.push_back(cur.packet_ids[p]);
      int slot_no = tr.total_slots() + 1;
      auto erased = sched.draw(st.n_receivers, tr.total_slots(), rng);
      tr.slots.push_back(
          detail::transmit_set(st, ids, erased, slot_no, tr.decode_events));
    }
    tr.v_per_round.push_back(detail::residual_u_idnc(st));
  }
  return tr;
}

// Fully-online IDNC: re-solve every slot and transmit only the first set of
// the selected ordered collection.
inline TransmissionTrace run_fully_online_idnc(const StateFeedbackMatrix& sfm,
                                               const ErasureSchedule& sched,
                                               Rng& rng,
                                               SolverMode mode = SolverMode::exact) {
  if (sfm.n_packets < 1)
    throw std::invalid_argument("run_fully_online_idnc: empty SFM");
  detail::WantsState st(sfm);
  TransmissionTrace tr;
  while (!st.done()) {
    tr.round_starts.push_back(tr.total_slots());
    auto cur = st.current_sfm();
    auto solved = detail::solve_round_cached(cur, mode);
    tr.suboptimal_solver = tr.suboptimal_solver || solved.suboptimal;
    const auto& set = solved.chosen.sets.front();
    std::vector<int> ids;
    for (int p : set.packets) ids.push_back(cur.packet_ids[p]);
    int slot_no = tr.total_slots() + 1;
    auto erased = sched.draw(st.n_receivers, tr.total_slots(), rng);
    tr.slots.push_back(
        detail::transmit_set(st, ids, erased, slot_no, tr.decode_events));
  }
  return tr;
}

// RLNC under the large-field assumption: a receiver decodes all of its
// wanted packets at the slot where its non-erased reception count reaches
// its remaining deficit. Round 1 is W_max slots; each later round is the
// largest remaining deficit.
inline TransmissionTrace run_rlnc(const StateFeedbackMatrix& sfm,
                                  const ErasureSchedule& sched, Rng& rng) {
  if (sfm.n_packets < 1) throw std::invalid_argument("run_rlnc: empty SFM");
  const auto demands = derive_demands(sfm);
  const int n = sfm.n_receivers;
  std::vector<int> deficit(n);
  std::vector<std::vector<int>> pending(n);  // original ids not yet decoded
  for (int i = 0; i < n; ++i) {
    deficit[i] = static_cast<int>(demands.wants[i].size());
    for (int k : demands.wants[i]) pending[i].push_back(sfm.packet_ids[k]);
  }
  TransmissionTrace tr;
  int round_len = demands.w_max;
  while (round_len > 0) {
    tr.round_starts.push_back(tr.total_slots());
    std::vector<int> got(n, 0);
    for (int s = 0; s < round_len; ++s) {
      SlotRecord rec;
      rec.rlnc = true;
      int slot_no = tr.total_slots() + 1;
      rec.erased = sched.draw(n, tr.total_slots(), rng);
      for (int i = 0; i < n; ++i) {
        if (rec.erased[i] || deficit[i] == 0) continue;
        if (++got[i] == deficit[i]) {
          for (int id : pending[i]) {
            DecodeEvent e{i, id, slot_no};
            rec.decoded.push_back(e);
            tr.decode_events.push_back(e);
          }
          pending[i].clear();
        }
      }
      tr.slots.push_back(std::move(rec));
    }
    int v = 0;
    for (int i = 0; i < n; ++i) {
      deficit[i] = std::max(0, deficit[i] - got[i]);
      v = std::max(v, deficit[i]);
    }
    tr.v_per_round.push_back(v);
    round_len = v;
  }
  return tr;
}

inline nlohmann::json trace_to_json(const TransmissionTrace& tr) {
  nlohmann::json slots = nlohmann::json::array();
  for (const auto& s : tr.slots) {
    nlohmann::json decoded = nlohmann::json::array();
    for (const auto& e : s.decoded)
      decoded.push_back({{"receiver", e.receiver}, {"packet", e.packet}});
    slots.push_back({{"rlnc", s.rlnc},
                     {"packets", s.packets},
                     {"erased", s.erased},
                     {"decoded", decoded}});
  }
  return {{"slots", slots},
          {"round_starts", tr.round_starts},
          {"v_per_round", tr.v_per_round},
          {"total_slots", tr.total_slots()},
          {"suboptimal_solver", tr.suboptimal_solver}};
}

}  // namespace ncomp
