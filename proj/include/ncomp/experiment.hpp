#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ncomp/clique_cover.hpp"
#include "ncomp/distribution.hpp"
#include "ncomp/fixtures.hpp"
#include "ncomp/idnc.hpp"
#include "ncomp/rlnc.hpp"
#include "ncomp/rng.hpp"
#include "ncomp/sfm.hpp"
#include "ncomp/sim.hpp"

namespace ncomp {

inline constexpr const char* kVersionTag = "ncomp-0.1.0";

struct ExperimentConfig {
  std::string experiment = "custom";
  int kt = 15;
  int n = 10;
  std::vector<int> n_range;  // overrides n when nonempty
  double pe = 0.2;
  int trials = 10000;
  bool trials_set = false;  // true when the user overrode the default
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  SolverMode solver = SolverMode::exact;
  std::string format = "csv";  // csv | json
  int workers = 0;             // 0 = hardware concurrency
};

// Runs f(trial, rng) for trials 0..m-1 across a worker pool. Results are
// stored by trial index, so the outcome is independent of worker count.
template <class T, class F>
std::vector<T> run_trials(int m, std::uint64_t seed, int workers, F&& f) {
  std::vector<T> out(m);
  if (workers <= 0)
    workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max(1, m));
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  auto work = [&]() {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= m || failed.load()) return;
      try {
        Rng rng(trial_seed(seed, static_cast<std::uint64_t>(i)));
        out[i] = f(i, rng);
      } catch (...) {
        failed.store(true);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("run_trials: a trial failed");
  return out;
}

struct Report {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  nlohmann::json extra;  // experiment-specific payload
};

namespace detail {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline nlohmann::json config_echo(const ExperimentConfig& cfg) {
  return {{"experiment", cfg.experiment},
          {"kt", cfg.kt},
          {"n", cfg.n},
          {"n_range", cfg.n_range},
          {"pe", cfg.pe},
          {"trials", cfg.trials},
          {"seed", cfg.seed},
          {"solver", cfg.solver == SolverMode::exact ? "exact" : "greedy"},
          {"version", kVersionTag}};
}

}  // namespace detail

inline std::vector<std::filesystem::path> emit_report(
    const Report& rep, const ExperimentConfig& cfg) {
  if (rep.columns.empty() && rep.extra.is_null())
    throw std::invalid_argument("emit_report: empty report");
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  std::vector<fs::path> written;
  if (cfg.format == "csv" || cfg.format == "both") {
    fs::path p = fs::path(cfg.out_dir) / (rep.name + ".csv");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("emit_report: cannot write " + p.string());
    for (std::size_t i = 0; i < rep.columns.size(); ++i)
      out << (i ? "," : "") << rep.columns[i];
    out << '\n';
    for (const auto& row : rep.rows) {
      for (std::size_t i = 0; i < row.size(); ++i)
        out << (i ? "," : "") << detail::fmt_double(row[i]);
      out << '\n';
    }
    written.push_back(p);
  }
  if (cfg.format == "json" || cfg.format == "both") {
    fs::path p = fs::path(cfg.out_dir) / (rep.name + ".json");
    std::ofstream out(p);
    if (!out) throw std::runtime_error("emit_report: cannot write " + p.string());
    nlohmann::json j = {{"config", detail::config_echo(cfg)},
                        {"columns", rep.columns},
                        {"rows", rep.rows}};
    if (!rep.extra.is_null()) j["extra"] = rep.extra;
    out << j.dump(2) << '\n';
    written.push_back(p);
  }
  if (written.empty())
    throw std::invalid_argument("emit_report: unknown format " + cfg.format);
  return written;
}

namespace detail {

// Exact (or greedy, per cfg) minimum collection size for a fresh random SFM.
inline int sample_u_idnc(const ExperimentConfig& cfg, int n, Rng& rng) {
  auto sfm = generate_sfm(cfg.kt, n, cfg.pe, rng);
  if (sfm.n_packets == 0) return 0;
  auto r = solve_idnc(conflict_matrix(sfm), derive_demands(sfm), cfg.solver);
  return static_cast<int>(r.chosen.sets.size());
}

inline int sample_w_max(const ExperimentConfig& cfg, int n, Rng& rng) {
  auto sfm = generate_sfm(cfg.kt, n, cfg.pe, rng);
  return derive_demands(sfm).w_max;
}

struct DelaySample {
  double l_idnc = 0;
  double l_rlnc = 0;
  bool valid = false;
};

inline DelaySample sample_delays(const ExperimentConfig& cfg, int n, Rng& rng) {
  DelaySample s;
  auto sfm = generate_sfm(cfg.kt, n, cfg.pe, rng);
  if (sfm.n_packets == 0) return s;
  auto demands = derive_demands(sfm);
  auto r = solve_idnc(conflict_matrix(sfm), demands, cfg.solver);
  s.l_idnc = idnc_delay_report(demands, r.chosen, cfg.pe).mean_delay;
  s.l_rlnc = rlnc_delay_report(demands, cfg.pe).mean_delay;
  s.valid = true;
  return s;
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("fixture mismatch: " + what);
}

}  // namespace detail

inline Report run_experiment(const ExperimentConfig& cfg) {
  Report rep;
  rep.name = cfg.experiment;
  const auto& exp = cfg.experiment;

  if (exp == "fig1") {
    // bounds and mean exact minimum cover size vs zero count, K = 20
    const int k = 20;
    const int total = k * (k - 1) / 2;
    const int per_point = cfg.trials_set ? cfg.trials : 1000;
    rep.columns = {"m0", "upper", "lower", "mean_exact"};
    for (int m0 = 0; m0 <= total; ++m0) {
      auto us = run_trials<int>(
          per_point, cfg.seed + static_cast<std::uint64_t>(m0) * 0x10001,
          cfg.workers, [&](int, Rng& rng) {
            std::vector<std::uint8_t> upper(total, 1);
            for (int z = 0; z < m0; ++z) upper[z] = 0;
            std::shuffle(upper.begin(), upper.end(), rng);
            auto c = conflict_matrix_from_upper(k, std::move(upper));
            DemandSets dummy;
            dummy.targets.assign(k, {0});
            dummy.wants.assign(1, std::vector<int>{});
            auto r = solve_idnc(c, dummy, cfg.solver);
            return static_cast<int>(r.chosen.sets.size());
          });
      double mean = 0;
      for (int u : us) mean += u;
      mean /= us.size();
      rep.rows.push_back({static_cast<double>(m0),
                          static_cast<double>(u_upper_bound(k, m0)),
                          static_cast<double>(u_lower_bound(k, m0)), mean});
    }
    return rep;
  }

  if (exp == "fig2") {
    std::vector<int> ns = cfg.n_range;
    if (ns.empty())
      for (int n = 1; n <= 45; n += 2) ns.push_back(n);
    rep.columns = {"N", "mean_U_IDNC", "mean_U_RLNC", "E_U_RLNC_analytical"};
    for (std::size_t i = 0; i < ns.size(); ++i) {
      int n = ns[i];
      std::uint64_t s = cfg.seed + i * 0x9e3779b9ULL;
      auto ui = run_trials<int>(cfg.trials, s, cfg.workers, [&](int, Rng& rng) {
        return detail::sample_u_idnc(cfg, n, rng);
      });
      auto ur = run_trials<int>(cfg.trials, s, cfg.workers, [&](int, Rng& rng) {
        return detail::sample_w_max(cfg, n, rng);
      });
      double mi = 0, mr = 0;
      for (int u : ui) mi += u;
      for (int u : ur) mr += u;
      rep.rows.push_back({static_cast<double>(n), mi / ui.size(), mr / ur.size(),
                          expected_u_rlnc(cfg.kt, cfg.pe, n)});
    }
    return rep;
  }

  if (exp == "fig3") {
    Rng rng(cfg.seed);
    auto sfm = generate_sfm(cfg.kt, cfg.n, cfg.pe, rng);
    if (sfm.n_packets == 0)
      throw std::runtime_error("fig3: sampled SFM is empty, change the seed");
    auto demands = derive_demands(sfm);
    auto solved = solve_idnc(conflict_matrix(sfm), demands, cfg.solver);
    auto v_idnc = v_idnc_pdf(sfm, solved.chosen, cfg.pe);
    auto v_rlnc = v_rlnc_pdf(demands, cfg.pe);
    auto vi = run_trials<int>(cfg.trials, cfg.seed + 1, cfg.workers,
                              [&](int, Rng& r) {
                                auto tr = run_semi_online_idnc(
                                    sfm, ErasureSchedule::random(cfg.pe), r,
                                    cfg.solver);
                                return tr.v_per_round.front();
                              });
    auto vr = run_trials<int>(cfg.trials, cfg.seed + 2, cfg.workers,
                              [&](int, Rng& r) {
                                auto tr = run_rlnc(
                                    sfm, ErasureSchedule::random(cfg.pe), r);
                                return tr.v_per_round.front();
                              });
    auto ei = empirical_pdf(vi);
    auto er = empirical_pdf(vr);
    rep.columns = {"V", "v_idnc_analytical", "v_idnc_empirical",
                   "v_rlnc_analytical", "v_rlnc_empirical"};
    int hi = std::max({v_idnc.support_max(), v_rlnc.support_max(),
                       ei.support_max(), er.support_max()});
    for (int v = 0; v <= hi; ++v)
      rep.rows.push_back({static_cast<double>(v), v_idnc.at_value(v),
                          ei.at_value(v), v_rlnc.at_value(v), er.at_value(v)});
    rep.extra = {{"mse_idnc", pdf_mse(v_idnc, ei)},
                 {"mse_rlnc", pdf_mse(v_rlnc, er)},
                 {"u_idnc", solved.chosen.sets.size()},
                 {"u_rlnc", demands.w_max}};
    return rep;
  }

  if (exp == "fig4") {
    std::vector<int> ns = cfg.n_range.empty() ? std::vector<int>{5, 15, 20, 30}
                                              : cfg.n_range;
    rep.columns = {"N", "H", "h_idnc", "h_rlnc"};
    for (std::size_t i = 0; i < ns.size(); ++i) {
      int n = ns[i];
      std::uint64_t s = cfg.seed + i * 0x51ed270bULL;
      struct Pair {
        std::vector<double> hi, hr;
      };
      auto samples = run_trials<Pair>(cfg.trials, s, cfg.workers,
                                      [&](int, Rng& rng) {
        Pair p;
        auto sfm = generate_sfm(cfg.kt, n, cfg.pe, rng);
        if (sfm.n_packets == 0) {
          p.hi = {1.0};
          p.hr = {1.0};
          return p;
        }
        auto demands = derive_demands(sfm);
        auto solved = solve_idnc(conflict_matrix(sfm), demands, cfg.solver);
        auto hi = shifted_h_pdf(static_cast<int>(solved.chosen.sets.size()),
                                v_idnc_pdf(sfm, solved.chosen, cfg.pe));
        auto hr = shifted_h_pdf(demands.w_max, v_rlnc_pdf(demands, cfg.pe));
        p.hi.assign(hi.support_max() + 1, 0.0);
        for (int v = 0; v <= hi.support_max(); ++v) p.hi[v] = hi.at_value(v);
        p.hr.assign(hr.support_max() + 1, 0.0);
        for (int v = 0; v <= hr.support_max(); ++v) p.hr[v] = hr.at_value(v);
        return p;
      });
      std::vector<double> hi, hr;
      for (const auto& p : samples) {
        if (p.hi.size() > hi.size()) hi.resize(p.hi.size(), 0.0);
        if (p.hr.size() > hr.size()) hr.resize(p.hr.size(), 0.0);
        for (std::size_t v = 0; v < p.hi.size(); ++v) hi[v] += p.hi[v];
        for (std::size_t v = 0; v < p.hr.size(); ++v) hr[v] += p.hr[v];
      }
      for (auto& x : hi) x /= cfg.trials;
      for (auto& x : hr) x /= cfg.trials;
      std::size_t len = std::max(hi.size(), hr.size());
      for (std::size_t h = 0; h < len; ++h)
        rep.rows.push_back({static_cast<double>(n), static_cast<double>(h),
                            h < hi.size() ? hi[h] : 0.0,
                            h < hr.size() ? hr[h] : 0.0});
    }
    return rep;
  }

  if (exp == "fig5") {
    std::vector<int> ns = cfg.n_range;
    if (ns.empty())
      for (int n = 1; n <= 45; n += 2) ns.push_back(n);
    rep.columns = {"N", "E_L_idnc", "E_L_rlnc"};
    for (std::size_t i = 0; i < ns.size(); ++i) {
      int n = ns[i];
      std::uint64_t s = cfg.seed + i * 0x2545f491ULL;
      auto ds = run_trials<detail::DelaySample>(
          cfg.trials, s, cfg.workers,
          [&](int, Rng& rng) { return detail::sample_delays(cfg, n, rng); });
      double li = 0, lr = 0;
      int valid = 0;
      for (const auto& d : ds)
        if (d.valid) {
          li += d.l_idnc;
          lr += d.l_rlnc;
          ++valid;
        }
      if (valid == 0) throw std::runtime_error("fig5: all sampled SFMs empty");
      rep.rows.push_back({static_cast<double>(n), li / valid, lr / valid});
    }
    return rep;
  }

  if (exp == "example1") {
    auto c = fixtures::example1_conflicts();
    auto sets = maximal_encoding_sets(c);
    detail::require(sets.size() == 4, "example1 maximal set count");
    auto minimal = minimal_collections(sets, c.n_packets);
    detail::require(minimal.size() == 1 && minimal[0].sets.size() == 3,
                    "example1 minimal collection");
    auto greedy = greedy_collection(sets, c.n_packets);
    detail::require(greedy.sets.size() == 4, "example1 greedy size");
    nlohmann::json jsets = nlohmann::json::array();
    for (const auto& s : sets) jsets.push_back(s.packets);
    nlohmann::json jmin = nlohmann::json::array();
    for (const auto& s : minimal[0].sets) jmin.push_back(s.packets);
    rep.extra = {{"maximal_sets", jsets},
                 {"minimal_collection", jmin},
                 {"u_idnc", 3},
                 {"greedy_size", greedy.sets.size()}};
    return rep;
  }

  if (exp == "example3") {
    auto sfm = fixtures::example3_sfm();
    auto demands = derive_demands(sfm);
    auto solved = solve_idnc(conflict_matrix(sfm), demands);
    detail::require(solved.minimal.size() == 1 && solved.chosen.sets.size() == 3,
                    "example3 minimal collection");
    std::vector<long long> benefits;
    std::uint64_t placed = 0;
    for (const auto& s : solved.chosen.sets) {
      long long b = 0;
      for (int p : s.packets)
        if (!(placed >> p & 1))
          b += static_cast<long long>(demands.targets[p].size());
      placed |= s.mask;
      benefits.push_back(b);
    }
    detail::require(benefits == std::vector<long long>{5, 5, 3},
                    "example3 ordering benefits");
    nlohmann::json jorder = nlohmann::json::array();
    for (const auto& s : solved.chosen.sets) jorder.push_back(s.packets);
    rep.extra = {{"ordered_collection", jorder},
                 {"benefits", benefits},
                 {"t_total", demands.t_total}};
    return rep;
  }

  if (exp == "example4") {
    auto sfm = fixtures::example3_sfm();
    auto demands = derive_demands(sfm);
    auto solved = solve_idnc(conflict_matrix(sfm), demands);
    auto idnc = idnc_delay_report(demands, solved.chosen, 0.0);
    auto rlnc = rlnc_delay_report(demands, 0.0);
    Rng rng(cfg.seed);
    auto tr_i =
        run_semi_online_idnc(sfm, ErasureSchedule::random(0.0), rng);
    auto tr_r = run_rlnc(sfm, ErasureSchedule::random(0.0), rng);
    detail::require(std::abs(idnc.mean_delay - 24.0 / 13.0) < 1e-12,
                    "example4 L_IDNC analytical");
    detail::require(std::abs(rlnc.mean_delay - 35.0 / 13.0) < 1e-12,
                    "example4 L_RLNC analytical");
    detail::require(std::abs(tr_i.average_delay() - 24.0 / 13.0) < 1e-12,
                    "example4 L_IDNC trace");
    detail::require(std::abs(tr_r.average_delay() - 35.0 / 13.0) < 1e-12,
                    "example4 L_RLNC trace");
    rep.extra = {{"L_IDNC", idnc.mean_delay},
                 {"L_RLNC", rlnc.mean_delay},
                 {"idnc", delay_report_to_json(idnc)},
                 {"rlnc", delay_report_to_json(rlnc)}};
    return rep;
  }

  if (exp == "appendixC") {
    auto sfm = fixtures::pairwise_conflict_sfm();
    auto sched = fixtures::feedback_comparison_schedule();
    Rng rng(cfg.seed);
    auto semi = run_semi_online_idnc(sfm, sched, rng);
    auto online = run_fully_online_idnc(sfm, sched, rng);
    detail::require(semi.total_slots() == 5, "appendixC semi-online slots");
    detail::require(online.total_slots() == 4, "appendixC fully-online slots");
    rep.extra = {{"semi_online", semi.total_slots()},
                 {"fully_online", online.total_slots()},
                 {"semi_trace", trace_to_json(semi)},
                 {"online_trace", trace_to_json(online)}};
    return rep;
  }

  if (exp == "custom") {
    Rng rng(cfg.seed);
    auto sfm = generate_sfm(cfg.kt, cfg.n, cfg.pe, rng);
    if (sfm.n_packets == 0) {
      rep.extra = {{"k", 0}, {"note", "no packets wanted after systematic phase"}};
      return rep;
    }
    auto demands = derive_demands(sfm);
    auto solved = solve_idnc(conflict_matrix(sfm), demands, cfg.solver);
    auto v_i = v_idnc_pdf(sfm, solved.chosen, cfg.pe);
    auto v_r = v_rlnc_pdf(demands, cfg.pe);
    nlohmann::json jcoll = nlohmann::json::array();
    for (const auto& s : solved.chosen.sets) jcoll.push_back(s.packets);
    rep.extra = {{"k", sfm.n_packets},
                 {"u_idnc", solved.chosen.sets.size()},
                 {"u_rlnc", demands.w_max},
                 {"suboptimal", solved.suboptimal},
                 {"collection", jcoll},
                 {"v_idnc", distribution_to_json(v_i)},
                 {"v_rlnc", distribution_to_json(v_r)},
                 {"E_L_idnc",
                  idnc_delay_report(demands, solved.chosen, cfg.pe).mean_delay},
                 {"E_L_rlnc", rlnc_delay_report(demands, cfg.pe).mean_delay}};
    return rep;
  }

  throw std::invalid_argument("run_experiment: unknown experiment " + exp);
}

}  // namespace ncomp
