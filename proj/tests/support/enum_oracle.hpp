#pragma once

// Brute-force listing of a search space by nested recursion, written directly
// from the admissibility rules rather than from the mixed-radix index.

#include <string>
#include <vector>

#include "miub/adversary.hpp"

namespace oracle {

inline std::string key(const miub::AdversarialConfig& cfg) {
  std::string k = cfg.sync_mode == miub::SyncMode::PhaseLocked ? "P" : "F";
  for (const auto& a : cfg.adversaries) {
    k += "|" + std::to_string(a.start_offset) + ":";
    for (const auto& x : a.trace.accesses) k += std::to_string(x.address) + "+" + std::to_string(x.gap_before) + ",";
  }
  return k;
}

inline void traces_of_len(const miub::SearchSpace& s, std::size_t len, bool with_gaps, miub::TaskTrace& cur,
                          std::vector<miub::TaskTrace>& out) {
  if (cur.size() == len) {
    out.push_back(cur);
    return;
  }
  const std::vector<miub::Cycle> gaps = (with_gaps && !cur.empty()) ? s.gap_grid : std::vector<miub::Cycle>{0};
  for (auto a : s.address_universe) {
    for (auto g : gaps) {
      cur.accesses.push_back(miub::Access{a, g, false});
      traces_of_len(s, len, with_gaps, cur, out);
      cur.accesses.pop_back();
    }
  }
}

inline std::vector<miub::Adversary> adversary_choices(const miub::SearchSpace& s, miub::SyncMode mode) {
  std::vector<miub::Adversary> out;
  miub::TaskTrace cur;
  if (mode == miub::SyncMode::PhaseLocked) {
    out.push_back(miub::Adversary{});
    if (s.target_length >= 1 && s.target_length <= s.max_adversary_trace_len) {
      std::vector<miub::TaskTrace> ts;
      traces_of_len(s, s.target_length, false, cur, ts);
      for (auto& t : ts) out.push_back(miub::Adversary{t, 0});
    }
    return out;
  }
  for (std::size_t len = 0; len <= s.max_adversary_trace_len; ++len) {
    std::vector<miub::TaskTrace> ts;
    traces_of_len(s, len, true, cur, ts);
    for (const auto& t : ts) {
      for (auto off : s.offset_grid) out.push_back(miub::Adversary{t, off});
    }
  }
  return out;
}

inline void product(const std::vector<miub::Adversary>& choices, std::size_t n_adv, miub::AdversarialConfig& cur,
                    std::vector<miub::AdversarialConfig>& out) {
  if (cur.adversaries.size() == n_adv) {
    out.push_back(cur);
    return;
  }
  for (const auto& c : choices) {
    cur.adversaries.push_back(c);
    product(choices, n_adv, cur, out);
    cur.adversaries.pop_back();
  }
}

inline std::vector<miub::AdversarialConfig> brute_force_configs(const miub::SearchSpace& s) {
  std::vector<miub::AdversarialConfig> out;
  for (auto mode : {miub::SyncMode::PhaseLocked, miub::SyncMode::FreeRunning}) {
    bool wanted = false;
    for (auto m : s.sync_modes) wanted = wanted || m == mode;
    if (!wanted) continue;
    const auto choices = adversary_choices(s, mode);
    if (choices.empty()) continue;
    miub::AdversarialConfig cur;
    cur.sync_mode = mode;
    product(choices, s.n_cores - 1, cur, out);
  }
  return out;
}

}  // namespace oracle
