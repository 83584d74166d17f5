#include "miub/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace miub {

namespace {

constexpr std::size_t kFailureCap = 50;

SimOptions quiet_options() {
  SimOptions o;
  o.record_events = false;
  o.compute_conversion_penalty = false;
  return o;
}

std::string hex(Address a) {
  std::ostringstream os;
  os << "0x" << std::hex << a;
  return os.str();
}

std::string describe_trace(const TaskTrace& t) {
  std::ostringstream os;
  os << "[";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) os << ", ";
    os << hex(t.accesses[i].address);
    if (t.accesses[i].gap_before != 0) os << "+" << t.accesses[i].gap_before;
  }
  os << "]";
  return os.str();
}

void note_stalls(LemmaReport& report, const SimResult& r, const std::string& context) {
  report.simulations++;
  report.max_access_stall = std::max(report.max_access_stall, r.max_stall);
  if (r.max_stall > report.per_access_bound) {
    report.fail(context + ": stall " + std::to_string(r.max_stall) + " exceeds per-access bound " +
                std::to_string(report.per_access_bound));
  }
}

struct Evaluation {
  Cycle critical = 0;
  Cycle max_stall = 0;
};

Evaluation evaluate(const HardwareConfig& hw, const TaskTrace& task, const AdversarialConfig& cfg,
                    const ArbitrationPolicy& policy) {
  const SimResult r = simulate(hw, task, cfg, policy, quiet_options());
  return {r.total_interference_critical, r.max_stall};
}

AdversarialConfig shrink(const HardwareConfig& hw, const TaskTrace& task, const ArbitrationPolicy& policy,
                         AdversarialConfig cfg, Cycle bound, Cycle access_bound) {
  const auto violates = [&](const AdversarialConfig& c) {
    const Evaluation e = evaluate(hw, task, c, policy);
    return e.critical > bound || e.max_stall > access_bound;
  };
  bool progress = true;
  while (progress) {
    progress = false;
    for (std::size_t k = 0; k < cfg.adversaries.size() && !progress; ++k) {
      auto& accesses = cfg.adversaries[k].trace.accesses;
      if (accesses.empty()) continue;
      if (cfg.sync_mode == SyncMode::PhaseLocked) {
        AdversarialConfig cand = cfg;
        cand.adversaries[k].trace.accesses.clear();
        if (violates(cand)) {
          cfg = std::move(cand);
          progress = true;
        }
        continue;
      }
      for (std::size_t j = accesses.size(); j-- > 0 && !progress;) {
        AdversarialConfig cand = cfg;
        auto& ca = cand.adversaries[k].trace.accesses;
        ca.erase(ca.begin() + static_cast<std::ptrdiff_t>(j));
        if (!ca.empty()) ca.front().gap_before = 0;
        if (violates(cand)) {
          cfg = std::move(cand);
          progress = true;
        }
      }
    }
  }
  return cfg;
}

// Adversary criticality flags carry no timing meaning.
bool same_schedule(const AdversarialConfig& a, const AdversarialConfig& b) {
  if (a.sync_mode != b.sync_mode || a.adversaries.size() != b.adversaries.size()) return false;
  for (std::size_t k = 0; k < a.adversaries.size(); ++k) {
    const auto& x = a.adversaries[k];
    const auto& y = b.adversaries[k];
    if (x.start_offset != y.start_offset || x.trace.size() != y.trace.size()) return false;
    for (std::size_t i = 0; i < x.trace.size(); ++i) {
      if (x.trace.accesses[i].address != y.trace.accesses[i].address ||
          x.trace.accesses[i].gap_before != y.trace.accesses[i].gap_before) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

Cycle miub_bound(std::uint32_t n_cores, Cycle l_mem, std::size_t crit_count) {
  if (n_cores == 0) return 0;
  return static_cast<Cycle>(crit_count) * static_cast<Cycle>(n_cores - 1) * l_mem;
}

void LemmaReport::fail(std::string what) {
  ++failure_count;
  if (failures.size() < kFailureCap) failures.push_back(std::move(what));
}

std::string describe(const AdversarialConfig& config) {
  std::ostringstream os;
  os << sync_mode_name(config.sync_mode) << " {";
  for (std::size_t k = 0; k < config.adversaries.size(); ++k) {
    if (k) os << "; ";
    os << "core " << k + 1 << ": " << describe_trace(config.adversaries[k].trace);
    if (config.sync_mode == SyncMode::FreeRunning) os << " @" << config.adversaries[k].start_offset;
  }
  os << "}";
  return os.str();
}

// ---------------------------------------------------------------------------

SearchReport verify_upper_bound(const SearchSpace& space_in, const TaskTrace& task, const ArbitrationPolicy& policy,
                                const SearchMode& mode, const VerifyOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  if (task.empty()) throw std::invalid_argument("target task has no accesses");

  SearchSpace space = space_in;
  space.target_length = task.size();
  const HardwareConfig hw = space.hardware();
  if (const auto v = validate_hardware(hw); !v.ok()) {
    throw std::invalid_argument("search space hardware invalid: " + v.summary());
  }
  if (const auto v = validate_policy(policy, hw.n_cores); !v.ok()) {
    throw std::invalid_argument("invalid policy: " + v.summary());
  }

  SearchReport report;
  report.space = space;
  report.policy = policy_name(policy);
  report.mode = mode;
  report.bound = miub_bound(hw.n_cores, hw.l_mem, task.critical_count());
  report.per_access_bound = per_access_bound(hw.n_cores, hw.l_mem);

  // Materialize the work list lazily for exhaustive mode, eagerly for sampling.
  std::optional<ConfigSpace> exhaustive;
  std::vector<AdversarialConfig> samples;
  std::uint64_t n = 0;
  if (mode.kind == SearchMode::Kind::Exhaustive) {
    exhaustive.emplace(enumerate_configs(space, options.budget));
    n = exhaustive->size();
    report.space_size = n;
  } else {
    if (mode.count > options.budget) throw BudgetExceeded(mode.count, options.budget);
    const ConfigSpace cs(space);
    report.space_size = cs.saturated() ? UINT64_MAX : cs.size();
    samples = sample_configs(space, mode.count, mode.seed);
    n = samples.size();
  }
  const auto config_at = [&](std::uint64_t i) { return exhaustive ? exhaustive->at(i) : samples[i]; };

  std::optional<AdversarialConfig> baseline;
  if (options.include_baseline && hw.n_cores >= 2) baseline = build_baseline(task, hw);

  std::vector<Evaluation> evals(n);
  std::vector<char> skipped(n, 0);
  {
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    const auto worker = [&] {
      try {
        for (std::uint64_t i = next++; i < n; i = next++) {
          const AdversarialConfig cfg = config_at(i);
          if (baseline && same_schedule(cfg, *baseline)) {
            skipped[i] = 1;
            continue;
          }
          evals[i] = evaluate(hw, task, cfg, policy);
        }
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
        next = n;
      }
    };
    const unsigned threads = std::max(1u, options.threads);
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);
  }

  const auto account = [&](const AdversarialConfig& cfg, const Evaluation& e) {
    report.configs_checked++;
    report.max_access_stall = std::max(report.max_access_stall, e.max_stall);
    if (!report.max_config || e.critical > report.max_observed) {
      report.max_observed = e.critical;
      report.max_config = cfg;
    }
    if (e.critical == report.bound) {
      report.attainer_count++;
      if (report.attainers.size() < options.attainer_cap) report.attainers.push_back(cfg);
    }
    if (e.critical > report.bound || e.max_stall > report.per_access_bound) {
      report.violation_count++;
      if (report.violations.size() < options.violation_cap) {
        Counterexample cx{cfg, e.critical, e.max_stall, cfg, e.critical, e.max_stall};
        if (options.shrink_counterexamples) {
          cx.minimized = shrink(hw, task, policy, cfg, report.bound, report.per_access_bound);
          const Evaluation m = evaluate(hw, task, cx.minimized, policy);
          cx.minimized_interference = m.critical;
          cx.minimized_max_stall = m.max_stall;
        }
        report.violations.push_back(std::move(cx));
      }
    }
  };

  if (baseline) {
    const Evaluation e = evaluate(hw, task, *baseline, policy);
    report.baseline_checked = true;
    report.baseline_interference = e.critical;
    report.baseline_attains = e.critical == report.bound;
    account(*baseline, e);
  }
  for (std::uint64_t i = 0; i < n; ++i) {
    if (!skipped[i]) account(config_at(i), evals[i]);
  }

  report.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

// ---------------------------------------------------------------------------

LemmaReport check_spatial_lemma(const HardwareConfig& hw, const std::vector<Address>& universe) {
  LemmaReport report;
  report.lemma = "spatial";
  report.per_access_bound = per_access_bound(hw.n_cores, hw.l_mem);
  if (hw.n_cores < 2) {
    report.fail("spatial check needs at least two cores");
    return report;
  }
  const auto& geom = hw.geometry;
  const ArbitrationPolicy policy = PessimisticForT{};
  const SimOptions opts = quiet_options();
  std::size_t counts[3] = {0, 0, 0};

  for (Address target : universe) {
    const auto target_set = decompose(target, geom).set_index;
    std::vector<Address> unused;
    for (Address u : universe) {
      if (decompose(u, geom).set_index != target_set &&
          std::find(unused.begin(), unused.end(), u) == unused.end()) {
        unused.push_back(u);
      }
    }
    // Adversary starts once the warm-up access has completed; the probe comes
    // after every adversary access (including the extras) has completed.
    const Cycle adv_start = hw.l_mem;
    const Cycle probe_gap = static_cast<Cycle>(unused.size() + 1) * hw.l_mem + 1;

    for (Address adversary : universe) {
      const ConflictClass cls = classify_conflict(adversary, target, geom);
      counts[static_cast<int>(cls)]++;
      report.cases_checked++;
      const std::string ctx = std::string(conflict_class_name(cls)) + " adversary " + hex(adversary) +
                              " target " + hex(target);

      const auto run = [&](bool warm, bool with_extras) {
        TaskTrace t;
        if (warm) t.accesses.push_back({target, 0, true});
        t.accesses.push_back({target, warm ? probe_gap : adv_start + probe_gap, true});
        AdversarialConfig cfg;
        cfg.sync_mode = SyncMode::FreeRunning;
        cfg.adversaries.resize(hw.n_cores - 1);
        cfg.adversaries[0].start_offset = adv_start;
        cfg.adversaries[0].trace.accesses.push_back({adversary, 0, false});
        if (with_extras) {
          for (Address u : unused) cfg.adversaries[0].trace.accesses.push_back({u, 0, false});
        }
        SimResult r = simulate(hw, t, cfg, policy, opts);
        SimResult iso = isolation_run(hw, t, opts);
        note_stalls(report, r, ctx);
        report.simulations++;
        return std::pair{std::move(r), std::move(iso)};
      };

      const auto [warm, warm_iso] = run(true, false);
      const auto [cold, cold_iso] = run(false, false);
      const Outcome warm_probe = warm.per_access.back().outcome;
      const Outcome cold_probe = cold.per_access.back().outcome;

      const bool misses_warm = warm_probe == Outcome::Miss;
      if (misses_warm != (cls == ConflictClass::EvictingConflict)) {
        report.fail(ctx + ": warm probe " + (misses_warm ? "missed" : "hit"));
      }
      const bool hits_after_fill = cold_probe == Outcome::Hit;
      if (hits_after_fill != (cls == ConflictClass::SharedLine)) {
        report.fail(ctx + ": cold probe " + (hits_after_fill ? "hit" : "missed"));
      }
      const bool same_as_isolation = warm_probe == warm_iso.per_access.back().outcome &&
                                     cold_probe == cold_iso.per_access.back().outcome;
      if (same_as_isolation != (cls == ConflictClass::NoInteraction)) {
        report.fail(ctx + ": isolation equivalence " + (same_as_isolation ? "held" : "broke"));
      }
      if (warm.total_interference_all != 0 || cold.total_interference_all != 0) {
        report.fail(ctx + ": probe stalled although the fill had completed");
      }

      if (!unused.empty()) {
        for (bool warm_start : {true, false}) {
          const auto& base = warm_start ? warm : cold;
          const auto [extra, extra_iso] = run(warm_start, true);
          (void)extra_iso;
          for (std::size_t i = 0; i < base.per_access.size(); ++i) {
            if (extra.per_access[i].stall != base.per_access[i].stall ||
                extra.per_access[i].outcome != base.per_access[i].outcome) {
              report.fail(ctx + ": accesses to unused sets changed target access " + std::to_string(i));
            }
          }
        }
      }
    }
  }
  report.notes.push_back("pairs: " + std::to_string(counts[0]) + " evicting, " + std::to_string(counts[1]) +
                         " no-interaction, " + std::to_string(counts[2]) + " shared-line");
  return report;
}

LemmaReport check_temporal_lemma(const HardwareConfig& hw, std::uint32_t r_adversaries,
                                 const std::vector<Cycle>& offset_grid) {
  LemmaReport report;
  report.lemma = "temporal";
  report.per_access_bound = per_access_bound(hw.n_cores, hw.l_mem);
  if (hw.n_cores == 0 || r_adversaries > hw.n_cores - 1) {
    report.fail("temporal check asks for " + std::to_string(r_adversaries) + " adversaries on " +
                std::to_string(hw.n_cores) + " cores");
    return report;
  }
  if (offset_grid.empty()) {
    report.fail("empty offset grid");
    return report;
  }
  const Cycle L = hw.l_mem;
  const Cycle sync_value = static_cast<Cycle>(r_adversaries) * L;
  const Address target_addr = compose(0, 0, hw.geometry);
  const TaskTrace task{{Access{target_addr, 0, true}}};
  const ArbitrationPolicy policy = PessimisticForT{};
  SimOptions opts = quiet_options();

  AdversarialConfig cfg;
  cfg.sync_mode = SyncMode::FreeRunning;
  cfg.adversaries.resize(hw.n_cores - 1);
  for (std::uint32_t m = 1; m <= r_adversaries; ++m) {
    cfg.adversaries[m - 1].trace.accesses.push_back({congruent_variant(target_addr, m, hw.geometry), 0, false});
  }

  std::vector<std::size_t> digits(r_adversaries, 0);
  Cycle max_seen = -1;
  std::vector<Cycle> max_at;
  bool zero_seen = false;
  while (true) {
    std::vector<Cycle> offsets(r_adversaries);
    for (std::uint32_t m = 0; m < r_adversaries; ++m) {
      offsets[m] = offset_grid[digits[m]];
      cfg.adversaries[m].start_offset = offsets[m];
    }
    std::ostringstream vec;
    vec << "(";
    for (std::size_t m = 0; m < offsets.size(); ++m) vec << (m ? "," : "") << offsets[m];
    vec << ")";

    const SimResult r = simulate(hw, task, cfg, policy, opts);
    note_stalls(report, r, "offsets " + vec.str());
    report.cases_checked++;

    const AccessRecord& t = r.per_access.front();
    const Cycle stall = t.stall;
    if (stall > sync_value) {
      report.fail("offsets " + vec.str() + ": stall " + std::to_string(stall) + " above synchronous value " +
                  std::to_string(sync_value));
    }
    const bool all_zero = std::all_of(offsets.begin(), offsets.end(), [](Cycle c) { return c == 0; });
    if (all_zero) {
      zero_seen = true;
      if (stall != sync_value) {
        report.fail("synchronous arrival gave stall " + std::to_string(stall) + ", expected " +
                    std::to_string(sync_value));
      }
    }
    if (stall > max_seen) {
      max_seen = stall;
      max_at = offsets;
    }

    // Per-adversary contribution: overlap of its service with the target's wait.
    Cycle contributed = 0;
    std::size_t rank = 0;
    for (const auto& s : r.services) {
      if (s.core == kTargetCore) continue;
      ++rank;
      const Cycle lo = std::max(s.start, t.issue_cycle);
      const Cycle hi = std::min(s.end, t.grant_cycle);
      const Cycle share = std::max<Cycle>(0, hi - lo);
      contributed += share;
      if (share > L) {
        report.fail("offsets " + vec.str() + ": core " + std::to_string(s.core) + " contributed " +
                    std::to_string(share) + " > l_mem");
      }
      const Cycle delta = cfg.adversaries[s.core - 1].start_offset;
      if (delta <= -static_cast<Cycle>(rank) * L && share != 0) {
        report.fail("offsets " + vec.str() + ": core " + std::to_string(s.core) + " served " +
                    std::to_string(rank) + " with offset " + std::to_string(delta) + " contributed " +
                    std::to_string(share));
      }
    }
    if (contributed != stall) {
      report.fail("offsets " + vec.str() + ": contributions sum to " + std::to_string(contributed) +
                  ", stall is " + std::to_string(stall));
    }

    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] == offset_grid.size()) digits[pos++] = 0;
    if (pos == digits.size()) break;
  }
  if (r_adversaries > 0 && !zero_seen) report.notes.push_back("offset grid does not contain the zero vector");
  std::ostringstream note;
  note << "max stall " << max_seen << " first reached at (";
  for (std::size_t m = 0; m < max_at.size(); ++m) note << (m ? "," : "") << max_at[m];
  note << "), synchronous value " << sync_value;
  report.notes.push_back(note.str());
  return report;
}

LemmaReport check_pattern_lemma(const HardwareConfig& hw, const TaskTrace& task) {
  LemmaReport report;
  report.lemma = "pattern";
  report.per_access_bound = per_access_bound(hw.n_cores, hw.l_mem);
  const Cycle expected_each = report.per_access_bound;
  const Cycle bound = miub_bound(hw.n_cores, hw.l_mem, task.critical_count());

  AdversarialConfig cfg;
  if (hw.n_cores >= 2) {
    cfg = build_baseline(task, hw);
  }
  const SimResult r = simulate(hw, task, cfg, PessimisticForT{}, quiet_options());
  note_stalls(report, r, "baseline");
  for (const auto& rec : r.per_access) {
    if (!rec.critical) continue;
    report.cases_checked++;
    if (rec.stall != expected_each) {
      report.fail("critical access " + std::to_string(rec.index) + " (" + hex(rec.address) + ") stalled " +
                  std::to_string(rec.stall) + ", expected " + std::to_string(expected_each));
    }
  }
  if (r.total_interference_critical != bound) {
    report.fail("critical interference " + std::to_string(r.total_interference_critical) + " != bound " +
                std::to_string(bound));
  }
  report.notes.push_back("critical interference " + std::to_string(r.total_interference_critical) + ", bound " +
                         std::to_string(bound));
  return report;
}

LemmaReport check_policy_dominance(const HardwareConfig& hw, const TaskTrace& task,
                                   const std::vector<AdversarialConfig>& configs, DominanceMetric metric) {
  LemmaReport report;
  report.lemma = "dominance";
  report.per_access_bound = per_access_bound(hw.n_cores, hw.l_mem);

  FixedPriority target_first;
  for (CoreId c = 0; c < hw.n_cores; ++c) target_first.order.push_back(c);
  const std::vector<std::pair<std::string, ArbitrationPolicy>> others = {
      {"round_robin@target", RoundRobin{kTargetCore}},
      {"fixed_priority(target first)", target_first},
      {"fifo", FifoAge{}},
  };
  const SimOptions opts = quiet_options();
  const auto value = [metric](const SimResult& r) {
    return metric == DominanceMetric::Critical ? r.total_interference_critical : r.total_interference_all;
  };

  std::vector<std::size_t> above(others.size(), 0);
  for (std::size_t i = 0; i < configs.size(); ++i) {
    const auto& cfg = configs[i];
    report.cases_checked++;
    const SimResult pess = simulate(hw, task, cfg, PessimisticForT{}, opts);
    note_stalls(report, pess, "config " + std::to_string(i) + " pessimistic");
    for (std::size_t k = 0; k < others.size(); ++k) {
      const auto& [name, policy] = others[k];
      const SimResult other = simulate(hw, task, cfg, policy, opts);
      note_stalls(report, other, "config " + std::to_string(i) + " " + name);
      if (value(other) > value(pess)) {
        ++above[k];
        report.fail("config " + std::to_string(i) + " " + describe(cfg) + ": " + name + " interference " +
                    std::to_string(value(other)) + " > pessimistic " + std::to_string(value(pess)));
      }
    }
  }
  for (std::size_t k = 0; k < others.size(); ++k) {
    report.notes.push_back(others[k].first + ": above pessimistic in " + std::to_string(above[k]) + " of " +
                           std::to_string(configs.size()) + " configurations");
  }
  return report;
}

}  // namespace miub
