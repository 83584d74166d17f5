#include "miub/model.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace miub {

namespace {

bool is_pow2(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

struct PolicyNamer {
  std::string operator()(const PessimisticForT& p) const {
    return p.allow_reentry ? "pessimistic_strict" : "pessimistic";
  }
  std::string operator()(const RoundRobin&) const { return "round_robin"; }
  std::string operator()(const FixedPriority&) const { return "fixed_priority"; }
  std::string operator()(const FifoAge&) const { return "fifo"; }
};

}  // namespace

std::size_t TaskTrace::critical_count() const {
  return static_cast<std::size_t>(
      std::count_if(accesses.begin(), accesses.end(), [](const Access& a) { return a.critical; }));
}

std::string policy_name(const ArbitrationPolicy& policy) { return std::visit(PolicyNamer{}, policy); }

const char* sync_mode_name(SyncMode mode) {
  return mode == SyncMode::PhaseLocked ? "phase_locked" : "free_running";
}

bool ValidationResult::has(Invariant inv) const {
  return std::any_of(violations.begin(), violations.end(),
                     [inv](const Violation& v) { return v.invariant == inv; });
}

std::string ValidationResult::summary() const {
  if (ok()) return "ok";
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].what << " (" << violations[i].clause << ")";
  }
  return os.str();
}

DecomposedAddress decompose(Address address, const CacheGeometry& geometry) {
  const std::uint64_t line = address / geometry.line_size_bytes;
  return DecomposedAddress{
      .tag = line / geometry.num_sets,
      .set_index = line % geometry.num_sets,
      .line_offset = address % geometry.line_size_bytes,
  };
}

Address compose(std::uint64_t tag, std::uint64_t set_index, const CacheGeometry& geometry) {
  if (set_index >= geometry.num_sets) {
    throw std::out_of_range("set index " + std::to_string(set_index) + " outside [0, " +
                            std::to_string(geometry.num_sets) + ")");
  }
  return tag * geometry.set_stride() + set_index * geometry.line_size_bytes;
}

bool congruent_different_tag(Address a, Address b, const CacheGeometry& geometry) {
  const auto da = decompose(a, geometry);
  const auto db = decompose(b, geometry);
  return da.set_index == db.set_index && da.tag != db.tag;
}

ValidationResult validate_hardware(const HardwareConfig& config) {
  ValidationResult r;
  const auto& g = config.geometry;
  if (!is_pow2(g.line_size_bytes)) {
    r.violations.push_back({Invariant::LineSize, "line size not a power of two",
                            "address decomposition needs power-of-two line size"});
  }
  if (!is_pow2(g.num_sets)) {
    r.violations.push_back({Invariant::NumSets, "set count not a power of two",
                            "address decomposition needs power-of-two set count"});
  }
  if (g.associativity != 1) {
    r.violations.push_back({Invariant::Associativity, "set-associative L2",
                            "bound requires a direct-mapped L2; multiple ways allow co-residence"});
  }
  if (g.mshr_count != 0) {
    r.violations.push_back({Invariant::Mshr, "MSHRs enabled",
                            "bound requires blocking misses; MSHRs allow parallel miss handling"});
  }
  if (config.memory_banks != 1) {
    r.violations.push_back({Invariant::MemoryBanks, "multi-bank memory",
                            "bound requires single-bank memory; banks allow concurrent service"});
  }
  if (config.n_cores < 1) {
    r.violations.push_back({Invariant::CoreCount, "no cores", "at least the target core is required"});
  }
  if (config.l_mem < 1) {
    r.violations.push_back({Invariant::MissLatency, "miss latency below one cycle",
                            "fixed miss latency must be a positive cycle count"});
  }
  if (config.l_hit < 0 || config.l_hit >= config.l_mem) {
    r.violations.push_back({Invariant::HitLatency, "hit latency out of range",
                            "hit latency must satisfy 0 <= l_hit < l_mem"});
  }
  return r;
}

ValidationResult validate_policy(const ArbitrationPolicy& policy, std::uint32_t n_cores) {
  ValidationResult r;
  if (const auto* rr = std::get_if<RoundRobin>(&policy)) {
    if (rr->initial_pointer >= n_cores) {
      r.violations.push_back({Invariant::PolicyShape, "round-robin pointer out of range",
                              "pointer must name an existing core"});
    }
  } else if (const auto* fp = std::get_if<FixedPriority>(&policy)) {
    std::vector<CoreId> sorted = fp->order;
    std::sort(sorted.begin(), sorted.end());
    bool perm = sorted.size() == n_cores;
    for (std::size_t i = 0; perm && i < sorted.size(); ++i) perm = sorted[i] == i;
    if (!perm) {
      r.violations.push_back({Invariant::PolicyShape, "priority order not a permutation",
                              "fixed priority order must list every core exactly once"});
    }
  }
  return r;
}

ValidationResult check_admissible(const AdversarialConfig& config, const TaskTrace& task,
                                  const HardwareConfig& hw) {
  ValidationResult r;
  const std::size_t expected = hw.n_cores >= 1 ? hw.n_cores - 1 : 0;
  if (config.adversaries.size() != expected) {
    r.violations.push_back({Invariant::AdversaryCount, "core count",
                            "expected " + std::to_string(expected) + " adversaries, one per non-target core, got " +
                                std::to_string(config.adversaries.size())});
  }
  if (config.sync_mode == SyncMode::PhaseLocked) {
    for (std::size_t k = 0; k < config.adversaries.size(); ++k) {
      const auto len = config.adversaries[k].trace.size();
      // An empty trace is an idle core and is admissible in either mode.
      if (len != 0 && len != task.size()) {
        r.violations.push_back({Invariant::PhaseMismatch, "phase mismatch",
                                "phase-locked adversary " + std::to_string(k + 1) + " has " +
                                    std::to_string(len) + " accesses, target has " +
                                    std::to_string(task.size())});
      }
    }
  }
  for (const auto& adv : config.adversaries) {
    for (const auto& a : adv.trace.accesses) {
      if (a.gap_before < 0) {
        r.violations.push_back({Invariant::NegativeGap, "negative gap",
                                "inter-access gaps must be non-negative"});
        break;
      }
    }
  }
  r.notes.push_back("one in-flight request per core: enforced by the blocking engine");
  r.notes.push_back("fixed miss latency: every miss is serviced in exactly l_mem cycles");
  r.notes.push_back("no out-of-model channels: the engine models only the shared L2/memory queue");
  return r;
}

}  // namespace miub
