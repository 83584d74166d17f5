#pragma once

// Domain types for the analysed system: platform invariants, the target task's
// per-period access sequence, the adversarial configuration and the arbitration
// policy. Everything here is a plain value type.

#include <cstddef>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace miub {

using Cycle = std::int64_t;
using Address = std::uint64_t;
using CoreId = std::uint32_t;

/// Core 0 always hosts the task under analysis; adversaries occupy 1..N-1.
inline constexpr CoreId kTargetCore = 0;

struct CacheGeometry {
  std::uint64_t line_size_bytes = 64;
  std::uint64_t num_sets = 256;
  std::uint32_t associativity = 1;
  std::uint32_t mshr_count = 0;

  std::uint64_t set_stride() const { return line_size_bytes * num_sets; }

  friend bool operator==(const CacheGeometry&, const CacheGeometry&) = default;
};

struct HardwareConfig {
  std::uint32_t n_cores = 2;
  CacheGeometry geometry;
  Cycle l_mem = 40;   // fixed miss service time, write-back folded in
  Cycle l_hit = 0;
  std::uint32_t memory_banks = 1;

  friend bool operator==(const HardwareConfig&, const HardwareConfig&) = default;
};

struct DecomposedAddress {
  std::uint64_t tag = 0;
  std::uint64_t set_index = 0;
  std::uint64_t line_offset = 0;

  friend bool operator==(const DecomposedAddress&, const DecomposedAddress&) = default;
};

struct Access {
  Address address = 0;
  Cycle gap_before = 0;  // core-local computation before issue
  bool critical = false;

  friend bool operator==(const Access&, const Access&) = default;
};

struct TaskTrace {
  std::vector<Access> accesses;

  std::size_t size() const { return accesses.size(); }
  bool empty() const { return accesses.empty(); }
  std::size_t critical_count() const;

  friend bool operator==(const TaskTrace&, const TaskTrace&) = default;
};

enum class SyncMode { PhaseLocked, FreeRunning };

struct Adversary {
  TaskTrace trace;
  Cycle start_offset = 0;  // relative to the target's start at cycle 0

  friend bool operator==(const Adversary&, const Adversary&) = default;
};

/// Adversary k (0-based) runs on core k+1.
struct AdversarialConfig {
  std::vector<Adversary> adversaries;
  SyncMode sync_mode = SyncMode::PhaseLocked;

  friend bool operator==(const AdversarialConfig&, const AdversarialConfig&) = default;
};

// Arbitration policies. The set is closed; the engine dispatches on the variant.

/// Serves the target last among contending requests. Each adversary core may
/// overtake a waiting target request at most once (its one in-flight request);
/// `allow_reentry` lifts that limit so an adversary that re-issues while the
/// target still waits is again served first.
struct PessimisticForT {
  bool allow_reentry = false;
  friend bool operator==(const PessimisticForT&, const PessimisticForT&) = default;
};

struct RoundRobin {
  CoreId initial_pointer = kTargetCore;
  friend bool operator==(const RoundRobin&, const RoundRobin&) = default;
};

struct FixedPriority {
  std::vector<CoreId> order;  // highest priority first; a permutation of 0..N-1
  friend bool operator==(const FixedPriority&, const FixedPriority&) = default;
};

struct FifoAge {
  friend bool operator==(const FifoAge&, const FifoAge&) = default;
};

using ArbitrationPolicy = std::variant<PessimisticForT, RoundRobin, FixedPriority, FifoAge>;

std::string policy_name(const ArbitrationPolicy& policy);
const char* sync_mode_name(SyncMode mode);

// ---------------------------------------------------------------------------
// Validation

enum class Invariant {
  LineSize,
  NumSets,
  Associativity,
  Mshr,
  MemoryBanks,
  CoreCount,
  MissLatency,
  HitLatency,
  AdversaryCount,
  PhaseMismatch,
  NegativeGap,
  PolicyShape,
};

struct Violation {
  Invariant invariant;
  std::string what;    // short name, e.g. "set-associative L2"
  std::string clause;  // applicability condition the check enforces
};

struct ValidationResult {
  std::vector<Violation> violations;
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
  bool has(Invariant inv) const;
  std::string summary() const;
};

DecomposedAddress decompose(Address address, const CacheGeometry& geometry);

/// Line-aligned address for (tag, set). Throws std::out_of_range when the set
/// index is outside the geometry.
Address compose(std::uint64_t tag, std::uint64_t set_index, const CacheGeometry& geometry);

/// Same set, different tag: a fill of one evicts the other in a direct-mapped set.
bool congruent_different_tag(Address a, Address b, const CacheGeometry& geometry);

ValidationResult validate_hardware(const HardwareConfig& config);

/// Checks that a policy is well formed for `n_cores` (pointer range, priority
/// permutation).
ValidationResult validate_policy(const ArbitrationPolicy& policy, std::uint32_t n_cores);

/// Shape clauses only: adversary count and phase-locked trace lengths. The
/// behavioural clauses (one request in flight per core, fixed miss latency, no
/// other channels) hold by construction of the engine and are recorded as notes.
ValidationResult check_admissible(const AdversarialConfig& config, const TaskTrace& task,
                                  const HardwareConfig& hw);

}  // namespace miub
