#pragma once

// Bound formula and the executable checks around it: exhaustive or sampled
// search for configurations exceeding the bound, plus behavioural checks of the
// spatial, temporal and pattern properties the bound is built from.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "miub/adversary.hpp"
#include "miub/engine.hpp"
#include "miub/model.hpp"

namespace miub {

/// crit_count * (n_cores - 1) * l_mem.
Cycle miub_bound(std::uint32_t n_cores, Cycle l_mem, std::size_t crit_count);

/// Largest stall any single access can see: (n_cores - 1) * l_mem.
inline Cycle per_access_bound(std::uint32_t n_cores, Cycle l_mem) { return miub_bound(n_cores, l_mem, 1); }

struct SearchMode {
  enum class Kind { Exhaustive, Sampled };
  Kind kind = Kind::Exhaustive;
  std::size_t count = 0;
  std::uint64_t seed = 0;

  static SearchMode exhaustive() { return {}; }
  static SearchMode sampled(std::size_t count, std::uint64_t seed) { return {Kind::Sampled, count, seed}; }
};

struct VerifyOptions {
  std::uint64_t budget = 1'000'000;
  unsigned threads = 1;
  std::size_t attainer_cap = 100;
  std::size_t violation_cap = 100;
  bool include_baseline = true;
  bool shrink_counterexamples = true;
};

struct Counterexample {
  AdversarialConfig config;
  Cycle interference = 0;  // critical total
  Cycle max_stall = 0;
  AdversarialConfig minimized;
  Cycle minimized_interference = 0;
  Cycle minimized_max_stall = 0;
};

struct SearchReport {
  SearchSpace space;
  std::string policy;
  SearchMode mode;
  std::uint64_t space_size = 0;

  Cycle bound = 0;
  Cycle per_access_bound = 0;
  Cycle max_observed = 0;
  std::optional<AdversarialConfig> max_config;
  Cycle max_access_stall = 0;

  std::vector<AdversarialConfig> attainers;  // capped
  std::uint64_t attainer_count = 0;
  std::vector<Counterexample> violations;    // capped
  std::uint64_t violation_count = 0;
  std::uint64_t configs_checked = 0;

  bool baseline_checked = false;
  Cycle baseline_interference = 0;
  bool baseline_attains = false;

  double elapsed_seconds = 0.0;  // wall time; not part of any canonical output

  bool passed() const { return violation_count == 0; }
};

/// Simulates every configuration of the space (or `mode.count` samples of it)
/// against `task`, tracking the critical interference total. A configuration
/// violates when its total exceeds the bound or any single stall exceeds the
/// per-access bound. With `threads` > 1 configurations are simulated in
/// parallel; the reduction runs in canonical order, so the report does not
/// depend on the thread count.
///
/// Throws std::invalid_argument for an empty task or a space whose hardware
/// fails validation, and BudgetExceeded for oversized exhaustive searches.
SearchReport verify_upper_bound(const SearchSpace& space, const TaskTrace& task, const ArbitrationPolicy& policy,
                                const SearchMode& mode, const VerifyOptions& options = {});

struct LemmaReport {
  std::string lemma;  // "spatial", "temporal", "pattern", "dominance"
  std::size_t cases_checked = 0;
  std::size_t simulations = 0;
  std::size_t failure_count = 0;
  std::vector<std::string> failures;  // first few counterexamples, human readable
  std::vector<std::string> notes;
  Cycle max_access_stall = 0;  // across every simulation the check ran
  Cycle per_access_bound = 0;

  bool passed() const { return failure_count == 0; }
  void fail(std::string what);
};

/// Every (adversary address, target address) pair of `universe` in a warm and a
/// cold two-access scenario: the target misses iff the pair is an evicting
/// conflict, hits after a completed fill iff it is a shared line, and matches
/// isolation in both scenarios iff there is no interaction. Also checks that
/// extra adversary accesses to sets the target does not use change no stall and
/// no outcome of the target.
LemmaReport check_spatial_lemma(const HardwareConfig& hw, const std::vector<Address>& universe);

/// One critical target access at cycle 0 against `r_adversaries` congruent
/// single-access adversaries, each offset swept over `offset_grid`. The stall
/// never exceeds r * l_mem, equals it when every offset is zero, and an
/// adversary served m-th with offset <= -m * l_mem contributes nothing.
LemmaReport check_temporal_lemma(const HardwareConfig& hw, std::uint32_t r_adversaries,
                                 const std::vector<Cycle>& offset_grid);

/// Baseline configuration under PessimisticForT: every critical stall equals
/// (N-1) * l_mem and the critical total equals the bound.
LemmaReport check_pattern_lemma(const HardwareConfig& hw, const TaskTrace& task);

/// Interference metric compared by check_policy_dominance.
enum class DominanceMetric { Critical, All };

/// For each configuration, interference under PessimisticForT is at least the
/// interference under round-robin starting at the target, fixed priority with
/// the target first, and FIFO (ties to the target).
LemmaReport check_policy_dominance(const HardwareConfig& hw, const TaskTrace& task,
                                   const std::vector<AdversarialConfig>& configs,
                                   DominanceMetric metric = DominanceMetric::Critical);

std::string describe(const AdversarialConfig& config);

}  // namespace miub
