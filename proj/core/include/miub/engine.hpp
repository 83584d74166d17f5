#pragma once

// Cycle-exact timing model of the analysed platform: blocking in-order cores,
// a shared direct-mapped L2 behind a single arbitrated port, and one memory
// bank that services a miss in exactly l_mem cycles.
//
// Timing rules
//  * A core issues its next access `gap_before` cycles after the previous one
//    completed. The request arrives at the arbiter in the issue cycle.
//  * The L2 lookup happens when the arbiter grants the request. A hit holds the
//    port for l_hit cycles; a miss holds it for l_mem cycles and installs the
//    line (evicting the set's resident line) at completion.
//  * A service that completes at cycle c frees the port for a grant at c, and a
//    request arriving at c is eligible at c.
//  * Stall of an access = grant cycle - arrival cycle (queueing delay only).
//  * Phase-locked adversaries issue request i in the cycle the target issues
//    a_i, or at their own previous completion if that is later.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "miub/model.hpp"

namespace miub {

enum class ConflictClass { EvictingConflict, NoInteraction, SharedLine };

const char* conflict_class_name(ConflictClass c);

ConflictClass classify_conflict(Address adversary_address, Address target_address,
                                const CacheGeometry& geometry);

enum class Outcome { Hit, Miss };

struct AccessRecord {
  std::size_t index = 0;
  Address address = 0;
  bool critical = false;
  Cycle issue_cycle = 0;
  Outcome outcome = Outcome::Miss;
  Cycle grant_cycle = 0;
  Cycle complete_cycle = 0;
  Cycle stall = 0;

  friend bool operator==(const AccessRecord&, const AccessRecord&) = default;
};

enum class EventKind { Arrive, GrantHit, GrantMiss, Complete };

const char* event_kind_name(EventKind kind);

struct Event {
  Cycle cycle = 0;
  EventKind kind = EventKind::Arrive;
  CoreId core = 0;
  Address address = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Port occupancy of one granted request, any core.
struct ServiceInterval {
  CoreId core = 0;
  std::size_t access_index = 0;
  Cycle arrival = 0;
  Cycle start = 0;
  Cycle end = 0;
  Outcome outcome = Outcome::Miss;

  friend bool operator==(const ServiceInterval&, const ServiceInterval&) = default;
};

struct SimResult {
  std::vector<AccessRecord> per_access;  // target accesses, trace order
  Cycle total_interference_critical = 0;
  Cycle total_interference_all = 0;
  // Sum of (l_mem - l_hit) over target accesses that miss here but hit in
  // isolation. Reported beside the interference totals, never added to them.
  Cycle conversion_penalty = 0;
  Cycle max_stall = 0;
  std::vector<ServiceInterval> services;  // grant order
  std::vector<Event> event_log;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

struct SimOptions {
  // Simulated cycles allowed past the earliest start before the run is
  // declared runaway.
  Cycle cycle_budget = Cycle{1} << 40;
  bool record_events = true;
  bool compute_conversion_penalty = true;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws SimulationError when the hardware, policy or configuration is not
/// admissible, or when the run exceeds the cycle budget.
SimResult simulate(const HardwareConfig& hw, const TaskTrace& task, const AdversarialConfig& config,
                   const ArbitrationPolicy& policy, const SimOptions& options = {});

/// The target alone on the platform; every stall is zero.
SimResult isolation_run(const HardwareConfig& hw, const TaskTrace& task, const SimOptions& options = {});

}  // namespace miub
