#include "miub/engine.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "miub/arbiter.hpp"

namespace miub {

const char* conflict_class_name(ConflictClass c) {
  switch (c) {
    case ConflictClass::EvictingConflict: return "evicting_conflict";
    case ConflictClass::NoInteraction: return "no_interaction";
    case ConflictClass::SharedLine: return "shared_line";
  }
  return "?";
}

const char* event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::Arrive: return "arrive";
    case EventKind::GrantHit: return "grant_hit";
    case EventKind::GrantMiss: return "grant_miss";
    case EventKind::Complete: return "complete";
  }
  return "?";
}

ConflictClass classify_conflict(Address adversary_address, Address target_address,
                                const CacheGeometry& geometry) {
  const auto adv = decompose(adversary_address, geometry);
  const auto tgt = decompose(target_address, geometry);
  if (adv.set_index != tgt.set_index) return ConflictClass::NoInteraction;
  return adv.tag == tgt.tag ? ConflictClass::SharedLine : ConflictClass::EvictingConflict;
}

namespace {

constexpr Cycle kNever = std::numeric_limits<Cycle>::max();

struct CoreRun {
  enum class Phase { Idle, Pending, Busy };

  const TaskTrace* trace = nullptr;
  Cycle start_offset = 0;
  bool phase_locked = false;
  std::size_t next = 0;
  Phase phase = Phase::Idle;
  Cycle last_complete = 0;
  Cycle arrival = 0;

  bool finished() const { return next >= trace->size(); }
  const Access& current() const { return trace->accesses[next]; }
};

class Engine {
 public:
  Engine(const HardwareConfig& hw, const ArbitrationPolicy& policy, const SimOptions& options,
         std::vector<CoreRun> cores)
      : hw_(hw),
        policy_(policy),
        options_(options),
        cores_(std::move(cores)),
        arbiter_(hw.n_cores, policy),
        resident_(hw.geometry.num_sets),
        target_issue_(cores_.front().trace->size()) {
    const auto& target = *cores_.front().trace;
    result_.per_access.resize(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) {
      result_.per_access[i].index = i;
      result_.per_access[i].address = target.accesses[i].address;
      result_.per_access[i].critical = target.accesses[i].critical;
    }
  }

  SimResult run() {
    Cycle start = kNever;
    for (CoreId c = 0; c < cores_.size(); ++c) start = std::min(start, ready_time(c));
    Cycle t = start;
    while (true) {
      Cycle next = busy_ ? busy_until_ : kNever;
      for (CoreId c = 0; c < cores_.size(); ++c) next = std::min(next, ready_time(c));
      if (next == kNever) break;
      t = next;
      if (t - start > options_.cycle_budget) {
        throw SimulationError("simulation exceeded cycle budget of " + std::to_string(options_.cycle_budget) +
                              " cycles");
      }
      settle(t);
    }
    if (!pending_.empty() || busy_) throw SimulationError("engine stopped with requests outstanding");

    for (const auto& rec : result_.per_access) {
      result_.total_interference_all += rec.stall;
      if (rec.critical) result_.total_interference_critical += rec.stall;
      result_.max_stall = std::max(result_.max_stall, rec.stall);
    }
    return std::move(result_);
  }

 private:
  Cycle ready_time(CoreId c) const {
    const CoreRun& core = cores_[c];
    if (core.phase != CoreRun::Phase::Idle || core.finished()) return kNever;
    if (core.phase_locked) {
      const auto& issued = target_issue_[core.next];
      if (!issued) return kNever;
      return core.next == 0 ? *issued : std::max(*issued, core.last_complete);
    }
    const Cycle base = core.next == 0 ? core.start_offset : core.last_complete;
    return base + core.current().gap_before;
  }

  void log(Cycle t, EventKind kind, CoreId core, Address address) {
    if (options_.record_events) result_.event_log.push_back(Event{t, kind, core, address});
  }

  void settle(Cycle t) {
    bool progress = true;
    while (progress) {
      progress = false;
      if (busy_ && busy_until_ == t) {
        complete(t);
        progress = true;
      }
      for (CoreId c = 0; c < cores_.size(); ++c) {
        if (ready_time(c) == t) {
          issue(c, t);
          progress = true;
        }
      }
      if (!busy_ && !pending_.empty()) {
        grant(t);
        progress = true;
      }
    }
  }

  void issue(CoreId c, Cycle t) {
    CoreRun& core = cores_[c];
    core.phase = CoreRun::Phase::Pending;
    core.arrival = t;
    // Kept sorted by core id so arbitration never depends on insertion order.
    const auto pos = std::lower_bound(pending_.begin(), pending_.end(), c,
                                      [](const PendingRequest& p, CoreId id) { return p.core < id; });
    pending_.insert(pos, PendingRequest{c, t});
    if (c == kTargetCore) {
      target_issue_[core.next] = t;
      result_.per_access[core.next].issue_cycle = t;
    }
    log(t, EventKind::Arrive, c, core.current().address);
  }

  void grant(Cycle t) {
    const CoreId c = arbiter_.select(pending_, policy_);
    const auto it = std::find_if(pending_.begin(), pending_.end(),
                                 [c](const PendingRequest& p) { return p.core == c; });
    pending_.erase(it);

    CoreRun& core = cores_[c];
    const auto addr = decompose(core.current().address, hw_.geometry);
    const auto& line = resident_[addr.set_index];
    const bool hit = line.has_value() && *line == addr.tag;
    const Cycle service = hit ? hw_.l_hit : hw_.l_mem;

    core.phase = CoreRun::Phase::Busy;
    busy_ = true;
    busy_until_ = t + service;
    in_service_ = c;
    in_service_hit_ = hit;
    arbiter_.record_service(c, busy_until_);

    const Outcome outcome = hit ? Outcome::Hit : Outcome::Miss;
    result_.services.push_back(ServiceInterval{c, core.next, core.arrival, t, busy_until_, outcome});
    if (c == kTargetCore) {
      auto& rec = result_.per_access[core.next];
      rec.grant_cycle = t;
      rec.outcome = outcome;
      rec.stall = t - core.arrival;
    }
    log(t, hit ? EventKind::GrantHit : EventKind::GrantMiss, c, core.current().address);
  }

  void complete(Cycle t) {
    CoreRun& core = cores_[in_service_];
    const Address address = core.current().address;
    if (!in_service_hit_) {
      const auto addr = decompose(address, hw_.geometry);
      resident_[addr.set_index] = addr.tag;
    }
    if (in_service_ == kTargetCore) result_.per_access[core.next].complete_cycle = t;
    log(t, EventKind::Complete, in_service_, address);

    core.phase = CoreRun::Phase::Idle;
    core.last_complete = t;
    ++core.next;
    busy_ = false;
  }

  const HardwareConfig& hw_;
  const ArbitrationPolicy& policy_;
  const SimOptions& options_;
  std::vector<CoreRun> cores_;
  ArbiterState arbiter_;
  std::vector<std::optional<std::uint64_t>> resident_;  // tag per set, cold at start
  std::vector<std::optional<Cycle>> target_issue_;
  std::vector<PendingRequest> pending_;
  bool busy_ = false;
  Cycle busy_until_ = 0;
  CoreId in_service_ = 0;
  bool in_service_hit_ = false;
  SimResult result_;
};

void require_valid_hardware(const HardwareConfig& hw) {
  const auto v = validate_hardware(hw);
  if (!v.ok()) throw SimulationError("hardware outside the supported class: " + v.summary());
}

void require_valid_task(const TaskTrace& task) {
  for (std::size_t i = 0; i < task.size(); ++i) {
    if (task.accesses[i].gap_before < 0) {
      throw SimulationError("target access " + std::to_string(i) + " has a negative gap");
    }
  }
}

}  // namespace

SimResult simulate(const HardwareConfig& hw, const TaskTrace& task, const AdversarialConfig& config,
                   const ArbitrationPolicy& policy, const SimOptions& options) {
  require_valid_hardware(hw);
  require_valid_task(task);
  if (const auto v = validate_policy(policy, hw.n_cores); !v.ok()) {
    throw SimulationError("invalid arbitration policy: " + v.summary());
  }
  if (const auto v = check_admissible(config, task, hw); !v.ok()) {
    throw SimulationError("configuration not admissible: " + v.summary());
  }

  std::vector<CoreRun> cores;
  cores.reserve(hw.n_cores);
  cores.push_back(CoreRun{.trace = &task});
  for (const auto& adv : config.adversaries) {
    cores.push_back(CoreRun{.trace = &adv.trace,
                            .start_offset = adv.start_offset,
                            .phase_locked = config.sync_mode == SyncMode::PhaseLocked});
  }

  SimResult result = Engine(hw, policy, options, std::move(cores)).run();

  if (options.compute_conversion_penalty) {
    SimOptions iso_opts = options;
    iso_opts.record_events = false;
    const SimResult iso = isolation_run(hw, task, iso_opts);
    for (std::size_t i = 0; i < result.per_access.size(); ++i) {
      if (result.per_access[i].outcome == Outcome::Miss && iso.per_access[i].outcome == Outcome::Hit) {
        result.conversion_penalty += hw.l_mem - hw.l_hit;
      }
    }
  }
  return result;
}

SimResult isolation_run(const HardwareConfig& hw, const TaskTrace& task, const SimOptions& options) {
  require_valid_hardware(hw);
  require_valid_task(task);
  std::vector<CoreRun> cores;
  cores.push_back(CoreRun{.trace = &task});
  const ArbitrationPolicy policy = PessimisticForT{};
  return Engine(hw, policy, options, std::move(cores)).run();
}

}  // namespace miub
