#pragma once

#include <optional>
#include <span>
#include <vector>

#include "miub/model.hpp"

namespace miub {

struct PendingRequest {
  CoreId core = 0;
  Cycle arrival = 0;
};

/// Mutable state carried between grants of one memory unit.
class ArbiterState {
 public:
  ArbiterState() = default;
  ArbiterState(std::uint32_t n_cores, const ArbitrationPolicy& policy);

  /// Tell the arbiter which core was just granted and when its service ends.
  /// Needed to attribute a request already in service when the target arrives.
  void record_service(CoreId core, Cycle end);

  std::uint32_t n_cores() const { return n_cores_; }
  CoreId rr_pointer() const { return rr_pointer_; }

  CoreId select(std::span<const PendingRequest> pending, const ArbitrationPolicy& policy);

 private:
  CoreId select_pessimistic(std::span<const PendingRequest> pending, const PessimisticForT& policy);

  std::uint32_t n_cores_ = 0;
  CoreId rr_pointer_ = 0;

  // Pessimistic bookkeeping for the target's current wait.
  bool target_waiting_ = false;
  std::vector<bool> overtook_;
  std::optional<CoreId> last_core_;
  Cycle last_end_ = 0;
};

/// Picks the request to grant among `pending` and updates `state`.
///
/// PessimisticForT grants an adversary whenever one that has not already
/// overtaken the waiting target is pending (lowest core id first), and the
/// target otherwise. RoundRobin grants the first pending core at or after the
/// pointer and moves the pointer past it. FixedPriority follows the order list.
/// FifoAge grants the earliest arrival, ties broken by lower core id.
///
/// Throws std::invalid_argument on an empty pending set.
CoreId arbiter_select(std::span<const PendingRequest> pending, const ArbitrationPolicy& policy,
                      ArbiterState& state);

}  // namespace miub
