#include "miub/arbiter.hpp"

#include <algorithm>
#include <stdexcept>

namespace miub {

namespace {

const PendingRequest* find_core(std::span<const PendingRequest> pending, CoreId core) {
  for (const auto& p : pending) {
    if (p.core == core) return &p;
  }
  return nullptr;
}

}  // namespace

ArbiterState::ArbiterState(std::uint32_t n_cores, const ArbitrationPolicy& policy)
    : n_cores_(n_cores), overtook_(n_cores, false) {
  if (const auto* rr = std::get_if<RoundRobin>(&policy)) {
    rr_pointer_ = n_cores == 0 ? 0 : rr->initial_pointer % n_cores;
  }
}

void ArbiterState::record_service(CoreId core, Cycle end) {
  last_core_ = core;
  last_end_ = end;
}

CoreId ArbiterState::select_pessimistic(std::span<const PendingRequest> pending,
                                        const PessimisticForT& policy) {
  const PendingRequest* target = find_core(pending, kTargetCore);
  if (target != nullptr && !target_waiting_) {
    // A new wait begins. The request in service at the target's arrival has
    // already taken its turn ahead of the target.
    target_waiting_ = true;
    std::fill(overtook_.begin(), overtook_.end(), false);
    if (last_core_ && *last_core_ != kTargetCore && last_end_ > target->arrival) {
      overtook_[*last_core_] = true;
    }
  }

  std::optional<CoreId> best;
  for (const auto& p : pending) {
    if (p.core == kTargetCore) continue;
    if (target != nullptr && !policy.allow_reentry && overtook_[p.core]) continue;
    if (!best || p.core < *best) best = p.core;
  }
  if (best) {
    if (target != nullptr) overtook_[*best] = true;
    return *best;
  }
  target_waiting_ = false;
  return kTargetCore;
}

CoreId ArbiterState::select(std::span<const PendingRequest> pending, const ArbitrationPolicy& policy) {
  if (pending.empty()) throw std::invalid_argument("arbiter_select: no pending request");
  for (const auto& p : pending) {
    if (p.core >= n_cores_) throw std::invalid_argument("arbiter_select: core id out of range");
  }

  if (const auto* pess = std::get_if<PessimisticForT>(&policy)) return select_pessimistic(pending, *pess);

  if (std::holds_alternative<RoundRobin>(policy)) {
    for (std::uint32_t step = 0; step < n_cores_; ++step) {
      const CoreId c = (rr_pointer_ + step) % n_cores_;
      if (find_core(pending, c) != nullptr) {
        rr_pointer_ = (c + 1) % n_cores_;
        return c;
      }
    }
    throw std::logic_error("round robin found no pending core");
  }

  if (const auto* fp = std::get_if<FixedPriority>(&policy)) {
    for (CoreId c : fp->order) {
      if (find_core(pending, c) != nullptr) return c;
    }
    throw std::invalid_argument("fixed priority order does not cover a pending core");
  }

  // FifoAge
  const auto it = std::min_element(pending.begin(), pending.end(),
                                   [](const PendingRequest& a, const PendingRequest& b) {
                                     return a.arrival != b.arrival ? a.arrival < b.arrival : a.core < b.core;
                                   });
  return it->core;
}

CoreId arbiter_select(std::span<const PendingRequest> pending, const ArbitrationPolicy& policy,
                      ArbiterState& state) {
  return state.select(pending, policy);
}

}  // namespace miub
