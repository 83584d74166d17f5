#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "miub/model.hpp"

namespace miub {

/// address + m * (num_sets * line_size): same set, tag advanced by m.
Address congruent_variant(Address address, std::uint64_t m, const CacheGeometry& geometry);

/// Baseline adversarial configuration: N-1 phase-locked copies of the target
/// trace, each relocated to congruent addresses with a private tag range.
///
/// Adversary m uses congruent_variant(a, m * span) where span is the width of
/// the target's tag range (max tag - min tag + 1). When the target touches a
/// single tag this is the plain stride m; in general it guarantees that no
/// adversary line coincides with a target line or with another adversary's.
///
/// Throws std::invalid_argument when hw has fewer than two cores.
AdversarialConfig build_baseline(const TaskTrace& task, const HardwareConfig& hw);

/// Tag multiplier used by build_baseline for `task`.
std::uint64_t baseline_tag_span(const TaskTrace& task, const CacheGeometry& geometry);

struct SearchSpace {
  std::uint32_t n_cores = 2;
  CacheGeometry geometry;
  Cycle l_mem = 1;
  std::vector<Address> address_universe;
  std::size_t max_adversary_trace_len = 1;
  std::vector<Cycle> offset_grid{0};
  // Candidate gaps before the 2nd, 3rd, ... access of a free-running
  // adversary. The first access always has gap 0; its timing is the offset.
  std::vector<Cycle> gap_grid{0};
  std::vector<SyncMode> sync_modes{SyncMode::PhaseLocked, SyncMode::FreeRunning};
  // Length of the target trace; phase-locked adversaries must match it (or be idle).
  std::size_t target_length = 1;

  HardwareConfig hardware() const;

  /// Universe of tags x sets on the given geometry.
  static std::vector<Address> grid_universe(std::uint64_t tags, std::uint64_t sets, const CacheGeometry& geometry);
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t size, std::uint64_t budget);
  std::uint64_t size() const { return size_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t size_;
  std::uint64_t budget_;
};

/// Index-addressable view of every admissible configuration of a SearchSpace in
/// canonical order: phase-locked before free-running, then adversary 1's choice
/// as the most significant digit. A per-adversary choice is (trace, offset),
/// trace-major; traces are ordered by length, then lexicographically by
/// (address index, gap index) per access. Phase-locked adversaries always use
/// offset 0 and gap 0, so offsets do not multiply that mode.
class ConfigSpace {
 public:
  explicit ConfigSpace(SearchSpace space);

  /// Total number of configurations; saturates at UINT64_MAX.
  std::uint64_t size() const { return size_; }
  bool saturated() const { return saturated_; }

  AdversarialConfig at(std::uint64_t index) const;

  /// Number of per-adversary choices in a mode.
  std::uint64_t choices(SyncMode mode) const;
  std::uint64_t trace_count(SyncMode mode) const;

  /// Draws a mode uniformly among non-empty modes, then each adversary's
  /// choice uniformly. Always a member of the enumeration.
  AdversarialConfig sample(std::mt19937_64& rng) const;

  const SearchSpace& space() const { return space_; }

  class iterator {
   public:
    using value_type = AdversarialConfig;
    using difference_type = std::ptrdiff_t;
    iterator() = default;
    iterator(const ConfigSpace* s, std::uint64_t i) : s_(s), i_(i) {}
    AdversarialConfig operator*() const { return s_->at(i_); }
    iterator& operator++() { ++i_; return *this; }
    iterator operator++(int) { auto tmp = *this; ++i_; return tmp; }
    bool operator==(const iterator& o) const { return i_ == o.i_; }
    std::uint64_t index() const { return i_; }

   private:
    const ConfigSpace* s_ = nullptr;
    std::uint64_t i_ = 0;
  };

  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, size_}; }

 private:
  TaskTrace decode_trace(SyncMode mode, std::uint64_t index) const;
  AdversarialConfig decode(SyncMode mode, std::uint64_t index) const;

  SearchSpace space_;
  std::vector<SyncMode> modes_;  // canonical order, deduplicated
  // traces_by_len_[mode][len] = number of traces of exactly that length
  std::vector<std::vector<std::uint64_t>> traces_by_len_;
  std::vector<std::uint64_t> mode_sizes_;
  std::uint64_t size_ = 0;
  bool saturated_ = false;
};

/// Every admissible configuration exactly once, canonical order. Throws
/// BudgetExceeded (carrying the computed size) when the space is larger than
/// `budget`.
ConfigSpace enumerate_configs(const SearchSpace& space, std::uint64_t budget);

/// `count` seeded pseudo-random members of the space; same seed, same stream.
std::vector<AdversarialConfig> sample_configs(const SearchSpace& space, std::size_t count, std::uint64_t seed);

}  // namespace miub
