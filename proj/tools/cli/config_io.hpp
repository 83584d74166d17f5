#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "miub/adversary.hpp"
#include "miub/model.hpp"
#include "miub/verify.hpp"

namespace miub::cli {

/// Document does not have the expected shape (missing field, wrong type,
/// unknown key or value).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Document is well formed but describes hardware outside the supported class.
class HardwareInvariantError : public std::runtime_error {
 public:
  explicit HardwareInvariantError(ValidationResult result);
  const ValidationResult& result() const { return result_; }

 private:
  ValidationResult result_;
};

struct SystemConfig {
  HardwareConfig hardware;
  ArbitrationPolicy policy;
};

/// JSON object with cores, line_size, num_sets, associativity, mshr_count,
/// memory_banks, l_mem, optional l_hit, and policy (pessimistic,
/// pessimistic_strict, round_robin [pointer], fixed_priority [order], fifo).
SystemConfig parse_system_config(std::string_view text);

struct SearchSpec {
  SearchSpace space;
  ArbitrationPolicy policy = PessimisticForT{};
  SearchMode mode;
  std::uint64_t budget = 1'000'000;
  unsigned threads = 1;
};

/// JSON object mirroring SearchSpace (cores, line_size, num_sets, l_mem,
/// address_universe as a list or {tags, sets}, max_adversary_trace_len,
/// offset_grid, gap_grid, sync_modes) plus budget, mode, count, seed, threads
/// and an optional policy.
SearchSpec parse_search_spec(std::string_view text);

/// {sync_mode, adversaries: [{start_offset, trace: <file>} | {start_offset,
/// accesses: [{address, gap, crit}]}]}. Trace files resolve against `base_dir`.
AdversarialConfig parse_adversaries(std::string_view text, const std::filesystem::path& base_dir);

std::string read_file(const std::filesystem::path& path);

}  // namespace miub::cli
