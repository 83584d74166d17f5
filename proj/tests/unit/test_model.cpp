#include <doctest.h>

#include <random>
#include <stdexcept>

#include "miub/model.hpp"

using namespace miub;

namespace {

CacheGeometry geom(std::uint64_t line, std::uint64_t sets) {
  CacheGeometry g;
  g.line_size_bytes = line;
  g.num_sets = sets;
  return g;
}

TaskTrace trace_of_len(std::size_t n) {
  TaskTrace t;
  for (std::size_t i = 0; i < n; ++i) t.accesses.push_back(Access{0x40 * i, 0, true});
  return t;
}

AdversarialConfig locked(std::size_t n_adv, std::size_t len) {
  AdversarialConfig c;
  for (std::size_t k = 0; k < n_adv; ++k) c.adversaries.push_back(Adversary{trace_of_len(len), 0});
  return c;
}

}  // namespace

TEST_CASE("decompose splits line offset, set index and tag") {
  const auto g = geom(64, 8);
  CHECK(decompose(0x000, g) == DecomposedAddress{0, 0, 0});
  // 640 = 1*512 + 2*64
  CHECK(decompose(0x280, g) == DecomposedAddress{1, 2, 0});
  CHECK(decompose(0x080, g) == DecomposedAddress{0, 2, 0});
  CHECK(decompose(0x2BF, g) == DecomposedAddress{1, 2, 63});
}

TEST_CASE("compose inverts decompose on line-aligned addresses") {
  CHECK(compose(1, 2, geom(64, 8)) == 0x280);
  CHECK(compose(0, 0, geom(64, 8)) == 0);
  CHECK(compose(0, 0, geom(32, 1024)) == 0);
  CHECK(compose(3, 1, geom(32, 4)) == 416);
  CHECK_THROWS_AS(compose(0, 8, geom(64, 8)), std::out_of_range);
}

TEST_CASE("decompose/compose round trip for random addresses") {
  std::mt19937_64 rng(7);
  for (std::uint64_t line : {16u, 64u, 128u}) {
    for (std::uint64_t sets : {1u, 8u, 256u}) {
      const auto g = geom(line, sets);
      for (int i = 0; i < 200; ++i) {
        const Address a = rng() >> 8;
        const auto d = decompose(a, g);
        CHECK(d.line_offset < line);
        CHECK(d.set_index < sets);
        CHECK(compose(d.tag, d.set_index, g) + d.line_offset == a);
      }
    }
  }
}

TEST_CASE("congruent_different_tag") {
  const auto g = geom(64, 8);
  CHECK(congruent_different_tag(0x080, 0x280, g));
  CHECK_FALSE(congruent_different_tag(0x040, 0x280, g));
  CHECK_FALSE(congruent_different_tag(0x280, 0x2BF, g));
}

TEST_CASE("validate_hardware names each violated invariant") {
  HardwareConfig hw;
  CHECK(validate_hardware(hw).ok());

  auto bad = hw;
  bad.geometry.associativity = 2;
  auto r = validate_hardware(bad);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].what == "set-associative L2");
  CHECK(r.has(Invariant::Associativity));

  bad = hw;
  bad.geometry.mshr_count = 1;
  r = validate_hardware(bad);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].what == "MSHRs enabled");

  bad = hw;
  bad.memory_banks = 2;
  CHECK(validate_hardware(bad).has(Invariant::MemoryBanks));

  bad = hw;
  bad.geometry.line_size_bytes = 48;
  CHECK(validate_hardware(bad).has(Invariant::LineSize));
  bad = hw;
  bad.geometry.num_sets = 6;
  CHECK(validate_hardware(bad).has(Invariant::NumSets));
  bad = hw;
  bad.l_mem = 0;
  CHECK(validate_hardware(bad).has(Invariant::MissLatency));
  bad = hw;
  bad.l_hit = bad.l_mem;
  CHECK(validate_hardware(bad).has(Invariant::HitLatency));
  bad = hw;
  bad.n_cores = 0;
  CHECK(validate_hardware(bad).has(Invariant::CoreCount));

  bad = hw;
  bad.geometry.associativity = 4;
  bad.geometry.mshr_count = 8;
  bad.memory_banks = 8;
  CHECK(validate_hardware(bad).violations.size() == 3);
}

TEST_CASE("validate_policy") {
  CHECK(validate_policy(RoundRobin{3}, 4).ok());
  CHECK_FALSE(validate_policy(RoundRobin{4}, 4).ok());
  CHECK(validate_policy(FixedPriority{{2, 0, 1}}, 3).ok());
  CHECK_FALSE(validate_policy(FixedPriority{{0, 0, 1}}, 3).ok());
  CHECK_FALSE(validate_policy(FixedPriority{{0, 1}}, 3).ok());
  CHECK(validate_policy(PessimisticForT{}, 1).ok());
  CHECK(validate_policy(FifoAge{}, 8).ok());
}

TEST_CASE("check_admissible shape clauses") {
  HardwareConfig hw;
  hw.n_cores = 4;
  const auto task = trace_of_len(2);

  auto ok = check_admissible(locked(3, 2), task, hw);
  CHECK(ok.ok());
  CHECK(ok.notes.size() == 3);

  auto r = check_admissible(locked(2, 2), task, hw);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].what == "core count");

  hw.n_cores = 2;
  r = check_admissible(locked(1, 3), task, hw);
  REQUIRE_FALSE(r.ok());
  CHECK(r.violations[0].what == "phase mismatch");

  // An idle phase-locked adversary is admissible.
  CHECK(check_admissible(locked(1, 0), task, hw).ok());

  // Free-running adversaries may use any length.
  auto fr = locked(1, 5);
  fr.sync_mode = SyncMode::FreeRunning;
  CHECK(check_admissible(fr, task, hw).ok());
  fr.adversaries[0].trace.accesses[1].gap_before = -1;
  CHECK(check_admissible(fr, task, hw).has(Invariant::NegativeGap));
}

TEST_CASE("names") {
  CHECK(policy_name(PessimisticForT{}) == "pessimistic");
  CHECK(policy_name(PessimisticForT{true}) == "pessimistic_strict");
  CHECK(policy_name(RoundRobin{}) == "round_robin");
  CHECK(policy_name(FixedPriority{}) == "fixed_priority");
  CHECK(policy_name(FifoAge{}) == "fifo");
  CHECK(std::string(sync_mode_name(SyncMode::FreeRunning)) == "free_running");
}
