#include "miub/adversary.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace miub {

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kSaturated / b) return kSaturated;
  return a * b;
}

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) { return a > kSaturated - b ? kSaturated : a + b; }

std::uint64_t sat_pow(std::uint64_t base, std::size_t exp) {
  std::uint64_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) r = sat_mul(r, base);
  return r;
}

std::size_t mode_slot(SyncMode mode) { return mode == SyncMode::PhaseLocked ? 0 : 1; }

// Unbiased draw in [0, n).
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = kSaturated - kSaturated % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

}  // namespace

Address congruent_variant(Address address, std::uint64_t m, const CacheGeometry& geometry) {
  return address + m * geometry.set_stride();
}

std::uint64_t baseline_tag_span(const TaskTrace& task, const CacheGeometry& geometry) {
  if (task.empty()) return 1;
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (const auto& a : task.accesses) {
    const auto tag = decompose(a.address, geometry).tag;
    lo = std::min(lo, tag);
    hi = std::max(hi, tag);
  }
  return hi - lo + 1;
}

AdversarialConfig build_baseline(const TaskTrace& task, const HardwareConfig& hw) {
  if (hw.n_cores < 2) {
    throw std::invalid_argument("baseline needs at least two cores, got " + std::to_string(hw.n_cores));
  }
  const std::uint64_t span = baseline_tag_span(task, hw.geometry);
  AdversarialConfig cfg;
  cfg.sync_mode = SyncMode::PhaseLocked;
  for (std::uint32_t m = 1; m < hw.n_cores; ++m) {
    Adversary adv;
    adv.start_offset = 0;
    adv.trace.accesses.reserve(task.size());
    for (const auto& a : task.accesses) {
      adv.trace.accesses.push_back(
          Access{congruent_variant(a.address, m * span, hw.geometry), a.gap_before, a.critical});
    }
    cfg.adversaries.push_back(std::move(adv));
  }
  return cfg;
}

HardwareConfig SearchSpace::hardware() const {
  HardwareConfig hw;
  hw.n_cores = n_cores;
  hw.geometry = geometry;
  hw.l_mem = l_mem;
  hw.l_hit = 0;
  hw.memory_banks = 1;
  return hw;
}

std::vector<Address> SearchSpace::grid_universe(std::uint64_t tags, std::uint64_t sets,
                                                const CacheGeometry& geometry) {
  std::vector<Address> out;
  for (std::uint64_t t = 0; t < tags; ++t) {
    for (std::uint64_t s = 0; s < sets; ++s) out.push_back(compose(t, s, geometry));
  }
  return out;
}

BudgetExceeded::BudgetExceeded(std::uint64_t size, std::uint64_t budget)
    : std::runtime_error("configuration space has " +
                         (size == kSaturated ? std::string("more than 2^64") : std::to_string(size)) +
                         " members, budget is " + std::to_string(budget)),
      size_(size),
      budget_(budget) {}

ConfigSpace::ConfigSpace(SearchSpace space) : space_(std::move(space)), traces_by_len_(2), mode_sizes_() {
  for (SyncMode m : {SyncMode::PhaseLocked, SyncMode::FreeRunning}) {
    if (std::find(space_.sync_modes.begin(), space_.sync_modes.end(), m) != space_.sync_modes.end()) {
      modes_.push_back(m);
    }
  }

  const std::uint64_t u = space_.address_universe.size();
  const std::uint64_t g = space_.gap_grid.size();
  const std::size_t max_len = space_.max_adversary_trace_len;

  auto& pl = traces_by_len_[mode_slot(SyncMode::PhaseLocked)];
  pl.assign(max_len + 1, 0);
  pl[0] = 1;
  if (space_.target_length >= 1 && space_.target_length <= max_len) {
    pl[space_.target_length] = sat_pow(u, space_.target_length);
  }

  auto& fr = traces_by_len_[mode_slot(SyncMode::FreeRunning)];
  fr.assign(max_len + 1, 0);
  fr[0] = 1;
  for (std::size_t len = 1; len <= max_len; ++len) fr[len] = sat_mul(sat_pow(u, len), sat_pow(g, len - 1));

  const std::size_t n_adv = space_.n_cores >= 1 ? space_.n_cores - 1 : 0;
  for (SyncMode m : modes_) {
    const std::uint64_t per = choices(m);
    const std::uint64_t sz = sat_pow(per, n_adv);
    mode_sizes_.push_back(sz);
    size_ = sat_add(size_, sz);
    if (per == kSaturated || sz == kSaturated) saturated_ = true;
  }
  if (size_ == kSaturated) saturated_ = true;
}

std::uint64_t ConfigSpace::trace_count(SyncMode mode) const {
  std::uint64_t total = 0;
  for (auto c : traces_by_len_[mode_slot(mode)]) total = sat_add(total, c);
  return total;
}

std::uint64_t ConfigSpace::choices(SyncMode mode) const {
  const std::uint64_t traces = trace_count(mode);
  return mode == SyncMode::PhaseLocked ? traces : sat_mul(traces, space_.offset_grid.size());
}

TaskTrace ConfigSpace::decode_trace(SyncMode mode, std::uint64_t index) const {
  const auto& by_len = traces_by_len_[mode_slot(mode)];
  std::size_t len = 0;
  while (len < by_len.size() && index >= by_len[len]) {
    index -= by_len[len];
    ++len;
  }
  if (len >= by_len.size()) throw std::out_of_range("trace index outside the space");

  const std::uint64_t u = space_.address_universe.size();
  const std::uint64_t g = mode == SyncMode::PhaseLocked ? 1 : space_.gap_grid.size();

  // Digits from least significant (last access) to most significant (first).
  TaskTrace trace;
  trace.accesses.resize(len);
  for (std::size_t j = len; j-- > 0;) {
    Access& a = trace.accesses[j];
    if (j == 0) {
      a.address = space_.address_universe[index % u];
      a.gap_before = 0;
      index /= u;
    } else {
      const std::uint64_t digit = index % (u * g);
      index /= (u * g);
      a.address = space_.address_universe[digit / g];
      a.gap_before = mode == SyncMode::PhaseLocked ? 0 : space_.gap_grid[digit % g];
    }
  }
  return trace;
}

AdversarialConfig ConfigSpace::decode(SyncMode mode, std::uint64_t index) const {
  const std::size_t n_adv = space_.n_cores >= 1 ? space_.n_cores - 1 : 0;
  const std::uint64_t per = choices(mode);
  const std::uint64_t n_offsets = mode == SyncMode::PhaseLocked ? 1 : space_.offset_grid.size();
  AdversarialConfig cfg;
  cfg.sync_mode = mode;
  cfg.adversaries.resize(n_adv);
  for (std::size_t k = n_adv; k-- > 0;) {
    const std::uint64_t choice = index % per;
    index /= per;
    cfg.adversaries[k].trace = decode_trace(mode, choice / n_offsets);
    cfg.adversaries[k].start_offset = mode == SyncMode::PhaseLocked ? 0 : space_.offset_grid[choice % n_offsets];
  }
  return cfg;
}

AdversarialConfig ConfigSpace::at(std::uint64_t index) const {
  if (saturated_) throw std::overflow_error("configuration space too large to index");
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    if (index < mode_sizes_[m]) return decode(modes_[m], index);
    index -= mode_sizes_[m];
  }
  throw std::out_of_range("configuration index outside the space");
}

AdversarialConfig ConfigSpace::sample(std::mt19937_64& rng) const {
  std::vector<SyncMode> live;
  for (std::size_t m = 0; m < modes_.size(); ++m) {
    if (mode_sizes_[m] > 0) live.push_back(modes_[m]);
  }
  if (live.empty()) throw std::logic_error("cannot sample from an empty configuration space");
  const SyncMode mode = live[draw(rng, live.size())];
  const std::uint64_t per = choices(mode);
  if (per == kSaturated) throw std::overflow_error("per-adversary choice count too large to sample");
  const std::uint64_t n_offsets = mode == SyncMode::PhaseLocked ? 1 : space_.offset_grid.size();
  const std::size_t n_adv = space_.n_cores >= 1 ? space_.n_cores - 1 : 0;

  AdversarialConfig cfg;
  cfg.sync_mode = mode;
  for (std::size_t k = 0; k < n_adv; ++k) {
    const std::uint64_t choice = draw(rng, per);
    Adversary adv;
    adv.trace = decode_trace(mode, choice / n_offsets);
    adv.start_offset = mode == SyncMode::PhaseLocked ? 0 : space_.offset_grid[choice % n_offsets];
    cfg.adversaries.push_back(std::move(adv));
  }
  return cfg;
}

ConfigSpace enumerate_configs(const SearchSpace& space, std::uint64_t budget) {
  ConfigSpace cs(space);
  if (cs.saturated() || cs.size() > budget) throw BudgetExceeded(cs.size(), budget);
  return cs;
}

std::vector<AdversarialConfig> sample_configs(const SearchSpace& space, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("sample count must be at least 1");
  const ConfigSpace cs(space);
  std::mt19937_64 rng(seed);
  std::vector<AdversarialConfig> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(cs.sample(rng));
  return out;
}

}  // namespace miub
