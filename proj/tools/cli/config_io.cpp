#include "cli/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cli/trace_io.hpp"

namespace miub::cli {

using nlohmann::json;

namespace {

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what());
  }
}

void require_object(const json& j, const char* what) {
  if (!j.is_object()) throw SchemaError(std::string(what) + " must be a JSON object");
}

void reject_unknown(const json& j, const std::set<std::string>& known, const char* what) {
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw SchemaError(std::string("unknown field '") + key + "' in " + what);
  }
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const char* key) {
  if (!v.is_number_integer()) throw SchemaError(std::string("field '") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t as_count(const json& v, const char* key) {
  const auto x = as_int(v, key);
  if (x < 0) throw SchemaError(std::string("field '") + key + "' must be non-negative");
  return static_cast<std::uint64_t>(x);
}

std::int64_t get_int(const json& j, const char* key) { return as_int(field(j, key), key); }
std::uint64_t get_count(const json& j, const char* key) { return as_count(field(j, key), key); }

std::uint64_t get_count_or(const json& j, const char* key, std::uint64_t fallback) {
  return j.contains(key) ? as_count(j.at(key), key) : fallback;
}

std::string get_string(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_string()) throw SchemaError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

Address as_address(const json& v) {
  if (v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0)) return v.get<Address>();
  if (v.is_string()) {
    if (const auto a = parse_address(v.get<std::string>())) return *a;
  }
  throw SchemaError("malformed address " + v.dump());
}

std::vector<Cycle> int_list(const json& j, const char* key) {
  const auto& v = field(j, key);
  if (!v.is_array() || v.empty()) throw SchemaError(std::string("field '") + key + "' must be a non-empty list");
  std::vector<Cycle> out;
  for (const auto& x : v) out.push_back(as_int(x, key));
  return out;
}

void hardware_fields(const json& j, HardwareConfig& hw, bool geometry_defaults) {
  hw.n_cores = static_cast<std::uint32_t>(get_count(j, "cores"));
  hw.geometry.line_size_bytes = get_count(j, "line_size");
  hw.geometry.num_sets = get_count(j, "num_sets");
  if (geometry_defaults) {
    hw.geometry.associativity = static_cast<std::uint32_t>(get_count_or(j, "associativity", 1));
    hw.geometry.mshr_count = static_cast<std::uint32_t>(get_count_or(j, "mshr_count", 0));
    hw.memory_banks = static_cast<std::uint32_t>(get_count_or(j, "memory_banks", 1));
  } else {
    hw.geometry.associativity = static_cast<std::uint32_t>(get_count(j, "associativity"));
    hw.geometry.mshr_count = static_cast<std::uint32_t>(get_count(j, "mshr_count"));
    hw.memory_banks = static_cast<std::uint32_t>(get_count(j, "memory_banks"));
  }
  hw.l_mem = get_int(j, "l_mem");
  hw.l_hit = j.contains("l_hit") ? as_int(j.at("l_hit"), "l_hit") : 0;
}

ArbitrationPolicy policy_fields(const json& j, std::uint32_t n_cores) {
  const std::string name = j.contains("policy") ? get_string(j, "policy") : "pessimistic";
  ArbitrationPolicy policy;
  if (name == "pessimistic") {
    policy = PessimisticForT{};
  } else if (name == "pessimistic_strict") {
    policy = PessimisticForT{true};
  } else if (name == "round_robin") {
    policy = RoundRobin{static_cast<CoreId>(get_count_or(j, "pointer", kTargetCore))};
  } else if (name == "fixed_priority") {
    FixedPriority fp;
    if (j.contains("order")) {
      const auto& o = j.at("order");
      if (!o.is_array()) throw SchemaError("field 'order' must be a list of core ids");
      for (const auto& c : o) fp.order.push_back(static_cast<CoreId>(as_count(c, "order")));
    } else {
      for (CoreId c = 0; c < n_cores; ++c) fp.order.push_back(c);
    }
    policy = fp;
  } else if (name == "fifo") {
    policy = FifoAge{};
  } else {
    throw SchemaError("unknown policy '" + name + "'");
  }
  if (j.contains("order") && name != "fixed_priority") throw SchemaError("'order' only applies to fixed_priority");
  if (j.contains("pointer") && name != "round_robin") throw SchemaError("'pointer' only applies to round_robin");
  if (const auto v = validate_policy(policy, n_cores); !v.ok()) throw SchemaError("invalid policy: " + v.summary());
  return policy;
}

SyncMode sync_mode_from(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "phase_locked") return SyncMode::PhaseLocked;
    if (s == "free_running") return SyncMode::FreeRunning;
  }
  throw SchemaError("sync mode must be \"phase_locked\" or \"free_running\", got " + v.dump());
}

void require_hardware(const HardwareConfig& hw) {
  if (auto v = validate_hardware(hw); !v.ok()) throw HardwareInvariantError(std::move(v));
}

}  // namespace

HardwareInvariantError::HardwareInvariantError(ValidationResult result)
    : std::runtime_error("hardware invariant violated: " + result.summary()), result_(std::move(result)) {}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SystemConfig parse_system_config(std::string_view text) {
  const json j = parse_json(text);
  require_object(j, "system config");
  reject_unknown(j,
                 {"cores", "line_size", "num_sets", "associativity", "mshr_count", "memory_banks", "l_mem", "l_hit",
                  "policy", "order", "pointer"},
                 "system config");
  SystemConfig cfg;
  hardware_fields(j, cfg.hardware, false);
  if (!j.contains("policy")) throw SchemaError("missing field 'policy'");
  require_hardware(cfg.hardware);
  cfg.policy = policy_fields(j, cfg.hardware.n_cores);
  return cfg;
}

SearchSpec parse_search_spec(std::string_view text) {
  const json j = parse_json(text);
  require_object(j, "search space");
  reject_unknown(j,
                 {"cores", "line_size", "num_sets", "associativity", "mshr_count", "memory_banks", "l_mem", "l_hit",
                  "address_universe", "max_adversary_trace_len", "offset_grid", "gap_grid", "sync_modes", "budget",
                  "mode", "count", "seed", "threads", "policy", "order", "pointer"},
                 "search space");

  HardwareConfig hw;
  hardware_fields(j, hw, true);
  if (hw.l_hit != 0) throw SchemaError("search spaces use l_hit = 0");
  require_hardware(hw);

  SearchSpec spec;
  auto& s = spec.space;
  s.n_cores = hw.n_cores;
  s.geometry = hw.geometry;
  s.l_mem = hw.l_mem;

  const auto& u = field(j, "address_universe");
  if (u.is_array()) {
    for (const auto& a : u) s.address_universe.push_back(as_address(a));
  } else if (u.is_object()) {
    reject_unknown(u, {"tags", "sets"}, "address_universe");
    const auto sets = get_count(u, "sets");
    if (sets > hw.geometry.num_sets) throw SchemaError("address_universe.sets exceeds num_sets");
    s.address_universe = SearchSpace::grid_universe(get_count(u, "tags"), sets, hw.geometry);
  } else {
    throw SchemaError("address_universe must be a list of addresses or {tags, sets}");
  }
  if (s.address_universe.empty()) throw SchemaError("address_universe is empty");

  s.max_adversary_trace_len = get_count(j, "max_adversary_trace_len");
  s.offset_grid = j.contains("offset_grid") ? int_list(j, "offset_grid") : std::vector<Cycle>{0};
  s.gap_grid = j.contains("gap_grid") ? int_list(j, "gap_grid") : std::vector<Cycle>{0};
  for (auto g : s.gap_grid) {
    if (g < 0) throw SchemaError("gap_grid entries must be non-negative");
  }
  if (j.contains("sync_modes")) {
    const auto& m = j.at("sync_modes");
    if (!m.is_array() || m.empty()) throw SchemaError("sync_modes must be a non-empty list");
    s.sync_modes.clear();
    for (const auto& x : m) s.sync_modes.push_back(sync_mode_from(x));
  }

  spec.budget = get_count_or(j, "budget", spec.budget);
  spec.threads = static_cast<unsigned>(get_count_or(j, "threads", 1));
  if (spec.threads == 0) throw SchemaError("threads must be at least 1");

  const std::string mode = j.contains("mode") ? get_string(j, "mode") : "exhaustive";
  if (mode == "exhaustive") {
    if (j.contains("count") || j.contains("seed")) throw SchemaError("count/seed only apply to mode \"sampled\"");
    spec.mode = SearchMode::exhaustive();
  } else if (mode == "sampled") {
    const auto count = get_count(j, "count");
    if (count == 0) throw SchemaError("count must be at least 1");
    spec.mode = SearchMode::sampled(count, get_count_or(j, "seed", 0));
  } else {
    throw SchemaError("mode must be \"exhaustive\" or \"sampled\"");
  }

  spec.policy = policy_fields(j, hw.n_cores);
  return spec;
}

AdversarialConfig parse_adversaries(std::string_view text, const std::filesystem::path& base_dir) {
  const json j = parse_json(text);
  require_object(j, "adversaries document");
  reject_unknown(j, {"sync_mode", "adversaries"}, "adversaries document");

  AdversarialConfig cfg;
  cfg.sync_mode = sync_mode_from(field(j, "sync_mode"));
  const auto& list = field(j, "adversaries");
  if (!list.is_array()) throw SchemaError("'adversaries' must be a list");
  for (const auto& a : list) {
    require_object(a, "adversary");
    reject_unknown(a, {"start_offset", "trace", "accesses"}, "adversary");
    Adversary adv;
    adv.start_offset = a.contains("start_offset") ? as_int(a.at("start_offset"), "start_offset") : 0;
    if (a.contains("trace") == a.contains("accesses")) {
      throw SchemaError("each adversary needs exactly one of 'trace' or 'accesses'");
    }
    if (a.contains("trace")) {
      const auto& t = a.at("trace");
      if (!t.is_string()) throw SchemaError("'trace' must be a file path");
      const std::filesystem::path p = base_dir / t.get<std::string>();
      adv.trace = parse_trace(read_file(p));
    } else {
      const auto& acc = a.at("accesses");
      if (!acc.is_array()) throw SchemaError("'accesses' must be a list");
      for (const auto& x : acc) {
        require_object(x, "access");
        reject_unknown(x, {"address", "gap", "crit"}, "access");
        Access one;
        one.address = as_address(field(x, "address"));
        one.gap_before = x.contains("gap") ? static_cast<Cycle>(as_count(x.at("gap"), "gap")) : 0;
        if (x.contains("crit")) {
          const auto& c = x.at("crit");
          if (c.is_boolean()) {
            one.critical = c.get<bool>();
          } else {
            const auto v = as_int(c, "crit");
            if (v != 0 && v != 1) throw SchemaError("crit must be 0 or 1");
            one.critical = v == 1;
          }
        }
        adv.trace.accesses.push_back(one);
      }
    }
    cfg.adversaries.push_back(std::move(adv));
  }
  return cfg;
}

}  // namespace miub::cli
