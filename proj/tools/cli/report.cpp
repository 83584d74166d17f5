#include "cli/report.hpp"

#include <cstdio>
#include <sstream>

#include "cli/trace_io.hpp"

namespace miub::cli {

using nlohmann::json;

namespace {

json trace_to_json(const TaskTrace& trace) {
  json out = json::array();
  for (const auto& a : trace.accesses) {
    out.push_back({{"address", hex(a.address)}, {"gap", a.gap_before}, {"crit", a.critical ? 1 : 0}});
  }
  return out;
}

json hardware_to_json(const HardwareConfig& hw) {
  return {{"cores", hw.n_cores},
          {"line_size", hw.geometry.line_size_bytes},
          {"num_sets", hw.geometry.num_sets},
          {"associativity", hw.geometry.associativity},
          {"mshr_count", hw.geometry.mshr_count},
          {"memory_banks", hw.memory_banks},
          {"l_mem", hw.l_mem},
          {"l_hit", hw.l_hit}};
}

json policy_to_json(const ArbitrationPolicy& policy) {
  json out = {{"name", policy_name(policy)}};
  if (const auto* fp = std::get_if<FixedPriority>(&policy)) out["order"] = fp->order;
  if (const auto* rr = std::get_if<RoundRobin>(&policy)) out["pointer"] = rr->initial_pointer;
  return out;
}

json lemma_to_json(const LemmaReport& r) {
  return {{"lemma", r.lemma},
          {"cases_checked", r.cases_checked},
          {"simulations", r.simulations},
          {"failure_count", r.failure_count},
          {"failures", r.failures},
          {"notes", r.notes},
          {"max_access_stall", r.max_access_stall},
          {"per_access_bound", r.per_access_bound},
          {"verdict", r.passed() ? "pass" : "fail"}};
}

json space_to_json(const SearchSpace& s) {
  json universe = json::array();
  for (auto a : s.address_universe) universe.push_back(hex(a));
  json modes = json::array();
  for (auto m : s.sync_modes) modes.push_back(sync_mode_name(m));
  return {{"cores", s.n_cores},
          {"line_size", s.geometry.line_size_bytes},
          {"num_sets", s.geometry.num_sets},
          {"l_mem", s.l_mem},
          {"address_universe", universe},
          {"max_adversary_trace_len", s.max_adversary_trace_len},
          {"offset_grid", s.offset_grid},
          {"gap_grid", s.gap_grid},
          {"sync_modes", modes},
          {"target_length", s.target_length}};
}

json counterexample_to_json(const Counterexample& c) {
  return {{"config", config_to_json(c.config)},
          {"interference", c.interference},
          {"max_stall", c.max_stall},
          {"minimized", config_to_json(c.minimized)},
          {"minimized_interference", c.minimized_interference},
          {"minimized_max_stall", c.minimized_max_stall}};
}

json search_to_json(const SearchReport& r) {
  json mode = {{"kind", r.mode.kind == SearchMode::Kind::Exhaustive ? "exhaustive" : "sampled"}};
  if (r.mode.kind == SearchMode::Kind::Sampled) {
    mode["count"] = r.mode.count;
    mode["seed"] = r.mode.seed;
  }
  json attainers = json::array();
  for (const auto& c : r.attainers) attainers.push_back(config_to_json(c));
  json violations = json::array();
  for (const auto& c : r.violations) violations.push_back(counterexample_to_json(c));
  return {{"space", space_to_json(r.space)},
          {"policy", r.policy},
          {"mode", mode},
          {"space_size", r.space_size},
          {"configs_checked", r.configs_checked},
          {"bound", r.bound},
          {"per_access_bound", r.per_access_bound},
          {"max_observed", r.max_observed},
          {"max_access_stall", r.max_access_stall},
          {"max_config", r.max_config ? config_to_json(*r.max_config) : json(nullptr)},
          {"attainer_count", r.attainer_count},
          {"attainers", attainers},
          {"violation_count", r.violation_count},
          {"violations", violations},
          {"baseline", {{"checked", r.baseline_checked},
                        {"interference", r.baseline_interference},
                        {"attains", r.baseline_attains}}},
          {"verdict", r.passed() ? "pass" : "fail"}};
}

json simulation_to_json(const RunReport& report) {
  const SimResult& sim = *report.simulation;
  json rows = json::array();
  for (const auto& a : sim.per_access) {
    rows.push_back({{"index", a.index},
                    {"address", hex(a.address)},
                    {"critical", a.critical},
                    {"issue", a.issue_cycle},
                    {"grant", a.grant_cycle},
                    {"complete", a.complete_cycle},
                    {"outcome", a.outcome == Outcome::Hit ? "hit" : "miss"},
                    {"stall", a.stall}});
  }
  json out = {{"interference_critical", sim.total_interference_critical},
              {"interference_all", sim.total_interference_all},
              {"conversion_penalty", sim.conversion_penalty},
              {"max_stall", sim.max_stall},
              {"per_access", rows}};
  if (report.config) out["config"] = config_to_json(*report.config);
  if (report.include_events) {
    json events = json::array();
    for (const auto& e : sim.event_log) {
      events.push_back({{"cycle", e.cycle}, {"kind", event_kind_name(e.kind)}, {"core", e.core},
                        {"address", hex(e.address)}});
    }
    out["events"] = events;
  }
  return out;
}

json counterexample_block(const RunReport& report) {
  json block = json::object();
  if (report.simulation && report.simulation->total_interference_critical > report.bound) {
    const auto& sim = *report.simulation;
    json over = json::array();
    for (const auto& a : sim.per_access) {
      if (a.stall > 0) over.push_back({{"index", a.index}, {"address", hex(a.address)}, {"stall", a.stall}});
    }
    block["bound_exceeded"] = {{"interference_critical", sim.total_interference_critical},
                               {"bound", report.bound},
                               {"excess", sim.total_interference_critical - report.bound},
                               {"stalled_accesses", over}};
    if (report.config) block["bound_exceeded"]["config"] = config_to_json(*report.config);
  }
  for (const auto& l : report.lemmas) {
    if (!l.passed()) block["lemmas"][l.lemma] = {{"failure_count", l.failure_count}, {"failures", l.failures}};
  }
  if (report.search && !report.search->passed()) {
    json v = json::array();
    for (const auto& c : report.search->violations) v.push_back(counterexample_to_json(c));
    block["search"] = {{"violation_count", report.search->violation_count}, {"violations", v}};
  }
  return block;
}

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s : s + std::string(w - s.size(), ' '); }
std::string rpad(const std::string& s, std::size_t w) { return s.size() >= w ? s : std::string(w - s.size(), ' ') + s; }

std::string str(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string pass_fail(const json& v) { return v == "pass" ? "PASS" : "FAIL"; }

std::string describe_config_json(const json& cfg) {
  std::ostringstream out;
  out << str(cfg.at("sync_mode"));
  std::size_t core = 1;
  for (const auto& a : cfg.at("adversaries")) {
    out << " | core " << core++ << " @" << str(a.at("start_offset")) << ":";
    if (a.at("accesses").empty()) out << " idle";
    for (const auto& x : a.at("accesses")) {
      out << " " << str(x.at("address"));
      if (x.at("gap").get<Cycle>() != 0) out << "+" << str(x.at("gap"));
    }
  }
  return out.str();
}

}  // namespace

std::string hex(Address a) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(a));
  return buf;
}

WorkloadDigest WorkloadDigest::of(const TaskTrace& task) {
  return {task.size(), task.critical_count(), trace_digest(task)};
}

bool report_passed(const RunReport& report) {
  if (report.simulation && report.simulation->total_interference_critical > report.bound) return false;
  for (const auto& l : report.lemmas) {
    if (!l.passed()) return false;
  }
  if (report.search && !report.search->passed()) return false;
  return true;
}

int exit_code_for(const RunReport& report) { return report_passed(report) ? 0 : 1; }

json config_to_json(const AdversarialConfig& config) {
  json advs = json::array();
  for (const auto& a : config.adversaries) {
    advs.push_back({{"start_offset", a.start_offset}, {"accesses", trace_to_json(a.trace)}});
  }
  return {{"sync_mode", sync_mode_name(config.sync_mode)}, {"adversaries", advs}};
}

std::vector<std::string> cited_invariants(const HardwareConfig& hw) {
  return {
      "direct-mapped shared L2 (associativity " + std::to_string(hw.geometry.associativity) +
          "): a fill evicts the resident line of its set",
      "MSHRs disabled (mshr_count " + std::to_string(hw.geometry.mshr_count) +
          "): at most one outstanding request per core",
      "single memory bank (memory_banks " + std::to_string(hw.memory_banks) + "): misses are served one at a time",
      "fixed miss service time L_mem = " + std::to_string(hw.l_mem) + " cycles, write-back folded in",
      "target task on core 0, one adversary per remaining core, no other shared channels",
  };
}

json report_to_json(const RunReport& report) {
  json out = {{"tool", {{"name", kToolName}, {"version", kToolVersion}}},
              {"command", report.command},
              {"hardware", hardware_to_json(report.hardware)},
              {"workload", {{"length", report.workload.length},
                            {"critical", report.workload.critical},
                            {"digest", "fnv1a64:" + hex(report.workload.hash)}}},
              {"policy", policy_to_json(report.policy)},
              {"bound", report.bound},
              {"per_access_bound", per_access_bound(report.hardware.n_cores, report.hardware.l_mem)},
              {"invariants", cited_invariants(report.hardware)},
              {"verdict", report_passed(report) ? "pass" : "fail"}};
  if (report.simulation) out["simulation"] = simulation_to_json(report);
  if (!report.lemmas.empty()) {
    json lemmas = json::array();
    for (const auto& l : report.lemmas) lemmas.push_back(lemma_to_json(l));
    out["lemmas"] = lemmas;
  }
  if (report.search) out["search"] = search_to_json(*report.search);
  if (!report.artifacts.empty()) out["artifacts"] = report.artifacts;
  if (!report_passed(report)) out["counterexample"] = counterexample_block(report);
  return out;
}

std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

std::string emit_report(const RunReport& report, ReportFormat format) {
  const json j = report_to_json(report);
  return format == ReportFormat::Json ? canonical_dump(j) : render_text(j);
}

std::string render_text(const json& r) {
  std::ostringstream out;
  out << str(r.at("tool").at("name")) << " " << str(r.at("tool").at("version")) << "  " << str(r.at("command"))
      << "\n";
  out << "verdict: " << pass_fail(r.at("verdict")) << "\n";
  out << "bound: " << str(r.at("bound"));
  if (r.contains("per_access_bound")) out << " cycles (per access " << str(r.at("per_access_bound")) << ")";
  out << "\n";

  if (r.contains("hardware")) {
    const auto& h = r.at("hardware");
    out << "hardware: " << str(h.at("cores")) << " cores, " << str(h.at("line_size")) << " B lines x "
        << str(h.at("num_sets")) << " sets, associativity " << str(h.at("associativity")) << ", mshr "
        << str(h.at("mshr_count")) << ", banks " << str(h.at("memory_banks")) << ", L_mem " << str(h.at("l_mem"))
        << ", L_hit " << str(h.at("l_hit")) << "\n";
  }
  if (r.contains("workload")) {
    const auto& w = r.at("workload");
    out << "workload: " << str(w.at("length")) << " accesses, " << str(w.at("critical")) << " critical, "
        << str(w.at("digest")) << "\n";
  }
  if (r.contains("policy")) out << "policy: " << str(r.at("policy").at("name")) << "\n";

  if (r.contains("simulation")) {
    const auto& s = r.at("simulation");
    out << "\nsimulation";
    if (s.contains("config")) out << ": " << describe_config_json(s.at("config"));
    out << "\n  I_T critical " << str(s.at("interference_critical")) << ", all accesses "
        << str(s.at("interference_all")) << ", conversion penalty " << str(s.at("conversion_penalty"))
        << ", max stall " << str(s.at("max_stall")) << "\n";
    out << "  " << rpad("idx", 4) << "  " << pad("address", 12) << pad("crit", 6) << rpad("issue", 8)
        << rpad("grant", 8) << rpad("complete", 10) << "  " << pad("outcome", 8) << rpad("stall", 6) << "\n";
    for (const auto& a : s.at("per_access")) {
      out << "  " << rpad(str(a.at("index")), 4) << "  " << pad(str(a.at("address")), 12)
          << pad(a.at("critical").get<bool>() ? "yes" : "no", 6) << rpad(str(a.at("issue")), 8)
          << rpad(str(a.at("grant")), 8) << rpad(str(a.at("complete")), 10) << "  " << pad(str(a.at("outcome")), 8)
          << rpad(str(a.at("stall")), 6) << "\n";
    }
  }

  if (r.contains("lemmas")) {
    out << "\nchecks:\n";
    for (const auto& l : r.at("lemmas")) {
      out << "  " << pad(str(l.at("lemma")), 10) << pass_fail(l.at("verdict")) << "  cases "
          << str(l.at("cases_checked")) << ", simulations " << str(l.at("simulations")) << ", max stall "
          << str(l.at("max_access_stall")) << " / " << str(l.at("per_access_bound")) << "\n";
      for (const auto& n : l.at("notes")) out << "      " << str(n) << "\n";
      for (const auto& f : l.at("failures")) out << "      failure: " << str(f) << "\n";
    }
  }

  if (r.contains("search")) {
    const auto& s = r.at("search");
    out << "\nsearch (" << str(s.at("mode").at("kind")) << ", policy " << str(s.at("policy")) << "): "
        << pass_fail(s.at("verdict")) << "\n";
    out << "  space size " << str(s.at("space_size")) << ", checked " << str(s.at("configs_checked")) << "\n";
    out << "  max observed " << str(s.at("max_observed")) << " of bound " << str(s.at("bound"))
        << ", max single stall " << str(s.at("max_access_stall")) << "\n";
    out << "  attainers " << str(s.at("attainer_count")) << ", violations " << str(s.at("violation_count")) << "\n";
    const auto& b = s.at("baseline");
    if (b.at("checked").get<bool>()) {
      out << "  baseline interference " << str(b.at("interference"))
          << (b.at("attains").get<bool>() ? " (attains the bound)" : " (below the bound)") << "\n";
    }
    if (!s.at("max_config").is_null()) out << "  max config: " << describe_config_json(s.at("max_config")) << "\n";
  }

  if (r.contains("counterexample")) {
    const auto& c = r.at("counterexample");
    out << "\ncounterexample:\n";
    if (c.contains("bound_exceeded")) {
      const auto& b = c.at("bound_exceeded");
      out << "  critical I_T " << str(b.at("interference_critical")) << " exceeds bound " << str(b.at("bound"))
          << " by " << str(b.at("excess")) << "\n";
      if (b.contains("config")) out << "  config: " << describe_config_json(b.at("config")) << "\n";
      for (const auto& a : b.at("stalled_accesses")) {
        out << "  access " << str(a.at("index")) << " " << str(a.at("address")) << " stalled " << str(a.at("stall"))
            << "\n";
      }
    }
    if (c.contains("lemmas")) {
      for (const auto& [name, l] : c.at("lemmas").items()) {
        out << "  " << name << ": " << str(l.at("failure_count")) << " failures\n";
        for (const auto& f : l.at("failures")) out << "    " << str(f) << "\n";
      }
    }
    if (c.contains("search")) {
      for (const auto& v : c.at("search").at("violations")) {
        out << "  I_T " << str(v.at("interference")) << ": " << describe_config_json(v.at("config")) << "\n";
        out << "    minimized (I_T " << str(v.at("minimized_interference"))
            << "): " << describe_config_json(v.at("minimized")) << "\n";
      }
    }
  }

  if (r.contains("artifacts")) {
    out << "\nartifacts:\n";
    for (const auto& a : r.at("artifacts")) out << "  " << str(a) << "\n";
  }

  if (r.contains("invariants")) {
    out << "\nresults above hold only under these hardware invariants:\n";
    for (const auto& i : r.at("invariants")) out << "  - " << str(i) << "\n";
  }
  return out.str();
}

}  // namespace miub::cli
