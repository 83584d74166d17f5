#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "miub/engine.hpp"
#include "miub/model.hpp"
#include "miub/verify.hpp"

namespace miub::cli {

inline constexpr const char* kToolName = "miub";
inline constexpr const char* kToolVersion = "0.1.0";

enum class ReportFormat { Json, Text };

struct WorkloadDigest {
  std::size_t length = 0;
  std::size_t critical = 0;
  std::uint64_t hash = 0;

  static WorkloadDigest of(const TaskTrace& task);
};

struct RunReport {
  std::string command;
  HardwareConfig hardware;
  WorkloadDigest workload;
  ArbitrationPolicy policy;
  Cycle bound = 0;

  std::optional<AdversarialConfig> config;
  std::optional<SimResult> simulation;
  bool include_events = false;

  std::vector<LemmaReport> lemmas;
  std::optional<SearchReport> search;
  std::vector<std::string> artifacts;  // files written alongside the report
};

/// Critical I_T within the bound (when simulated) and every embedded lemma and
/// search report passed.
bool report_passed(const RunReport& report);

/// 0 when the report passed, 1 otherwise.
int exit_code_for(const RunReport& report);

nlohmann::json report_to_json(const RunReport& report);
nlohmann::json config_to_json(const AdversarialConfig& config);

/// Hardware facts every result in a report depends on, one sentence each.
std::vector<std::string> cited_invariants(const HardwareConfig& hw);

/// JSON: canonical (sorted keys, integers only, two-space indent, trailing
/// newline). Text: rendered from the JSON form, so stored reports re-render
/// identically.
std::string emit_report(const RunReport& report, ReportFormat format);
std::string render_text(const nlohmann::json& report);
std::string canonical_dump(const nlohmann::json& j);

std::string hex(Address a);

}  // namespace miub::cli
