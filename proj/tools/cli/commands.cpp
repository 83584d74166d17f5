#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "cli/config_io.hpp"
#include "cli/report.hpp"
#include "cli/trace_io.hpp"
#include "miub/adversary.hpp"
#include "miub/engine.hpp"
#include "miub/verify.hpp"

namespace miub::cli {

namespace fs = std::filesystem;

namespace {

struct Output {
  std::string path;
  std::string format = "json";

  void attach(CLI::App* cmd) {
    cmd->add_option("--out", path, "Report destination (default standard output)");
    cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "text"}));
  }

  ReportFormat report_format() const { return format == "text" ? ReportFormat::Text : ReportFormat::Json; }

  void write(const std::string& bytes, std::ostream& out) const {
    if (path.empty()) {
      out << bytes;
      return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << bytes;
  }
};

void write_file(const fs::path& p, const std::string& bytes) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << bytes;
}

TaskTrace load_task(const std::string& path) {
  auto task = parse_trace(read_file(path));
  if (task.empty()) throw std::invalid_argument(path + ": target trace has no accesses");
  return task;
}

RunReport base_report(const std::string& command, const HardwareConfig& hw, const TaskTrace& task,
                      const ArbitrationPolicy& policy) {
  RunReport r;
  r.command = command;
  r.hardware = hw;
  r.workload = WorkloadDigest::of(task);
  r.policy = policy;
  r.bound = miub_bound(hw.n_cores, hw.l_mem, task.critical_count());
  return r;
}

int finish(const RunReport& report, const Output& output, std::ostream& out) {
  output.write(emit_report(report, output.report_format()), out);
  return exit_code_for(report);
}

std::vector<Cycle> offset_sweep(Cycle l_mem, Cycle step) {
  std::vector<Cycle> grid;
  for (Cycle d = -3 * l_mem; d <= l_mem; d += step) grid.push_back(d);
  return grid;
}

}  // namespace

int run_subcommand(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multicore interference upper bound: simulator and verifier", "miub"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  // bound
  auto* bound_cmd = app.add_subcommand("bound", "Print crit * (cores - 1) * l_mem");
  std::uint32_t b_cores = 0;
  std::int64_t b_lmem = 0;
  std::uint64_t b_crit = 0;
  bound_cmd->add_option("--cores", b_cores, "Core count N")->required();
  bound_cmd->add_option("--lmem", b_lmem, "Miss service time in cycles")->required()->check(CLI::NonNegativeNumber);
  bound_cmd->add_option("--crit", b_crit, "Number of critical accesses")->required();

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one adversarial configuration");
  std::string config_path, task_path, adv_path;
  bool with_events = false;
  Output sim_out;
  sim_cmd->add_option("--config", config_path, "System config (JSON)")->required();
  sim_cmd->add_option("--task", task_path, "Target trace")->required();
  sim_cmd->add_option("--adversaries", adv_path, "Adversarial configuration (JSON)")->required();
  sim_cmd->add_flag("--events", with_events, "Include the event log");
  sim_out.attach(sim_cmd);

  // baseline
  auto* base_cmd = app.add_subcommand("baseline", "Build, write and simulate the baseline configuration");
  std::string emit_dir;
  Output base_out;
  base_cmd->add_option("--config", config_path, "System config (JSON)")->required();
  base_cmd->add_option("--task", task_path, "Target trace")->required();
  base_cmd->add_option("--emit-dir", emit_dir, "Directory for adversary traces and adversaries.json");
  base_cmd->add_flag("--events", with_events, "Include the event log");
  base_out.attach(base_cmd);

  // check-lemmas
  auto* lemma_cmd = app.add_subcommand("check-lemmas", "Spatial, temporal, pattern and dominance checks");
  std::uint64_t u_tags = 2, u_sets = 2;
  std::int64_t offset_step = 0;
  std::uint32_t temporal_r = 0;
  std::size_t dom_samples = 0;
  std::uint64_t seed = 1;
  std::string dom_metric = "critical";
  Output lemma_out;
  lemma_cmd->add_option("--config", config_path, "System config (JSON)")->required();
  lemma_cmd->add_option("--task", task_path, "Target trace")->required();
  lemma_cmd->add_option("--universe-tags", u_tags, "Tags in the spatial universe")->check(CLI::PositiveNumber);
  lemma_cmd->add_option("--universe-sets", u_sets, "Sets in the spatial universe")->check(CLI::PositiveNumber);
  lemma_cmd->add_option("--offset-step", offset_step, "Temporal sweep step (default l_mem)")
      ->check(CLI::PositiveNumber);
  lemma_cmd->add_option("--temporal-adversaries", temporal_r, "Adversaries in the temporal sweep (default N-1)");
  lemma_cmd->add_option("--dominance-samples", dom_samples, "Sampled configurations for the dominance check");
  lemma_cmd->add_option("--seed", seed, "Sampling seed");
  lemma_cmd->add_option("--dominance-metric", dom_metric, "Interference compared by the dominance check")
      ->check(CLI::IsMember({"critical", "all"}));
  lemma_out.attach(lemma_cmd);

  // search
  auto* search_cmd = app.add_subcommand("search", "Exhaustive or sampled search for bound violations");
  std::string space_path;
  unsigned threads = 0;
  Output search_out;
  search_cmd->add_option("--space", space_path, "Search space (JSON)")->required();
  search_cmd->add_option("--task", task_path, "Target trace")->required();
  search_cmd->add_option("--threads", threads, "Worker threads (overrides the space document)");
  search_out.attach(search_cmd);

  // report
  auto* report_cmd = app.add_subcommand("report", "Re-render a stored JSON report");
  std::string in_path;
  Output report_out;
  report_out.format = "text";
  report_cmd->add_option("--in", in_path, "Stored JSON report")->required();
  report_out.attach(report_cmd);

  std::vector<const char*> argv{"miub"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInputError;
  }

  try {
    if (*bound_cmd) {
      out << miub_bound(b_cores, b_lmem, b_crit) << "\n";
      return kExitPass;
    }

    if (*sim_cmd) {
      const auto sys = parse_system_config(read_file(config_path));
      const auto task = load_task(task_path);
      const auto cfg = parse_adversaries(read_file(adv_path), fs::path(adv_path).parent_path());
      RunReport r = base_report("simulate", sys.hardware, task, sys.policy);
      r.config = cfg;
      r.simulation = simulate(sys.hardware, task, cfg, sys.policy, SimOptions{.record_events = with_events});
      r.include_events = with_events;
      return finish(r, sim_out, out);
    }

    if (*base_cmd) {
      const auto sys = parse_system_config(read_file(config_path));
      const auto task = load_task(task_path);
      const auto cfg = build_baseline(task, sys.hardware);
      RunReport r = base_report("baseline", sys.hardware, task, sys.policy);
      if (!emit_dir.empty()) {
        fs::create_directories(emit_dir);
        nlohmann::json doc = {{"sync_mode", sync_mode_name(cfg.sync_mode)}, {"adversaries", nlohmann::json::array()}};
        for (std::size_t k = 0; k < cfg.adversaries.size(); ++k) {
          const std::string name = "adversary_" + std::to_string(k + 1) + ".trace";
          write_file(fs::path(emit_dir) / name, render_trace(cfg.adversaries[k].trace));
          doc["adversaries"].push_back({{"start_offset", cfg.adversaries[k].start_offset}, {"trace", name}});
          r.artifacts.push_back(name);
        }
        write_file(fs::path(emit_dir) / "adversaries.json", canonical_dump(doc));
        r.artifacts.push_back("adversaries.json");
      }
      r.config = cfg;
      r.simulation = simulate(sys.hardware, task, cfg, sys.policy, SimOptions{.record_events = with_events});
      r.include_events = with_events;
      r.lemmas.push_back(check_pattern_lemma(sys.hardware, task));
      return finish(r, base_out, out);
    }

    if (*lemma_cmd) {
      const auto sys = parse_system_config(read_file(config_path));
      const auto task = load_task(task_path);
      const auto& hw = sys.hardware;
      if (u_sets > hw.geometry.num_sets) throw std::invalid_argument("--universe-sets exceeds num_sets");
      RunReport r = base_report("check-lemmas", hw, task, sys.policy);

      r.lemmas.push_back(check_spatial_lemma(hw, SearchSpace::grid_universe(u_tags, u_sets, hw.geometry)));

      const std::uint32_t n_adv = hw.n_cores - 1;
      const std::uint32_t rr = temporal_r == 0 ? n_adv : temporal_r;
      if (rr > n_adv) throw std::invalid_argument("--temporal-adversaries exceeds cores - 1");
      r.lemmas.push_back(check_temporal_lemma(hw, rr, offset_sweep(hw.l_mem, offset_step > 0 ? offset_step : hw.l_mem)));

      r.lemmas.push_back(check_pattern_lemma(hw, task));

      std::vector<AdversarialConfig> configs;
      if (hw.n_cores >= 2) configs.push_back(build_baseline(task, hw));
      if (dom_samples > 0) {
        SearchSpace space;
        space.n_cores = hw.n_cores;
        space.geometry = hw.geometry;
        space.l_mem = hw.l_mem;
        space.address_universe = SearchSpace::grid_universe(u_tags, u_sets, hw.geometry);
        space.max_adversary_trace_len = task.size();
        space.target_length = task.size();
        space.offset_grid = offset_sweep(hw.l_mem, hw.l_mem);
        space.gap_grid = {0, hw.l_mem};
        const auto sampled = sample_configs(space, dom_samples, seed);
        configs.insert(configs.end(), sampled.begin(), sampled.end());
      }
      r.lemmas.push_back(check_policy_dominance(
          hw, task, configs, dom_metric == "all" ? DominanceMetric::All : DominanceMetric::Critical));
      return finish(r, lemma_out, out);
    }

    if (*search_cmd) {
      auto spec = parse_search_spec(read_file(space_path));
      const auto task = load_task(task_path);
      if (threads > 0) spec.threads = threads;
      VerifyOptions opts;
      opts.budget = spec.budget;
      opts.threads = spec.threads;
      const auto started = std::chrono::steady_clock::now();
      auto report = verify_upper_bound(spec.space, task, spec.policy, spec.mode, opts);
      const std::chrono::duration<double> took = std::chrono::steady_clock::now() - started;
      err << "search: " << report.configs_checked << " configurations in " << took.count() << " s\n";
      RunReport r = base_report("search", spec.space.hardware(), task, spec.policy);
      r.search = std::move(report);
      return finish(r, search_out, out);
    }

    if (*report_cmd) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_file(in_path));
      } catch (const nlohmann::json::parse_error& e) {
        throw SchemaError(in_path + ": not valid JSON: " + e.what());
      }
      if (!j.is_object() || !j.contains("verdict") || !j.contains("command")) {
        throw SchemaError(in_path + ": not a miub report");
      }
      report_out.write(report_out.report_format() == ReportFormat::Json ? canonical_dump(j) : render_text(j), out);
      return j.at("verdict") == "pass" ? kExitPass : kExitViolation;
    }
  } catch (const ParseError& e) {
    err << "trace error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const SchemaError& e) {
    err << "schema error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const HardwareInvariantError& e) {
    err << "hardware invariant violation: " << e.result().summary() << "\n";
    return kExitInputError;
  } catch (const BudgetExceeded& e) {
    err << "search space too large: " << e.what() << "\n";
    return kExitInputError;
  } catch (const nlohmann::json::exception& e) {
    err << "malformed report: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace miub::cli
