#include "polarsim/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "polarsim/agents_csv.hpp"
#include "polarsim/errors.hpp"
#include "polarsim/experiment.hpp"
#include "polarsim/report.hpp"
#include "polarsim/session_log.hpp"
#include "polarsim/summary.hpp"

namespace polarsim::cli {

namespace fs = std::filesystem;

namespace {

struct RunArgs {
  std::string config;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::size_t workers = 0;
  std::string report_dir;
  std::string scenario;
  bool charts = false;
};

struct AnalyzeArgs {
  std::string sessions;
  std::string report_dir;
  bool charts = false;
};

void print_degrees(const StudySummary& summary, std::ostream& out) {
  if (summary.degree_changes.empty()) return;
  out << "\nrun_id     agent            type_pre       type_post      degree_delta\n";
  for (const auto& d : summary.degree_changes) {
    char line[160];
    std::snprintf(line, sizeof line, "%-10s %-16s %-14s %-14s %s\n", d.run_id.c_str(), d.agent.str().c_str(),
                  std::string(to_string(d.type_pre)).c_str(), std::string(to_string(d.type_post)).c_str(),
                  d.delta ? (*d.delta > 0 ? "+" + std::to_string(*d.delta) : std::to_string(*d.delta)).c_str() : "-");
    out << line;
  }
}

void emit_summary(const StudySummary& summary, const std::string& report_dir, bool charts, std::ostream& out) {
  out << format_delta_table(summary);
  print_degrees(summary, out);
  out << "\nwords: " << summary.words.messages << " messages, median " << decimal(summary.words.median_words_per_message)
      << " per message, median " << decimal(summary.words.median_words_per_run) << " per run\n";
  if (summary.focal_adoption) {
    out << "adoption (n=" << summary.focal_adoption->n << "):";
    for (const auto& [group, share] : summary.focal_adoption->in_group_share)
      out << ' ' << group.str() << '=' << decimal(share);
    out << " polarized=" << decimal(summary.focal_adoption->polarized_share) << '\n';
  }
  if (!report_dir.empty()) {
    const auto files = write_report(summary, report_dir, charts);
    out << "report: " << files.size() << " files in " << report_dir << '\n';
  }
}

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err) {
  try {
    const auto agents = load_agents(file);
    out << agents.size() << " agents\n";
    return kExitOk;
  } catch (const AgentFileError& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return kExitUsage;
  }
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = load_experiment_spec(args.config);
    if (!args.backend.empty()) spec.backend.kind = parse_backend_kind(args.backend);
    if (!args.scenario.empty()) spec.backend.scenario_file = args.scenario;
    if (args.seed) spec.master_seed = *args.seed;
    if (!args.out_dir.empty()) spec.output_dir = args.out_dir;
    if (args.workers > 0) spec.workers = args.workers;
    if (spec.backend.kind == BackendKind::remote) spec.clock = ClockKind::system;
    spec.validate();
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::vector<RunRecord> records;
  try {
    RunOptions options;
    options.backend_factory = make_backend_factory(spec.backend);
    options.on_run_finished = [&out](const RunRecord& r) {
      out << r.run_id << ' ' << to_string(r.status) << " (" << r.conversation.transcript.size() << " messages)";
      if (!r.error.empty()) out << ": " << r.error;
      out << std::endl;
    };
    records = run_experiment(spec, options);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  std::size_t aborted = 0;
  for (const auto& r : records) aborted += r.status == RunStatus::aborted ? 1 : 0;
  out << spec.name << ": " << records.size() - aborted << " completed, " << aborted << " aborted, logs in "
      << spec.output_dir.string() << '\n';

  if (!args.report_dir.empty()) {
    try {
      emit_summary(summarize(records), args.report_dir, args.charts, out);
    } catch (const EmptySample& e) {
      err << "error: " << e.what() << '\n';
      return kExitPartial;
    }
  }
  return aborted == 0 ? kExitOk : kExitPartial;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
  if (!fs::is_directory(args.sessions)) {
    err << "error: not a directory: " << args.sessions << '\n';
    return kExitUsage;
  }
  try {
    const auto records = load_runs(args.sessions);
    emit_summary(summarize(records), args.report_dir, args.charts, out);
    return kExitOk;
  } catch (const EmptySample& e) {
    err << "error: " << e.what() << '\n';
    return kExitPartial;
  } catch (const CorruptLine& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-agent affective polarization simulator", "polarsim"};
  app.require_subcommand(1);

  std::string agents_file;
  auto* validate = app.add_subcommand("validate", "Check an agent CSV file");
  validate->add_option("agents", agents_file, "Agent CSV file")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Execute an experiment spec");
  run_cmd->add_option("--config", run_args.config, "Experiment spec (JSON)")->required();
  run_cmd->add_option("--backend", run_args.backend, "scripted|remote");
  run_cmd->add_option("--seed", run_args.seed, "Master seed override");
  run_cmd->add_option("--out", run_args.out_dir, "Session log directory");
  run_cmd->add_option("--workers", run_args.workers, "Concurrent runs");
  run_cmd->add_option("--report", run_args.report_dir, "Write report tables here");
  run_cmd->add_option("--scenario", run_args.scenario, "Scripted scenario file");
  run_cmd->add_flag("--charts", run_args.charts, "Also write SVG charts");

  AnalyzeArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "Summarize session logs");
  analyze->add_option("sessions", analyze_args.sessions, "Session log directory")->required();
  analyze->add_option("--report", analyze_args.report_dir, "Write report tables here");
  analyze->add_flag("--charts", analyze_args.charts, "Also write SVG charts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(agents_file, out, err);
    if (*run_cmd) return cmd_run(run_args, out, err);
    return cmd_analyze(analyze_args, out, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace polarsim::cli
