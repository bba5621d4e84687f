// navstyle: classify learner navigation styles from course activity logs and
// produce the analysis report, transition and dropout tables, or a synthetic
// cohort to test them against.
//
// Exit status: 0 on success, 1 for bad input (unreadable files, schema or
// row errors, config errors, validation issues), 2 for anything else.

#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "navstyle/errors.hpp"
#include "navstyle/report.hpp"
#include "navstyle/simgen.hpp"

namespace fs = std::filesystem;
using navstyle::FileBundle;
using navstyle::NamedInput;

namespace {

constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

NamedInput read_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw navstyle::ParseError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return {path, buffer.str()};
}

std::optional<NamedInput> read_optional(const std::string& path) {
  if (path.empty()) return std::nullopt;
  return read_input(path);
}

// With an output directory every file of the bundle is written there.
// Otherwise only the primary file goes to stdout.
void emit(const FileBundle& bundle, const std::string& out_dir, const std::string& primary) {
  if (out_dir.empty()) {
    std::cout << bundle.at(primary);
    std::cout.flush();
    return;
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw navstyle::ParseError("cannot create " + out_dir + ": " + ec.message());
  for (const auto& [name, content] : bundle) {
    const fs::path target = fs::path(out_dir) / name;
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw navstyle::ParseError("cannot write " + target.string());
  }
}

struct CommonArgs {
  std::string course;
  std::string activity;
  std::string comments;
  std::string attempts;
  std::string enrolments;
  std::string out;
  navstyle::RunOptions run;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_stats) {
  cmd->add_option("--course", args.course, "course structure JSON")->required();
  cmd->add_option("--activity", args.activity, "step activity CSV");
  cmd->add_option("--out", args.out, "output directory (default: primary output on stdout)");
  cmd->add_flag("--strict", args.run.strict, "abort on the first malformed row");
  cmd->add_option("--threads", args.run.threads, "worker threads")
      ->check(CLI::Range(1u, 256u));
  cmd->add_option("--week", args.run.week, "week for single-week analyses")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--group-week", args.run.group_week, "week whose labels group dropout")
      ->check(CLI::PositiveNumber);
  if (!with_stats) return;
  cmd->add_option("--comments", args.comments, "comments CSV");
  cmd->add_option("--attempts", args.attempts, "question attempts CSV");
  cmd->add_option("--enrolments", args.enrolments, "enrolments CSV");
  cmd->add_option("--seed", args.run.seed, "Monte-Carlo seed");
  cmd->add_option("--mc-replicates", args.run.mc_replicates, "Monte-Carlo replicates")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--top-k", args.run.top_k, "style paths listed in the census");
  cmd->add_flag("--continuity-correction", args.run.continuity_correction,
                "apply the 0.5 continuity correction to Mann-Whitney z");
}

navstyle::Dataset load(const CommonArgs& args, const std::string& command) {
  navstyle::DatasetInputs inputs{read_input(args.course), read_optional(args.activity),
                                 read_optional(args.comments), read_optional(args.attempts),
                                 read_optional(args.enrolments)};
  return navstyle::load_dataset(inputs, args.run, command);
}

void warn_issues(const navstyle::Dataset& data) {
  for (const auto& tagged : data.issues) {
    std::cerr << "warning: " << tagged.file << " line " << tagged.issue.line << ": "
              << tagged.issue.message << "\n";
  }
  if (data.traces.empty()) std::cerr << "warning: no learner activity\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Navigation-style analytics for step-structured online courses", "navstyle"};
  app.set_version_flag("--version", std::string(NAVSTYLE_VERSION));
  app.require_subcommand(1);

  CommonArgs validate_args, classify_args, report_args, transitions_args, dropout_args;

  auto* validate = app.add_subcommand("validate", "check inputs and list row-level issues");
  add_common(validate, validate_args, true);
  auto* classify = app.add_subcommand("classify", "label every learner's weekly style");
  add_common(classify, classify_args, false);
  auto* report = app.add_subcommand("report", "full analysis report with figure tables");
  add_common(report, report_args, true);
  auto* transitions = app.add_subcommand("transitions", "week-to-week style transitions");
  add_common(transitions, transitions_args, false);
  auto* dropout = app.add_subcommand("dropout", "where learners stop, by style group");
  add_common(dropout, dropout_args, false);

  struct {
    std::string course;
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> cohort;
    std::optional<std::size_t> inactive;
    std::optional<std::size_t> unenrolled;
    unsigned threads = 1;
  } sim;
  auto* simulate = app.add_subcommand("simulate", "generate a synthetic cohort with labels");
  simulate->add_option("--course", sim.course, "course structure JSON")->required();
  simulate->add_option("--config", sim.config, "simulation config JSON (overrides defaults)");
  simulate->add_option("--out", sim.out, "output directory (default: activity CSV on stdout)");
  simulate->add_option("--seed", sim.seed, "simulation seed");
  simulate->add_option("--cohort", sim.cohort, "number of active learners");
  simulate->add_option("--inactive", sim.inactive, "learners who never complete a step");
  simulate->add_option("--unenrolled", sim.unenrolled, "learners who unenrol without activity");
  simulate->add_option("--threads", sim.threads, "worker threads")->check(CLI::Range(1u, 256u));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  if (*validate) {
    const auto data = load(validate_args, "validate");
    const auto outcome = navstyle::validate_dataset(data);
    const std::string text = outcome.report.dump(2) + "\n";
    if (validate_args.out.empty()) {
      std::cout << text;
    } else {
      emit({{"validation.json", text}}, validate_args.out, "validation.json");
    }
    return outcome.clean ? 0 : kExitInput;
  }
  if (*classify) {
    const auto data = load(classify_args, "classify");
    warn_issues(data);
    emit(navstyle::classify_bundle(data, classify_args.run), classify_args.out, "labels.csv");
    return 0;
  }
  if (*report) {
    const auto data = load(report_args, "report");
    warn_issues(data);
    emit(navstyle::report_bundle(data, report_args.run), report_args.out, "report.json");
    return 0;
  }
  if (*transitions) {
    const auto data = load(transitions_args, "transitions");
    warn_issues(data);
    emit(navstyle::transitions_bundle(data, transitions_args.run), transitions_args.out,
         "transitions.json");
    return 0;
  }
  if (*dropout) {
    const auto data = load(dropout_args, "dropout");
    warn_issues(data);
    emit(navstyle::dropout_bundle(data, dropout_args.run), dropout_args.out, "dropout.csv");
    return 0;
  }

  // simulate
  const NamedInput course_input = read_input(sim.course);
  auto course = navstyle::load_course_text(course_input.content);
  nlohmann::json overrides = nlohmann::json::object();
  if (!sim.config.empty()) {
    const NamedInput config_input = read_input(sim.config);
    try {
      overrides = nlohmann::json::parse(config_input.content);
    } catch (const nlohmann::json::parse_error& e) {
      throw navstyle::ConfigError(sim.config + ": " + e.what());
    }
  }
  if (sim.seed) overrides["seed"] = *sim.seed;
  if (sim.cohort) overrides["cohort_size"] = *sim.cohort;
  if (sim.inactive) overrides["inactive_learners"] = *sim.inactive;
  if (sim.unenrolled) overrides["unenrolled_learners"] = *sim.unenrolled;
  const auto config = navstyle::sim_config_from_json(overrides, std::move(course));
  const nlohmann::json flags = {{"config_file", sim.config.empty()
                                                    ? nlohmann::json(nullptr)
                                                    : nlohmann::json(fs::path(sim.config)
                                                                         .filename()
                                                                         .string())}};
  emit(navstyle::simulate_bundle(config, course_input, flags, sim.threads), sim.out,
       "activity.csv");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const navstyle::Error& e) {
    std::cerr << "navstyle: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "navstyle: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
