#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "navstyle/classify.hpp"
#include "navstyle/course.hpp"
#include "navstyle/ingest.hpp"
#include "navstyle/simgen.hpp"

namespace navstyle {

// Output file name -> contents. Ordered, so writing is deterministic.
using FileBundle = std::map<std::string, std::string>;

struct NamedInput {
  std::string path;     // as given on the command line
  std::string content;  // raw bytes
};

struct RunOptions {
  int week = 1;        // week for the single-week analyses
  int group_week = 1;  // week whose labels group the dropout analyses
  std::uint64_t seed = 20200301;
  std::size_t mc_replicates = 10000;
  bool strict = false;
  std::size_t top_k = 10;
  bool continuity_correction = false;
  unsigned threads = 1;  // not recorded: outputs do not depend on it
};

/// Provenance embedded in every output. `generated_at` is written only to
/// manifest.json so that report.json depends on inputs and flags alone.
struct RunManifest {
  std::string tool_version;
  std::string command;
  std::map<std::string, nlohmann::json> inputs;  // role -> {file, sha256}
  std::string course_digest;
  nlohmann::json flags = nlohmann::json::object();
  nlohmann::json seeds = nlohmann::json::object();
  std::string generated_at;
};

/// Wall clock, or SOURCE_DATE_EPOCH when set.
std::string current_timestamp();

nlohmann::json to_json(const RunManifest& manifest, bool with_timestamp);

struct TaggedIssue {
  std::string file;
  RowIssue issue;
};

struct Dataset {
  CourseStructure course;
  TraceMap traces;  // every learner seen in the activity log
  TraceMap active;
  std::vector<CommentRecord> comments;
  std::vector<AttemptRecord> attempts;
  std::vector<EnrolmentRecord> enrolments;
  std::vector<TaggedIssue> issues;  // skipped rows and unknown steps
  RunManifest manifest;
};

struct DatasetInputs {
  NamedInput course;
  std::optional<NamedInput> activity;
  std::optional<NamedInput> comments;
  std::optional<NamedInput> attempts;
  std::optional<NamedInput> enrolments;
};

/// Parses and cross-checks every input. Under strict options the first bad
/// row throws; otherwise bad rows are skipped and recorded. Rows naming steps
/// outside the course are always recorded as issues and kept out of the
/// analyses.
Dataset load_dataset(const DatasetInputs& inputs, const RunOptions& options,
                     const std::string& command);

struct ValidationOutcome {
  bool clean = true;
  nlohmann::json report;
};

ValidationOutcome validate_dataset(const Dataset& data);

/// labels.csv (`learner_id,week_1..week_W,style_path`), weekly_counts.csv
/// and manifest.json.
FileBundle classify_bundle(const Dataset& data, const RunOptions& options);

/// report.json, fig1..fig7 and manifest.json.
FileBundle report_bundle(const Dataset& data, const RunOptions& options);

/// transitions.json (every consecutive week pair) and manifest.json.
FileBundle transitions_bundle(const Dataset& data, const RunOptions& options);

/// dropout.csv, dropout_summary.json and manifest.json.
FileBundle dropout_bundle(const Dataset& data, const RunOptions& options);

/// activity.csv, comments.csv, attempts.csv, enrolments.csv,
/// ground_truth.csv and manifest.json.
FileBundle simulate_bundle(const SimConfig& config, const NamedInput& course_input,
                           const nlohmann::json& flags, unsigned threads);

/// Labels CSV for a style table.
std::string labels_csv(const StyleTable& table);
std::string weekly_counts_csv(const StyleTable& table);

}  // namespace navstyle
