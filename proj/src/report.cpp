#include "navstyle/report.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "navstyle/csv.hpp"
#include "navstyle/digest.hpp"
#include "navstyle/errors.hpp"
#include "navstyle/format.hpp"
#include "navstyle/metrics.hpp"
#include "navstyle/stats.hpp"
#include "navstyle/temporal.hpp"

#ifndef NAVSTYLE_VERSION
#define NAVSTYLE_VERSION "0.0.0"
#endif

namespace navstyle {
namespace {

using nlohmann::json;

constexpr std::array<StepKind, 3> kSpecialKinds = {StepKind::Discussion, StepKind::Experiment,
                                                   StepKind::Assessment};

std::string code_of(NavStyle s) { return std::string(1, style_code(s)); }

json optional_number(const std::optional<double>& value) {
  return value ? json(*value) : json(nullptr);
}

json input_entry(const NamedInput& input) {
  return {{"file", std::filesystem::path(input.path).filename().string()},
          {"sha256", sha256_hex(input.content)}};
}

template <typename Record>
void absorb_issues(Dataset& data, const std::string& file, const ParseResult<Record>& parsed) {
  for (const auto& issue : parsed.issues) data.issues.push_back({file, issue});
}

// Drops records whose step is not in the course, recording each as an issue.
template <typename Record>
std::vector<Record> keep_known_steps(Dataset& data, const std::string& file,
                                     const ParseResult<Record>& parsed) {
  for (const auto& issue : find_unknown_steps(parsed, data.course, file.c_str())) {
    data.issues.push_back({file, issue});
  }
  std::vector<Record> kept;
  kept.reserve(parsed.records.size());
  for (const auto& r : parsed.records) {
    if (data.course.contains(r.step)) kept.push_back(r);
  }
  return kept;
}

json flags_json(const RunOptions& options) {
  return {{"week", options.week},
          {"group_week", options.group_week},
          {"mc_replicates", options.mc_replicates},
          {"strict", options.strict},
          {"top_k", options.top_k},
          {"continuity_correction", options.continuity_correction}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json kind_distribution_json(const std::map<StepKind, KindShare>& dist) {
  json kinds = json::object();
  std::size_t learners = 0;
  for (const auto& [kind, share] : dist) {
    kinds[std::string(to_string(kind))] = {{"count", share.count}, {"proportion", share.proportion}};
    learners += share.count;
  }
  return {{"learners", learners}, {"kinds", kinds}};
}

json style_share_json(const StyleShare& share) {
  return {{"numerator", share.numerator},
          {"denominator", share.denominator},
          {"proportion", optional_number(share.proportion)}};
}

// Summaries alone, for cohorts where the tests are undefined.
json summaries_only(const std::map<std::string, double>& metric, const StyleLabels& labels,
                    const std::string& name, const std::string& reason) {
  std::array<std::vector<double>, 3> by_style;
  for (const auto& [learner, value] : metric) {
    if (auto it = labels.find(learner); it != labels.end()) {
      by_style[style_slot(it->second)].push_back(value);
    }
  }
  json j;
  j["metric"] = name;
  j["groups"] = json::object();
  for (NavStyle style : kAllStyles) {
    const auto& values = by_style[style_slot(style)];
    j["groups"][code_of(style)] = values.empty() ? json(nullptr) : to_json(describe(values));
  }
  j["normality"] = nullptr;
  j["omnibus"] = nullptr;
  j["pairwise"] = json::array();
  j["warnings"] = json::array({reason});
  return j;
}

json comparison_json(const std::map<std::string, double>& metric, const StyleLabels& labels,
                     const std::string& name, const RunOptions& options,
                     std::vector<std::string>& warnings) {
  CompareOptions compare;
  compare.monte_carlo = {options.seed, options.mc_replicates, options.threads};
  compare.continuity_correction = options.continuity_correction;
  try {
    const auto report = compare_groups(metric, labels, name, compare);
    for (const auto& w : report.warnings) warnings.push_back(name + ": " + w);
    return to_json(report);
  } catch (const TooFewGroups& e) {
    warnings.push_back(name + ": tests skipped, " + e.what());
    return summaries_only(metric, labels, name, e.what());
  }
}

std::string fig1_csv(const TraceMap& active, const CourseStructure& course, int week,
                     const StyleLabels& labels, json& histogram) {
  const std::size_t main_count = course.main_steps(week).size();
  std::map<std::string, std::vector<std::size_t>> bins;
  for (const char* group : {"all", "S", "G", "M"}) bins[group].assign(main_count + 1, 0);
  for (const auto& [id, trace] : active) {
    const std::size_t visited = main_steps_visited(trace, course, week);
    ++bins["all"][visited];
    if (auto it = labels.find(id); it != labels.end()) ++bins[code_of(it->second)][visited];
  }
  histogram = {{"week", week}, {"main_steps", main_count}, {"bins", bins["all"]},
               {"by_style", {{"S", bins["S"]}, {"G", bins["G"]}, {"M", bins["M"]}}}};

  std::string out = "group,main_steps_visited,count\n";
  for (const char* group : {"all", "S", "G", "M"}) {
    for (std::size_t k = 0; k <= main_count; ++k) {
      out += std::string(group) + "," + std::to_string(k) + "," + std::to_string(bins[group][k]) +
             "\n";
    }
  }
  return out;
}

std::string fig2_csv(const TraceMap& active, const CourseStructure& course, int week,
                     const StyleLabels& labels, json& before_after) {
  struct Accumulator {
    std::size_t learners = 0;
    std::size_t before = 0;
    std::size_t after = 0;
  };
  std::string out = "group,kind,learners,mean_before,mean_after\n";
  before_after = json::array();
  for (StepKind kind : kSpecialKinds) {
    std::map<std::string, Accumulator> acc;
    for (const auto& [id, trace] : active) {
      auto counts = main_before_after(trace, course, week, kind);
      if (!counts) continue;
      std::vector<std::string> groups = {"all"};
      if (auto it = labels.find(id); it != labels.end()) groups.push_back(code_of(it->second));
      for (const auto& g : groups) {
        auto& a = acc[g];
        ++a.learners;
        a.before += counts->before;
        a.after += counts->after;
      }
    }
    for (const char* group : {"all", "S", "G", "M"}) {
      const Accumulator a = acc.contains(group) ? acc[group] : Accumulator{};
      json entry = {{"group", group}, {"kind", to_string(kind)}, {"learners", a.learners},
                    {"mean_before", nullptr}, {"mean_after", nullptr}};
      std::string before_text, after_text;
      if (a.learners > 0) {
        const double n = static_cast<double>(a.learners);
        entry["mean_before"] = static_cast<double>(a.before) / n;
        entry["mean_after"] = static_cast<double>(a.after) / n;
        before_text = format_decimal(static_cast<double>(a.before) / n);
        after_text = format_decimal(static_cast<double>(a.after) / n);
      }
      before_after.push_back(entry);
      out += std::string(group) + "," + std::string(to_string(kind)) + "," +
             std::to_string(a.learners) + "," + before_text + "," + after_text + "\n";
    }
  }
  return out;
}

std::string fig3_csv(const std::map<std::string, double>& comments,
                     const std::map<std::string, double>& attempts, const StyleLabels& labels) {
  std::string out = "metric,style,value,count\n";
  for (const auto& [name, metric] :
       std::vector<std::pair<std::string, const std::map<std::string, double>*>>{
           {"comments", &comments}, {"attempts", &attempts}}) {
    std::array<std::map<long, std::size_t>, 3> histogram;
    for (const auto& [id, value] : *metric) {
      if (auto it = labels.find(id); it != labels.end()) {
        ++histogram[style_slot(it->second)][static_cast<long>(value)];
      }
    }
    for (NavStyle style : kAllStyles) {
      for (const auto& [value, count] : histogram[style_slot(style)]) {
        out += name + "," + code_of(style) + "," + std::to_string(value) + "," +
               std::to_string(count) + "\n";
      }
    }
  }
  return out;
}

std::string fig4_csv(const std::map<std::string, double>& rates, const StyleLabels& labels) {
  // [0,10), [10,20), ..., [90,100]
  std::array<std::array<std::size_t, 10>, 3> bins{};
  std::array<std::size_t, 3> totals{};
  for (const auto& [id, rate] : rates) {
    auto it = labels.find(id);
    if (it == labels.end()) continue;
    const auto slot = style_slot(it->second);
    const auto bin = std::min<std::size_t>(9, static_cast<std::size_t>(rate * 10.0 + 1e-9));
    ++bins[slot][bin];
    ++totals[slot];
  }
  std::string out = "style,bin_lower,bin_upper,count,proportion\n";
  for (NavStyle style : kAllStyles) {
    const auto slot = style_slot(style);
    for (std::size_t b = 0; b < 10; ++b) {
      const auto share = proportion(bins[slot][b], totals[slot]);
      out += code_of(style) + "," + std::to_string(b * 10) + "," + std::to_string((b + 1) * 10) +
             "," + std::to_string(bins[slot][b]) + "," + (share ? format_decimal(*share) : "") +
             "\n";
    }
  }
  return out;
}

json weekly_counts_json(const StyleTable& table) {
  json rows = json::array();
  for (int w = 1; w <= table.weeks; ++w) {
    const auto& c = table.weekly_counts[static_cast<std::size_t>(w - 1)];
    rows.push_back({{"week", w}, {"S", c[0]}, {"G", c[1]}, {"M", c[2]},
                    {"total", c[0] + c[1] + c[2]}});
  }
  return rows;
}

json completion_json(const std::array<CompletionShare, 3>& shares) {
  json j = json::object();
  for (NavStyle style : kAllStyles) {
    const auto& s = shares[style_slot(style)];
    j[code_of(style)] = {{"group_size", s.group_size},
                         {"completed", s.completed},
                         {"continued_past_week1", s.continued_past_week1},
                         {"completed_proportion", optional_number(s.completed_proportion)},
                         {"continued_proportion", optional_number(s.continued_proportion)}};
  }
  return j;
}

json dropout_summary_json(const DropoutDistribution& dist, const CourseStructure& course,
                          const TraceMap& active, const StyleLabels& labels, int group_week) {
  const auto periodicity = periodicity_indices(dist, course);
  json j;
  j["group_week"] = group_week;
  j["skipped"] = dist.skipped;
  j["group_sizes"] = json::object();
  j["periodicity_index"] = json::object();
  for (NavStyle style : kAllStyles) {
    j["group_sizes"][code_of(style)] = dist.group_sizes[style_slot(style)];
    j["periodicity_index"][code_of(style)] = optional_number(periodicity[style_slot(style)]);
  }
  j["completion"] = completion_json(completion_summary(active, course, labels));
  return j;
}

void require_week(const CourseStructure& course, int week, const char* flag) {
  if (week < 1 || week > course.week_count()) {
    throw UnknownWeek(std::string(flag) + " " + std::to_string(week) + " is outside 1.." +
                      std::to_string(course.week_count()));
  }
}

}  // namespace

std::string current_timestamp() {
  using namespace std::chrono;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    return format_timestamp(Timestamp{seconds{std::strtoll(epoch, nullptr, 10)}});
  }
  return format_timestamp(floor<seconds>(system_clock::now()));
}

json to_json(const RunManifest& manifest, bool with_timestamp) {
  json j;
  j["tool"] = "navstyle";
  j["tool_version"] = manifest.tool_version;
  j["command"] = manifest.command;
  j["inputs"] = manifest.inputs;
  j["course_digest"] = manifest.course_digest;
  j["flags"] = manifest.flags;
  j["seeds"] = manifest.seeds;
  if (with_timestamp) j["generated_at"] = manifest.generated_at;
  return j;
}

Dataset load_dataset(const DatasetInputs& inputs, const RunOptions& options,
                     const std::string& command) {
  Dataset data;
  data.course = load_course_text(inputs.course.content);
  require_week(data.course, options.week, "--week");
  require_week(data.course, options.group_week, "--group-week");

  auto& manifest = data.manifest;
  manifest.tool_version = NAVSTYLE_VERSION;
  manifest.command = command;
  manifest.course_digest = sha256_hex(course_to_json(data.course));
  manifest.inputs["course"] = input_entry(inputs.course);
  manifest.flags = flags_json(options);
  manifest.seeds = {{"monte_carlo", options.seed}};
  manifest.generated_at = current_timestamp();

  const RowPolicy policy = options.strict ? RowPolicy::Strict : RowPolicy::Skip;
  auto parse = [&](const std::optional<NamedInput>& input, const char* role, auto parser) {
    using Result = decltype(parser(std::declval<std::istream&>(), policy));
    if (!input) return Result{};
    manifest.inputs[role] = input_entry(*input);
    std::istringstream stream(input->content);
    Result parsed = parser(stream, policy);
    absorb_issues(data, role, parsed);
    return parsed;
  };

  auto visits = parse(inputs.activity, "activity",
                      [](std::istream& in, RowPolicy p) { return parse_activity(in, p); });
  auto comments = parse(inputs.comments, "comments",
                        [](std::istream& in, RowPolicy p) { return parse_comments(in, p); });
  auto attempts = parse(inputs.attempts, "attempts",
                        [](std::istream& in, RowPolicy p) { return parse_attempts(in, p); });
  auto enrolments = parse(inputs.enrolments, "enrolments",
                          [](std::istream& in, RowPolicy p) { return parse_enrolments(in, p); });

  const auto known_visits = keep_known_steps(data, "activity", visits);
  data.comments = keep_known_steps(data, "comments", comments);
  data.attempts = keep_known_steps(data, "attempts", attempts);
  data.enrolments = std::move(enrolments.records);
  data.traces = build_traces(known_visits);
  data.active = active_learners(data.traces);
  return data;
}

ValidationOutcome validate_dataset(const Dataset& data) {
  ValidationOutcome outcome;
  json issues = json::array();
  for (const auto& tagged : data.issues) {
    issues.push_back(
        {{"file", tagged.file}, {"line", tagged.issue.line}, {"message", tagged.issue.message}});
  }
  outcome.clean = data.issues.empty();
  outcome.report = {{"clean", outcome.clean},
                    {"issues", issues},
                    {"course", {{"weeks", data.course.week_count()},
                                {"total_steps", data.course.total_steps()}}},
                    {"learners", data.traces.size()},
                    {"active_learners", data.active.size()},
                    {"comments", data.comments.size()},
                    {"attempts", data.attempts.size()},
                    {"enrolments", data.enrolments.size()},
                    {"remaining_enrolments", remaining_enrolments(data.enrolments)},
                    {"manifest", to_json(data.manifest, false)}};
  return outcome;
}

std::string labels_csv(const StyleTable& table) {
  std::string out = "learner_id";
  for (int w = 1; w <= table.weeks; ++w) out += ",week_" + std::to_string(w);
  out += ",style_path\n";
  for (const auto& [id, path] : table.paths) {
    out += csv::escape(id);
    for (char c : path.str()) {
      out.push_back(',');
      out.push_back(c);
    }
    out += "," + path.str() + "\n";
  }
  return out;
}

std::string weekly_counts_csv(const StyleTable& table) {
  std::string out = "week,S,G,M,total\n";
  for (int w = 1; w <= table.weeks; ++w) {
    const auto& c = table.weekly_counts[static_cast<std::size_t>(w - 1)];
    out += std::to_string(w) + "," + std::to_string(c[0]) + "," + std::to_string(c[1]) + "," +
           std::to_string(c[2]) + "," + std::to_string(c[0] + c[1] + c[2]) + "\n";
  }
  return out;
}

FileBundle classify_bundle(const Dataset& data, const RunOptions& options) {
  const StyleTable table = cohort_styles(data.active, data.course, options.threads);
  FileBundle bundle;
  bundle["labels.csv"] = labels_csv(table);
  bundle["weekly_counts.csv"] = weekly_counts_csv(table);
  bundle["manifest.json"] = dump(to_json(data.manifest, true));
  return bundle;
}

FileBundle transitions_bundle(const Dataset& data, const RunOptions& options) {
  const StyleTable table = cohort_styles(data.active, data.course, options.threads);
  json transitions = json::array();
  for (const auto& m : all_transitions(table)) transitions.push_back(to_json(m));
  FileBundle bundle;
  bundle["transitions.json"] =
      dump({{"manifest", to_json(data.manifest, false)}, {"transitions", transitions}});
  bundle["manifest.json"] = dump(to_json(data.manifest, true));
  return bundle;
}

FileBundle dropout_bundle(const Dataset& data, const RunOptions& options) {
  const StyleTable table = cohort_styles(data.active, data.course, options.threads);
  const StyleLabels labels = table.labels_for_week(options.group_week);
  const auto dist = dropout_distribution(data.active, data.course, labels);
  FileBundle bundle;
  bundle["dropout.csv"] = dropout_csv(dist, data.course);
  json summary = dropout_summary_json(dist, data.course, data.active, labels, options.group_week);
  summary["manifest"] = to_json(data.manifest, false);
  bundle["dropout_summary.json"] = dump(summary);
  bundle["manifest.json"] = dump(to_json(data.manifest, true));
  return bundle;
}

FileBundle report_bundle(const Dataset& data, const RunOptions& options) {
  const auto& course = data.course;
  const int week = options.week;
  const StyleTable table = cohort_styles(data.active, course, options.threads);
  const StyleLabels labels = table.labels_for_week(week);
  std::vector<std::string> warnings;
  for (const auto& tagged : data.issues) {
    warnings.push_back(tagged.file + " line " + std::to_string(tagged.issue.line) + ": " +
                       tagged.issue.message);
  }
  if (data.active.empty()) warnings.push_back("no active learners");
  if (data.active.size() == 1) warnings.push_back("single active learner: summaries are degenerate");

  FileBundle bundle;
  json report;
  report["manifest"] = to_json(data.manifest, false);
  report["semantics"] = {
      {"correct_answer_rate", "eventually_correct_over_distinct_questions"},
      {"attempts", "raw_submissions_including_retries"},
      {"mann_whitney_u", "u_of_first_group_in_pair"},
      {"continuity_correction", options.continuity_correction},
      {"p_values", "two_sided"},
      {"normality_p", "monte_carlo_lilliefors"},
      {"dropout_step", "last_first_visited_step"},
      {"sd", "sample_n_minus_1"}};
  report["cohort"] = {{"learners", data.traces.size()},
                      {"active_learners", data.active.size()},
                      {"weeks", course.week_count()},
                      {"total_steps", course.total_steps()},
                      {"analysis_week", week}};

  // Weekly style counts (Fig. 5 data).
  report["weekly_counts"] = weekly_counts_json(table);
  bundle["fig5_weekly_counts.csv"] = weekly_counts_csv(table);

  auto start = kind_distribution_json(start_distribution(data.active, course, week));
  start["week"] = week;
  report["start_distribution"] = start;
  auto last = kind_distribution_json(last_distribution(data.active, course, week));
  last["week"] = week;
  report["last_distribution"] = last;
  const auto review = last_step_is_review(data.active, course, week, labels);
  report["last_step_is_review"] = {{"S", style_share_json(review[0])},
                                   {"G", style_share_json(review[1])},
                                   {"M", style_share_json(review[2])}};

  json histogram;
  bundle["fig1_main_histogram.csv"] = fig1_csv(data.active, course, week, labels, histogram);
  report["main_visit_histogram"] = histogram;

  json before_after;
  bundle["fig2_before_after.csv"] = fig2_csv(data.active, course, week, labels, before_after);
  report["before_after"] = before_after;

  // Group comparisons on the analysis week.
  const auto engagement = engagement_table(data.active, data.comments, data.attempts, course);
  const auto performance = performance_table(data.active, data.attempts, course);
  std::map<std::string, double> comments, attempts, rates;
  for (const auto& row : engagement) {
    if (row.week != week) continue;
    comments[row.learner_id] = static_cast<double>(row.comments);
    attempts[row.learner_id] = static_cast<double>(row.attempts);
  }
  for (const auto& row : performance) {
    if (row.week == week && row.correct_answer_rate) rates[row.learner_id] = *row.correct_answer_rate;
  }
  report["comparisons"] = {
      {"comments", comparison_json(comments, labels, "comments", options, warnings)},
      {"attempts", comparison_json(attempts, labels, "attempts", options, warnings)},
      {"correct_answer_rate",
       comparison_json(rates, labels, "correct_answer_rate", options, warnings)}};
  bundle["fig3_comments_attempts.csv"] = fig3_csv(comments, attempts, labels);
  bundle["fig4_rate_distribution.csv"] = fig4_csv(rates, labels);

  json transitions = json::array();
  for (const auto& m : all_transitions(table)) transitions.push_back(to_json(m));
  report["transitions"] = transitions;
  bundle["fig6_transitions.json"] = dump(transitions);

  const auto census = path_census(table);
  json top = json::array();
  for (const auto& [path, count] : census.top(options.top_k)) {
    top.push_back({{"path", path}, {"count", count}});
  }
  report["path_census"] = {{"distinct", census.distinct()},
                           {"kept", census.kept},
                           {"changed", census.changed},
                           {"total", census.total()},
                           {"top", top}};

  const StyleLabels group_labels = table.labels_for_week(options.group_week);
  const auto dist = dropout_distribution(data.active, course, group_labels);
  report["dropout"] =
      dropout_summary_json(dist, course, data.active, group_labels, options.group_week);
  bundle["fig7_dropout.csv"] = dropout_csv(dist, course);

  report["warnings"] = warnings;
  bundle["report.json"] = dump(report);
  bundle["manifest.json"] = dump(to_json(data.manifest, true));
  return bundle;
}

FileBundle simulate_bundle(const SimConfig& config, const NamedInput& course_input,
                           const json& flags, unsigned threads) {
  const auto cohort = generate_cohort(config, threads);
  const auto files = to_bundle(cohort);

  RunManifest manifest;
  manifest.tool_version = NAVSTYLE_VERSION;
  manifest.command = "simulate";
  manifest.inputs["course"] = input_entry(course_input);
  manifest.course_digest = sha256_hex(course_to_json(config.course));
  manifest.flags = flags;
  manifest.flags["config"] = to_json(config);
  manifest.seeds = {{"simulation", config.seed}};
  manifest.generated_at = current_timestamp();

  FileBundle bundle;
  bundle["activity.csv"] = files.activity_csv;
  bundle["comments.csv"] = files.comments_csv;
  bundle["attempts.csv"] = files.attempts_csv;
  bundle["enrolments.csv"] = files.enrolments_csv;
  bundle["ground_truth.csv"] = files.ground_truth_csv;
  auto manifest_json = to_json(manifest, true);
  json outputs = json::object();
  for (const auto& [name, content] : bundle) outputs[name] = sha256_hex(content);
  manifest_json["outputs"] = outputs;
  bundle["manifest.json"] = dump(manifest_json);
  return bundle;
}

}  // namespace navstyle
