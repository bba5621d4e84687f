#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "navstyle/errors.hpp"
#include "navstyle/report.hpp"
#include "support.hpp"

namespace navstyle {
namespace {

using nlohmann::json;

NamedInput course_input() {
  std::ifstream in(testing::repo_file("data/six_week_course.json"));
  std::ostringstream text;
  text << in.rdbuf();
  return {"data/six_week_course.json", text.str()};
}

struct Simulated {
  DatasetInputs inputs;
  SimBundle bundle;
};

Simulated simulated(std::size_t cohort, std::uint64_t seed = 3) {
  auto config = default_sim_config(testing::six_week_course());
  config.cohort_size = cohort;
  config.seed = seed;
  config.inactive_learners = 4;
  Simulated s;
  s.bundle = to_bundle(generate_cohort(config));
  s.inputs.course = course_input();
  s.inputs.activity = NamedInput{"sim/activity.csv", s.bundle.activity_csv};
  s.inputs.comments = NamedInput{"sim/comments.csv", s.bundle.comments_csv};
  s.inputs.attempts = NamedInput{"sim/attempts.csv", s.bundle.attempts_csv};
  s.inputs.enrolments = NamedInput{"sim/enrolments.csv", s.bundle.enrolments_csv};
  return s;
}

RunOptions quick_options(unsigned threads = 1) {
  RunOptions options;
  options.mc_replicates = 199;
  options.threads = threads;
  return options;
}

class SourceDateEpoch : public ::testing::Test {
 protected:
  void SetUp() override { setenv("SOURCE_DATE_EPOCH", "1583020800", 1); }
  void TearDown() override { unsetenv("SOURCE_DATE_EPOCH"); }
};

TEST_F(SourceDateEpoch, TimestampHonoursEnvironment) {
  EXPECT_EQ(current_timestamp(), "2020-03-01T00:00:00Z");
}

TEST(LoadDataset, ManifestRecordsInputsAndFlags) {
  const auto s = simulated(50);
  const auto data = load_dataset(s.inputs, quick_options(), "report");
  EXPECT_EQ(data.active.size(), 50u);
  EXPECT_EQ(data.traces.size(), 54u);
  const auto m = to_json(data.manifest, false);
  EXPECT_EQ(m["command"], "report");
  EXPECT_EQ(m["inputs"]["activity"]["file"], "activity.csv");
  EXPECT_EQ(m["inputs"]["activity"]["sha256"].get<std::string>().size(), 64u);
  EXPECT_EQ(m["flags"]["mc_replicates"], 199);
  EXPECT_FALSE(m["flags"].contains("threads"));
  EXPECT_FALSE(m.contains("generated_at"));
  EXPECT_TRUE(to_json(data.manifest, true).contains("generated_at"));
}

TEST(LoadDataset, UnknownStepsBecomeIssuesAndAreDropped) {
  DatasetInputs inputs;
  inputs.course = course_input();
  inputs.activity = NamedInput{
      "a.csv", std::string(kActivityHeader) +
                   "\nL1,1,1,2020-01-06T00:00:00Z,2020-01-06T00:01:00Z"
                   "\nL1,1,99,2020-01-06T00:02:00Z,2020-01-06T00:03:00Z"
                   "\nL1,1,2,garbage,\n"};
  const auto data = load_dataset(inputs, quick_options(), "validate");
  ASSERT_EQ(data.issues.size(), 2u);
  EXPECT_EQ(data.traces.at("L1").visits.size(), 1u);
  const auto outcome = validate_dataset(data);
  EXPECT_FALSE(outcome.clean);
  EXPECT_EQ(outcome.report["issues"].size(), 2u);
  bool saw_unknown = false;
  for (const auto& issue : outcome.report["issues"]) {
    if (issue["message"].get<std::string>().find("1.99") != std::string::npos) {
      saw_unknown = true;
      EXPECT_EQ(issue["line"], 3);
    }
  }
  EXPECT_TRUE(saw_unknown);

  auto strict = quick_options();
  strict.strict = true;
  EXPECT_THROW(load_dataset(inputs, strict, "validate"), RowError);
}

TEST(LoadDataset, WeekFlagsChecked) {
  auto options = quick_options();
  options.week = 7;
  EXPECT_THROW(load_dataset(simulated(5).inputs, options, "report"), UnknownWeek);
}

TEST(ReportBundle, ContainsEveryFigure) {
  const auto data = load_dataset(simulated(400).inputs, quick_options(), "report");
  const auto bundle = report_bundle(data, quick_options());
  for (const char* name :
       {"report.json", "fig1_main_histogram.csv", "fig2_before_after.csv",
        "fig3_comments_attempts.csv", "fig4_rate_distribution.csv", "fig5_weekly_counts.csv",
        "fig6_transitions.json", "fig7_dropout.csv", "manifest.json"}) {
    EXPECT_TRUE(bundle.contains(name)) << name;
  }
  const auto report = json::parse(bundle.at("report.json"));
  EXPECT_FALSE(report["manifest"].contains("generated_at"));

  // Histogram bins 0..|M| and partitions the cohort.
  const auto& hist = report["main_visit_histogram"];
  EXPECT_EQ(hist["bins"].size(), 10u);  // week 1 has 9 Main steps
  std::size_t sum = 0;
  for (const auto& b : hist["bins"]) sum += b.get<std::size_t>();
  EXPECT_EQ(sum, 400u);

  for (const auto& row : report["weekly_counts"]) EXPECT_EQ(row["total"], 400);
  EXPECT_EQ(report["transitions"].size(), 5u);
  EXPECT_EQ(report["path_census"]["total"], 400);
  EXPECT_EQ(report["comparisons"]["comments"]["pairwise"].size(), 3u);

  const auto& groups = report["comparisons"]["comments"]["groups"];
  EXPECT_GT(groups["S"]["mean"].get<double>(), groups["M"]["mean"].get<double>());
}

TEST(ReportBundle, ByteIdenticalAcrossRunsAndThreads) {
  const auto s = simulated(300);
  const auto one = report_bundle(load_dataset(s.inputs, quick_options(1), "report"),
                                 quick_options(1));
  const auto four = report_bundle(load_dataset(s.inputs, quick_options(4), "report"),
                                  quick_options(4));
  for (const auto& [name, content] : one) {
    if (name == "manifest.json") continue;
    EXPECT_EQ(content, four.at(name)) << name;
  }
}

TEST(ReportBundle, SingleLearnerDegradesToSummaries) {
  const auto data = load_dataset(simulated(1).inputs, quick_options(), "report");
  const auto report = json::parse(report_bundle(data, quick_options()).at("report.json"));
  const auto& comments = report["comparisons"]["comments"];
  EXPECT_TRUE(comments["omnibus"].is_null());
  EXPECT_TRUE(comments["pairwise"].empty());
  int present = 0;
  for (const char* g : {"S", "G", "M"}) {
    if (!comments["groups"][g].is_null()) {
      ++present;
      EXPECT_EQ(comments["groups"][g]["n"], 1);
      EXPECT_TRUE(comments["groups"][g]["sd"].is_null());
    }
  }
  EXPECT_EQ(present, 1);
  EXPECT_FALSE(report["warnings"].empty());
}

TEST(ClassifyBundle, EmptyActivityGivesHeaderOnly) {
  DatasetInputs inputs;
  inputs.course = course_input();
  inputs.activity = NamedInput{"empty.csv", std::string(kActivityHeader) + "\n"};
  const auto data = load_dataset(inputs, quick_options(), "classify");
  const auto bundle = classify_bundle(data, quick_options());
  EXPECT_EQ(bundle.at("labels.csv"),
            "learner_id,week_1,week_2,week_3,week_4,week_5,week_6,style_path\n");
  const auto report = json::parse(report_bundle(data, quick_options()).at("report.json"));
  EXPECT_FALSE(report["warnings"].empty());
}

TEST(ClassifyBundle, LabelsMatchGroundTruth) {
  const auto s = simulated(200);
  const auto data = load_dataset(s.inputs, quick_options(), "classify");
  std::istringstream labels(classify_bundle(data, quick_options()).at("labels.csv"));
  std::map<std::string, std::string> labelled;
  std::string line;
  std::getline(labels, line);
  while (std::getline(labels, line)) {
    labelled[line.substr(0, line.find(','))] = line.substr(line.rfind(',') + 1);
  }
  std::istringstream truth(s.bundle.ground_truth_csv);
  std::getline(truth, line);
  std::size_t checked = 0;
  while (std::getline(truth, line)) {
    if (line.ends_with(",false")) continue;
    const auto id = line.substr(0, line.find(','));
    EXPECT_EQ(labelled.at(id), line.substr(id.size() + 1, 6)) << id;
    ++checked;
  }
  EXPECT_EQ(labelled.size(), 200u);
  EXPECT_EQ(checked, 200u);
}

TEST(DropoutAndTransitions, Bundles) {
  const auto data = load_dataset(simulated(100).inputs, quick_options(), "dropout");
  const auto dropout = dropout_bundle(data, quick_options());
  EXPECT_TRUE(dropout.contains("dropout.csv"));
  const auto summary = json::parse(dropout.at("dropout_summary.json"));
  EXPECT_EQ(summary["group_week"], 1);
  const auto transitions = transitions_bundle(data, quick_options());
  EXPECT_EQ(json::parse(transitions.at("transitions.json"))["transitions"].size(), 5u);
}

TEST(SimulateBundle, ManifestListsOutputs) {
  auto config = default_sim_config(testing::six_week_course());
  config.cohort_size = 20;
  const auto bundle = simulate_bundle(config, course_input(), json::object(), 1);
  const auto manifest = json::parse(bundle.at("manifest.json"));
  EXPECT_EQ(manifest["seeds"]["simulation"], 42);
  EXPECT_EQ(manifest["outputs"].size(), 5u);
  EXPECT_EQ(manifest["outputs"]["ground_truth.csv"].get<std::string>().size(), 64u);
}

}  // namespace
}  // namespace navstyle
