#include <gtest/gtest.h>

#include <cmath>

#include "navstyle/format.hpp"
#include "navstyle/metrics.hpp"
#include "support.hpp"

namespace navstyle {
namespace {

using testing::at_minute;

AttemptRecord attempt(const std::string& who, StepRef step, int question, bool correct,
                      int minute = 0) {
  return {who, step, question, correct, at_minute(minute)};
}

TEST(Counts, FilterByLearnerAndWeek) {
  const std::vector<CommentRecord> comments = {
      {"a", {1, 4}, at_minute(0)}, {"a", {1, 4}, at_minute(1)}, {"a", {2, 4}, at_minute(2)},
      {"b", {1, 4}, at_minute(3)}};
  EXPECT_EQ(comment_count(comments, "a", 1), 2u);
  EXPECT_EQ(comment_count(comments, "a", 2), 1u);
  EXPECT_EQ(comment_count(comments, "c", 1), 0u);

  const std::vector<AttemptRecord> attempts = {attempt("a", {1, 4}, 1, false),
                                               attempt("a", {1, 4}, 1, true),
                                               attempt("a", {1, 4}, 2, false)};
  EXPECT_EQ(attempt_count(attempts, "a", 1), 3u);  // retries included
}

TEST(CorrectAnswerRate, EventuallyCorrectOverDistinctQuestions) {
  const std::vector<AttemptRecord> attempts = {
      attempt("a", {1, 4}, 1, false), attempt("a", {1, 4}, 1, true),  // q1 eventually right
      attempt("a", {1, 4}, 2, false), attempt("a", {1, 4}, 2, false),  // q2 never
      attempt("a", {1, 5}, 1, true),                                   // other step, own question
  };
  const auto tally = answer_tally(attempts, "a", 1);
  EXPECT_EQ(tally.attempted, 3u);
  EXPECT_EQ(tally.correct, 2u);
  EXPECT_DOUBLE_EQ(*correct_answer_rate(attempts, "a", 1), 2.0 / 3.0);
  EXPECT_FALSE(correct_answer_rate(attempts, "a", 2));
  EXPECT_FALSE(correct_answer_rate(attempts, "b", 1));
}

TEST(CorrectAnswerRate, WrongAfterRightStillCounts) {
  const std::vector<AttemptRecord> attempts = {attempt("a", {1, 4}, 1, true),
                                               attempt("a", {1, 4}, 1, false)};
  EXPECT_DOUBLE_EQ(*correct_answer_rate(attempts, "a", 1), 1.0);
}

TEST(EngagementTable, OneRowPerLearnerWeek) {
  const auto course = testing::five_step_course(2);
  TraceMap traces;
  traces["a"] = testing::trace_of("a", testing::refs(1, {1, 2, 3}));
  std::vector<VisitRecord> visits = {{"b", {2, 1}, at_minute(0), std::nullopt},
                                     {"b", {2, 2}, at_minute(1), at_minute(2)}};
  traces["b"] = build_traces(visits).at("b");
  const std::vector<CommentRecord> comments = {{"a", {1, 4}, at_minute(5)}};
  const std::vector<AttemptRecord> attempts = {attempt("b", {2, 4}, 1, true)};
  const auto rows = engagement_table(traces, comments, attempts, course);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].learner_id, "a");
  EXPECT_EQ(rows[0].week, 1);
  EXPECT_EQ(rows[0].comments, 1u);
  EXPECT_EQ(rows[0].steps_visited, 3u);
  EXPECT_EQ(rows[0].steps_completed, 3u);
  EXPECT_EQ(rows[3].learner_id, "b");
  EXPECT_EQ(rows[3].attempts, 1u);
  EXPECT_EQ(rows[3].steps_visited, 2u);
  EXPECT_EQ(rows[3].steps_completed, 1u);

  const auto csv = engagement_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "learner_id,week,comments,attempts,steps_visited,steps_completed");
}

TEST(PerformanceTable, AbsentRateRendersEmpty) {
  const auto course = testing::five_step_course(1);
  TraceMap traces;
  traces["a"] = testing::trace_of("a", testing::refs(1, {1}));
  const auto rows = performance_table(traces, {}, course);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_FALSE(rows[0].correct_answer_rate);
  EXPECT_EQ(performance_csv(rows),
            "learner_id,week,questions_attempted,questions_correct,correct_answer_rate\n"
            "a,1,0,0,\n");
}

TEST(Format, PercentagesOfReportedCounts) {
  EXPECT_NEAR(*rounded_percentage(1552, 5204), 29.82, 1e-9);
  EXPECT_NEAR(*rounded_percentage(350, 5204), 6.73, 1e-9);
  EXPECT_NEAR(*rounded_percentage(3302, 5204), 63.45, 1e-9);
  EXPECT_FALSE(percentage(1, 0));
  EXPECT_FALSE(proportion(0, 0));
  EXPECT_DOUBLE_EQ(*proportion(1, 4), 0.25);
}

TEST(Format, DecimalRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, 0.0}) {
    EXPECT_EQ(std::stod(format_decimal(v)), v);
  }
  EXPECT_EQ(format_decimal(0.25), "0.25");
  EXPECT_EQ(format_decimal(3.0), "3");
}

}  // namespace
}  // namespace navstyle
