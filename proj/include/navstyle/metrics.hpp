#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "navstyle/course.hpp"
#include "navstyle/ingest.hpp"

namespace navstyle {

struct EngagementRecord {
  std::string learner_id;
  int week = 0;
  std::size_t comments = 0;
  std::size_t attempts = 0;  // raw submissions, retries included
  std::size_t steps_visited = 0;
  std::size_t steps_completed = 0;

  bool operator==(const EngagementRecord&) const = default;
};

struct PerformanceRecord {
  std::string learner_id;
  int week = 0;
  std::size_t questions_attempted = 0;
  std::size_t questions_correct = 0;  // eventually answered correctly
  std::optional<double> correct_answer_rate;

  bool operator==(const PerformanceRecord&) const = default;
};

std::size_t comment_count(std::span<const CommentRecord> comments, const std::string& learner,
                          int week);
std::size_t attempt_count(std::span<const AttemptRecord> attempts, const std::string& learner,
                          int week);

struct AnswerTally {
  std::size_t attempted = 0;
  std::size_t correct = 0;
};

/// Distinct questions attempted and distinct questions with at least one
/// correct submission. A question is identified by (step, question_number).
AnswerTally answer_tally(std::span<const AttemptRecord> attempts, const std::string& learner,
                         int week);

/// correct / attempted over distinct questions; absent with no attempts.
std::optional<double> correct_answer_rate(std::span<const AttemptRecord> attempts,
                                          const std::string& learner, int week);

/// One record per trace per course week, ordered by (learner_id, week).
std::vector<EngagementRecord> engagement_table(const TraceMap& traces,
                                               std::span<const CommentRecord> comments,
                                               std::span<const AttemptRecord> attempts,
                                               const CourseStructure& course);
std::vector<PerformanceRecord> performance_table(const TraceMap& traces,
                                                 std::span<const AttemptRecord> attempts,
                                                 const CourseStructure& course);

std::string engagement_csv(std::span<const EngagementRecord> rows);
std::string performance_csv(std::span<const PerformanceRecord> rows);

}  // namespace navstyle
