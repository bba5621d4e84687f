#include "navstyle/metrics.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "navstyle/csv.hpp"
#include "navstyle/format.hpp"

namespace navstyle {
namespace {

using LearnerWeek = std::pair<std::string, int>;

struct QuestionSets {
  std::set<std::pair<StepRef, int>> attempted;
  std::set<std::pair<StepRef, int>> correct;
};

}  // namespace

std::size_t comment_count(std::span<const CommentRecord> comments, const std::string& learner,
                          int week) {
  return static_cast<std::size_t>(std::count_if(comments.begin(), comments.end(), [&](const auto& c) {
    return c.learner_id == learner && c.step.week == week;
  }));
}

std::size_t attempt_count(std::span<const AttemptRecord> attempts, const std::string& learner,
                          int week) {
  return static_cast<std::size_t>(std::count_if(attempts.begin(), attempts.end(), [&](const auto& a) {
    return a.learner_id == learner && a.step.week == week;
  }));
}

AnswerTally answer_tally(std::span<const AttemptRecord> attempts, const std::string& learner,
                         int week) {
  QuestionSets sets;
  for (const auto& a : attempts) {
    if (a.learner_id != learner || a.step.week != week) continue;
    sets.attempted.emplace(a.step, a.question_number);
    if (a.correct) sets.correct.emplace(a.step, a.question_number);
  }
  return {sets.attempted.size(), sets.correct.size()};
}

std::optional<double> correct_answer_rate(std::span<const AttemptRecord> attempts,
                                          const std::string& learner, int week) {
  const auto tally = answer_tally(attempts, learner, week);
  if (tally.attempted == 0) return std::nullopt;
  return static_cast<double>(tally.correct) / static_cast<double>(tally.attempted);
}

std::vector<EngagementRecord> engagement_table(const TraceMap& traces,
                                               std::span<const CommentRecord> comments,
                                               std::span<const AttemptRecord> attempts,
                                               const CourseStructure& course) {
  std::map<LearnerWeek, std::size_t> comment_totals;
  for (const auto& c : comments) ++comment_totals[{c.learner_id, c.step.week}];
  std::map<LearnerWeek, std::size_t> attempt_totals;
  for (const auto& a : attempts) ++attempt_totals[{a.learner_id, a.step.week}];

  auto lookup = [](const auto& totals, const LearnerWeek& key) -> std::size_t {
    auto it = totals.find(key);
    return it == totals.end() ? 0 : it->second;
  };

  std::vector<EngagementRecord> rows;
  rows.reserve(traces.size() * static_cast<std::size_t>(course.week_count()));
  for (const auto& [id, trace] : traces) {
    for (int w = 1; w <= course.week_count(); ++w) {
      EngagementRecord row;
      row.learner_id = id;
      row.week = w;
      row.comments = lookup(comment_totals, {id, w});
      row.attempts = lookup(attempt_totals, {id, w});
      for (const auto& visit : trace.visits) {
        if (visit.step.week != w || !course.contains(visit.step)) continue;
        ++row.steps_visited;
        if (visit.last_completed_at) ++row.steps_completed;
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<PerformanceRecord> performance_table(const TraceMap& traces,
                                                 std::span<const AttemptRecord> attempts,
                                                 const CourseStructure& course) {
  std::map<LearnerWeek, QuestionSets> sets;
  for (const auto& a : attempts) {
    if (!traces.contains(a.learner_id)) continue;
    auto& entry = sets[{a.learner_id, a.step.week}];
    entry.attempted.emplace(a.step, a.question_number);
    if (a.correct) entry.correct.emplace(a.step, a.question_number);
  }

  std::vector<PerformanceRecord> rows;
  rows.reserve(traces.size() * static_cast<std::size_t>(course.week_count()));
  for (const auto& [id, trace] : traces) {
    for (int w = 1; w <= course.week_count(); ++w) {
      PerformanceRecord row;
      row.learner_id = id;
      row.week = w;
      if (auto it = sets.find({id, w}); it != sets.end()) {
        row.questions_attempted = it->second.attempted.size();
        row.questions_correct = it->second.correct.size();
        row.correct_answer_rate = static_cast<double>(row.questions_correct) /
                                  static_cast<double>(row.questions_attempted);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string engagement_csv(std::span<const EngagementRecord> rows) {
  std::string out = "learner_id,week,comments,attempts,steps_visited,steps_completed\n";
  for (const auto& r : rows) {
    out += csv::escape(r.learner_id) + "," + std::to_string(r.week) + "," +
           std::to_string(r.comments) + "," + std::to_string(r.attempts) + "," +
           std::to_string(r.steps_visited) + "," + std::to_string(r.steps_completed) + "\n";
  }
  return out;
}

std::string performance_csv(std::span<const PerformanceRecord> rows) {
  std::string out = "learner_id,week,questions_attempted,questions_correct,correct_answer_rate\n";
  for (const auto& r : rows) {
    out += csv::escape(r.learner_id) + "," + std::to_string(r.week) + "," +
           std::to_string(r.questions_attempted) + "," + std::to_string(r.questions_correct) +
           "," + (r.correct_answer_rate ? format_decimal(*r.correct_answer_rate) : "") + "\n";
  }
  return out;
}

}  // namespace navstyle
