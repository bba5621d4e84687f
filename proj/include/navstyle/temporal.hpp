#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "navstyle/classify.hpp"
#include "navstyle/course.hpp"
#include "navstyle/ingest.hpp"

namespace navstyle {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// Style switches between week `from_week` and the following week. Rows and
/// columns are ordered S, G, M.
struct TransitionMatrix {
  int from_week = 0;
  std::array<std::array<std::size_t, 3>, 3> counts{};
  Matrix3 probabilities{};
  std::array<bool, 3> empty_rows{};  // no learners in that style at from_week

  std::size_t total() const;
};

TransitionMatrix transition_matrix(const StyleTable& table, int from_week);
std::vector<TransitionMatrix> all_transitions(const StyleTable& table);

nlohmann::json to_json(const TransitionMatrix& matrix);

struct PathCensus {
  std::map<std::string, std::size_t> counts;
  std::size_t kept = 0;     // one distinct label across all weeks
  std::size_t changed = 0;

  std::size_t total() const { return kept + changed; }
  std::size_t distinct() const { return counts.size(); }
  /// Most frequent paths, ties broken by path text.
  std::vector<std::pair<std::string, std::size_t>> top(std::size_t k) const;
};

PathCensus path_census(const StyleTable& table);

/// The learner's last first-visited course step (maximum of the trace's
/// (first_visited_at, week, index) ordering). Throws EmptyTrace when the
/// trace has no visits to course steps.
StepRef dropout_step(const LearnerTrace& trace, const CourseStructure& course);

struct DropoutDistribution {
  int total_steps = 0;
  // [style][global index - 1]
  std::array<std::vector<std::size_t>, 3> counts;
  std::array<std::size_t, 3> group_sizes{};
  std::size_t skipped = 0;  // labelled learners without course-step visits

  std::optional<double> proportion(NavStyle style, int global_index) const;
};

/// Dropout steps grouped by the given labels (typically the Week-1 style).
/// Learners without a label are ignored.
DropoutDistribution dropout_distribution(const TraceMap& traces, const CourseStructure& course,
                                         const StyleLabels& labels);

/// `style,global_step_index,week,step_index,count,proportion`, one row per
/// style and step with a non-empty group.
std::string dropout_csv(const DropoutDistribution& dist, const CourseStructure& course);

struct CompletionShare {
  std::size_t group_size = 0;
  std::size_t completed = 0;             // stopped at the course's final step
  std::size_t continued_past_week1 = 0;  // stopped in week 2 or later
  std::optional<double> completed_proportion;
  std::optional<double> continued_proportion;
};

std::array<CompletionShare, 3> completion_summary(const TraceMap& traces,
                                                  const CourseStructure& course,
                                                  const StyleLabels& labels);

/// Share of a group's dropout mass sitting on week-final steps. Throws
/// EmptyGroup when the group has no learners.
double periodicity_index(const DropoutDistribution& dist, const CourseStructure& course,
                         NavStyle style);

/// Same for every style; absent for empty groups.
std::array<std::optional<double>, 3> periodicity_indices(const DropoutDistribution& dist,
                                                         const CourseStructure& course);

}  // namespace navstyle
