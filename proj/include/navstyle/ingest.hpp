#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "navstyle/course.hpp"
#include "navstyle/timestamp.hpp"

namespace navstyle {

struct VisitRecord {
  std::string learner_id;
  StepRef step;
  Timestamp first_visited_at;
  std::optional<Timestamp> last_completed_at;

  bool operator==(const VisitRecord&) const = default;
};

struct CommentRecord {
  std::string learner_id;
  StepRef step;
  Timestamp posted_at;
};

struct AttemptRecord {
  std::string learner_id;
  StepRef step;
  int question_number = 1;
  bool correct = false;
  Timestamp submitted_at;
};

struct EnrolmentRecord {
  std::string learner_id;
  Timestamp enrolled_at;
  std::optional<Timestamp> unenrolled_at;
};

// A learner's visits, one per step, ordered by (first_visited_at, week, index).
struct LearnerTrace {
  std::string learner_id;
  std::vector<VisitRecord> visits;
  bool is_active = false;  // marked at least one step complete
};

// Keyed and iterated by learner_id so every downstream table has a stable order.
using TraceMap = std::map<std::string, LearnerTrace>;

enum class RowPolicy {
  Strict,  // first bad row throws RowError
  Skip,    // bad rows are dropped and reported in ParseResult::issues
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<std::size_t> lines;  // source line of each record
  std::vector<RowIssue> issues;
};

// Header-checked CSV parsers. A header mismatch is a SchemaError regardless
// of policy. Step references are kept verbatim; see find_unknown_steps.
ParseResult<VisitRecord> parse_activity(std::istream& in, RowPolicy policy = RowPolicy::Strict);
ParseResult<CommentRecord> parse_comments(std::istream& in, RowPolicy policy = RowPolicy::Strict);
ParseResult<AttemptRecord> parse_attempts(std::istream& in, RowPolicy policy = RowPolicy::Strict);
ParseResult<EnrolmentRecord> parse_enrolments(std::istream& in,
                                              RowPolicy policy = RowPolicy::Strict);

inline constexpr const char* kActivityHeader =
    "learner_id,week_number,step_number,first_visited_at,last_completed_at";
inline constexpr const char* kCommentsHeader = "learner_id,week_number,step_number,posted_at";
inline constexpr const char* kAttemptsHeader =
    "learner_id,week_number,step_number,question_number,correct,submitted_at";
inline constexpr const char* kEnrolmentsHeader = "learner_id,enrolled_at,unenrolled_at";

// Collapses duplicate (learner, step) rows keeping the earliest visit and
// the latest completion, then sorts each learner's visits.
TraceMap build_traces(std::span<const VisitRecord> visits);

TraceMap active_learners(const TraceMap& traces);

// Learners still enrolled: rows without unenrolled_at.
std::size_t remaining_enrolments(std::span<const EnrolmentRecord> enrolments);

// Records whose step is not part of the course, as issues. `what` names the
// source file kind in the message.
template <typename Record>
std::vector<RowIssue> find_unknown_steps(const ParseResult<Record>& parsed,
                                         const CourseStructure& course, const char* what) {
  std::vector<RowIssue> issues;
  for (std::size_t i = 0; i < parsed.records.size(); ++i) {
    const auto& step = parsed.records[i].step;
    if (!course.contains(step)) {
      issues.push_back({parsed.lines[i], std::string(what) + ": unknown step " + step.to_string()});
    }
  }
  return issues;
}

// Serialization in the same schemas the parsers read.
std::string write_activity_row(const VisitRecord& v);
std::string write_comment_row(const CommentRecord& c);
std::string write_attempt_row(const AttemptRecord& a);
std::string write_enrolment_row(const EnrolmentRecord& e);

}  // namespace navstyle
