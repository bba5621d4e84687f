#pragma once

#include <compare>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace navstyle {

/// A step of the course, addressed as week and 1-based position within the
/// week. Renders as "w.i", e.g. "1.2".
struct StepRef {
  int week = 0;
  int index = 0;

  auto operator<=>(const StepRef&) const = default;

  std::string to_string() const;
  static StepRef parse(std::string_view text);
};

enum class StepKind {
  Introduction,
  Main,
  Discussion,
  Experiment,
  Assessment,
  Review,
  FurtherReading,
  Certificates,
};

inline constexpr std::size_t kStepKindCount = 8;

std::string_view to_string(StepKind kind);
/// Exact enumeration name; anything else throws ParseError.
StepKind parse_step_kind(std::string_view name);

struct Step {
  StepRef ref;
  StepKind kind = StepKind::Main;
};

struct WeekStructure {
  int week_number = 0;
  std::vector<Step> steps;  // declaration order is the week's linear path
};

/// Weeks of typed steps. The concatenation of the weeks' step lists is the
/// course-long linear path; every query is answered from indexes built once
/// at construction, so an instance is immutable and safe to share.
class CourseStructure {
 public:
  CourseStructure() = default;

  /// Validates and indexes. Throws ValidationError naming the offending
  /// week or step.
  static CourseStructure from_weeks(std::vector<WeekStructure> weeks);

  const std::vector<WeekStructure>& weeks() const noexcept { return weeks_; }
  int week_count() const noexcept { return static_cast<int>(weeks_.size()); }
  int total_steps() const noexcept { return static_cast<int>(global_.size()); }

  const WeekStructure& week(int week_number) const;  // UnknownWeek

  std::vector<StepRef> linear_path(int week_number) const;
  std::vector<StepRef> main_steps(int week_number) const;
  /// Steps positioned strictly after the last Main step of the week.
  std::vector<StepRef> global_trigger_steps(int week_number) const;

  bool contains(const StepRef& step) const;
  StepKind kind(const StepRef& step) const;  // UnknownStep
  /// 0-based position of the step within its week's path.
  int position_in_week(const StepRef& step) const;  // UnknownStep

  /// 1-based position in the course-long path.
  int global_step_index(const StepRef& step) const;  // UnknownStep
  StepRef step_at(int global_index) const;           // UnknownStep

  StepRef week_final_step(int week_number) const;
  StepRef final_step() const;

 private:
  struct Entry {
    StepKind kind;
    int position;
    int global_index;
  };

  std::vector<WeekStructure> weeks_;
  std::vector<StepRef> global_;
  std::map<StepRef, Entry> index_;
};

/// Parses the JSON course document
/// `{"weeks":[{"week":1,"steps":[{"index":1,"kind":"Introduction"}, ...]}, ...]}`.
/// Malformed JSON or shape is a ParseError; structural violations a
/// ValidationError.
CourseStructure load_course(std::istream& in);
CourseStructure load_course_text(std::string_view json_text);
CourseStructure load_course_file(const std::string& path);

/// Inverse of load_course.
std::string course_to_json(const CourseStructure& course);

}  // namespace navstyle
