#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "navstyle/course.hpp"
#include "navstyle/ingest.hpp"

namespace navstyle {

enum class NavStyle { Sequential = 0, Global = 1, Middle = 2 };

inline constexpr std::array<NavStyle, 3> kAllStyles = {NavStyle::Sequential, NavStyle::Global,
                                                      NavStyle::Middle};

constexpr std::size_t style_slot(NavStyle s) { return static_cast<std::size_t>(s); }
char style_code(NavStyle s);
std::string_view style_name(NavStyle s);
NavStyle style_from_code(char code);  // ParseError

/// Per-week style codes over {S,G,M}, one character per course week.
class StylePath {
 public:
  StylePath() = default;
  explicit StylePath(std::string codes);  // ParseError on foreign characters

  const std::string& str() const noexcept { return codes_; }
  std::size_t weeks() const noexcept { return codes_.size(); }
  NavStyle at(int week) const;  // 1-based
  /// True when every week carries the same label.
  bool is_constant() const;

  auto operator<=>(const StylePath&) const = default;

 private:
  std::string codes_;
};

/// The learner's first-visit sequence restricted to one week's steps.
std::vector<StepRef> week_view(const LearnerTrace& trace, const CourseStructure& course, int week);

/// Classifies an already-restricted first-visit sequence.
///   Sequential: the sequence equals the week's path exactly.
///   Global: some Main step comes after some trigger step.
///   Middle: anything else, including an empty sequence.
NavStyle classify_sequence(std::span<const StepRef> first_visits, const CourseStructure& course,
                           int week);

NavStyle classify_week(const LearnerTrace& trace, const CourseStructure& course, int week);
StylePath style_path(const LearnerTrace& trace, const CourseStructure& course);

std::optional<StepRef> start_step(const LearnerTrace& trace, const CourseStructure& course,
                                  int week);
std::optional<StepRef> last_step(const LearnerTrace& trace, const CourseStructure& course,
                                 int week);

struct KindShare {
  std::size_t count = 0;
  double proportion = 0.0;
};

/// Kind of each learner's first (or last) step of the week, over learners
/// with any activity in that week.
std::map<StepKind, KindShare> start_distribution(const TraceMap& traces,
                                                 const CourseStructure& course, int week);
std::map<StepKind, KindShare> last_distribution(const TraceMap& traces,
                                                const CourseStructure& course, int week);

struct StyleShare {
  std::size_t numerator = 0;
  std::size_t denominator = 0;
  std::optional<double> proportion;  // absent for an empty group
};

using StyleLabels = std::map<std::string, NavStyle>;

/// Per style group: learners whose last step of the week is a Review step,
/// over everyone in the group.
std::array<StyleShare, 3> last_step_is_review(const TraceMap& traces,
                                              const CourseStructure& course, int week,
                                              const StyleLabels& labels);

struct BeforeAfter {
  std::size_t before = 0;
  std::size_t after = 0;
};

/// Main steps first-visited before and after the learner's first visit to a
/// step of `kind` (Discussion, Experiment or Assessment; else InvalidKind).
/// Absent when the learner never visited such a step that week.
std::optional<BeforeAfter> main_before_after(const LearnerTrace& trace,
                                             const CourseStructure& course, int week,
                                             StepKind kind);

/// Number of distinct Main steps of the week the learner visited.
std::size_t main_steps_visited(const LearnerTrace& trace, const CourseStructure& course, int week);

struct StyleTable {
  int weeks = 0;
  std::map<std::string, StylePath> paths;
  std::vector<std::array<std::size_t, 3>> weekly_counts;  // [week-1][S,G,M]

  std::size_t cohort_size() const noexcept { return paths.size(); }
  StyleLabels labels_for_week(int week) const;  // UnknownWeek
};

/// Classifies every trace for every week. Work is split by learner across
/// `threads`; the result does not depend on the split.
StyleTable cohort_styles(const TraceMap& traces, const CourseStructure& course,
                         unsigned threads = 1);

}  // namespace navstyle
