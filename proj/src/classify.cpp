#include "navstyle/classify.hpp"

#include <algorithm>

#include "navstyle/errors.hpp"
#include "navstyle/parallel.hpp"

namespace navstyle {
namespace {

std::map<StepKind, KindShare> kind_distribution(const TraceMap& traces,
                                                const CourseStructure& course, int week,
                                                bool first) {
  course.week(week);
  std::map<StepKind, KindShare> dist;
  std::size_t total = 0;
  for (const auto& [id, trace] : traces) {
    auto step = first ? start_step(trace, course, week) : last_step(trace, course, week);
    if (!step) continue;
    ++dist[course.kind(*step)].count;
    ++total;
  }
  for (auto& [kind, share] : dist) {
    share.proportion = static_cast<double>(share.count) / static_cast<double>(total);
  }
  return dist;
}

}  // namespace

char style_code(NavStyle s) {
  switch (s) {
    case NavStyle::Sequential: return 'S';
    case NavStyle::Global: return 'G';
    case NavStyle::Middle: return 'M';
  }
  return '?';
}

std::string_view style_name(NavStyle s) {
  switch (s) {
    case NavStyle::Sequential: return "Sequential";
    case NavStyle::Global: return "Global";
    case NavStyle::Middle: return "Middle";
  }
  return "?";
}

NavStyle style_from_code(char code) {
  switch (code) {
    case 'S': return NavStyle::Sequential;
    case 'G': return NavStyle::Global;
    case 'M': return NavStyle::Middle;
    default: throw ParseError(std::string("invalid style code '") + code + "'");
  }
}

StylePath::StylePath(std::string codes) : codes_(std::move(codes)) {
  for (char c : codes_) style_from_code(c);
}

NavStyle StylePath::at(int week) const {
  if (week < 1 || week > static_cast<int>(codes_.size())) {
    throw UnknownWeek("style path has no week " + std::to_string(week));
  }
  return style_from_code(codes_[static_cast<std::size_t>(week - 1)]);
}

bool StylePath::is_constant() const {
  return std::adjacent_find(codes_.begin(), codes_.end(), std::not_equal_to<>()) == codes_.end();
}

std::vector<StepRef> week_view(const LearnerTrace& trace, const CourseStructure& course,
                               int week) {
  course.week(week);
  std::vector<StepRef> view;
  for (const auto& visit : trace.visits) {
    if (visit.step.week == week && course.contains(visit.step)) view.push_back(visit.step);
  }
  return view;
}

NavStyle classify_sequence(std::span<const StepRef> first_visits, const CourseStructure& course,
                           int week) {
  const WeekStructure& structure = course.week(week);
  const auto& path = structure.steps;

  if (first_visits.size() == path.size() &&
      std::equal(first_visits.begin(), first_visits.end(), path.begin(),
                 [](const StepRef& a, const Step& b) { return a == b.ref; })) {
    return NavStyle::Sequential;
  }

  // Global iff the earliest trigger visit precedes the latest Main visit.
  const int last_main_pos = course.position_in_week(course.main_steps(week).back());
  std::optional<std::size_t> first_trigger;
  std::optional<std::size_t> last_main;
  for (std::size_t i = 0; i < first_visits.size(); ++i) {
    const StepRef& step = first_visits[i];
    if (step.week != week || !course.contains(step)) continue;
    if (course.kind(step) == StepKind::Main) {
      last_main = i;
    } else if (course.position_in_week(step) > last_main_pos && !first_trigger) {
      first_trigger = i;
    }
  }
  if (first_trigger && last_main && *last_main > *first_trigger) return NavStyle::Global;
  return NavStyle::Middle;
}

NavStyle classify_week(const LearnerTrace& trace, const CourseStructure& course, int week) {
  const auto view = week_view(trace, course, week);
  return classify_sequence(view, course, week);
}

StylePath style_path(const LearnerTrace& trace, const CourseStructure& course) {
  std::string codes;
  codes.reserve(static_cast<std::size_t>(course.week_count()));
  for (int w = 1; w <= course.week_count(); ++w) {
    codes.push_back(style_code(classify_week(trace, course, w)));
  }
  return StylePath(std::move(codes));
}

std::optional<StepRef> start_step(const LearnerTrace& trace, const CourseStructure& course,
                                  int week) {
  const auto view = week_view(trace, course, week);
  if (view.empty()) return std::nullopt;
  return view.front();
}

std::optional<StepRef> last_step(const LearnerTrace& trace, const CourseStructure& course,
                                 int week) {
  const auto view = week_view(trace, course, week);
  if (view.empty()) return std::nullopt;
  return view.back();
}

std::map<StepKind, KindShare> start_distribution(const TraceMap& traces,
                                                 const CourseStructure& course, int week) {
  return kind_distribution(traces, course, week, true);
}

std::map<StepKind, KindShare> last_distribution(const TraceMap& traces,
                                                const CourseStructure& course, int week) {
  return kind_distribution(traces, course, week, false);
}

std::array<StyleShare, 3> last_step_is_review(const TraceMap& traces,
                                              const CourseStructure& course, int week,
                                              const StyleLabels& labels) {
  course.week(week);
  std::array<StyleShare, 3> shares{};
  for (const auto& [id, trace] : traces) {
    auto label = labels.find(id);
    if (label == labels.end()) continue;
    auto& share = shares[style_slot(label->second)];
    ++share.denominator;
    auto last = last_step(trace, course, week);
    if (last && course.kind(*last) == StepKind::Review) ++share.numerator;
  }
  for (auto& share : shares) {
    if (share.denominator > 0) {
      share.proportion =
          static_cast<double>(share.numerator) / static_cast<double>(share.denominator);
    }
  }
  return shares;
}

std::optional<BeforeAfter> main_before_after(const LearnerTrace& trace,
                                             const CourseStructure& course, int week,
                                             StepKind kind) {
  if (kind != StepKind::Discussion && kind != StepKind::Experiment &&
      kind != StepKind::Assessment) {
    throw InvalidKind("before/after counts are defined for Discussion, Experiment and "
                      "Assessment, not " + std::string(to_string(kind)));
  }
  const auto view = week_view(trace, course, week);
  auto anchor = std::find_if(view.begin(), view.end(),
                             [&](const StepRef& s) { return course.kind(s) == kind; });
  if (anchor == view.end()) return std::nullopt;

  BeforeAfter counts;
  for (auto it = view.begin(); it != view.end(); ++it) {
    if (course.kind(*it) != StepKind::Main) continue;
    if (it < anchor) {
      ++counts.before;
    } else {
      ++counts.after;
    }
  }
  return counts;
}

std::size_t main_steps_visited(const LearnerTrace& trace, const CourseStructure& course,
                               int week) {
  const auto view = week_view(trace, course, week);
  return static_cast<std::size_t>(std::count_if(
      view.begin(), view.end(), [&](const StepRef& s) { return course.kind(s) == StepKind::Main; }));
}

StyleLabels StyleTable::labels_for_week(int week) const {
  if (week < 1 || week > weeks) {
    throw UnknownWeek("style table has no week " + std::to_string(week));
  }
  StyleLabels labels;
  for (const auto& [id, path] : paths) labels.emplace(id, path.at(week));
  return labels;
}

StyleTable cohort_styles(const TraceMap& traces, const CourseStructure& course, unsigned threads) {
  std::vector<const LearnerTrace*> order;
  order.reserve(traces.size());
  for (const auto& [id, trace] : traces) order.push_back(&trace);

  std::vector<StylePath> paths(order.size());
  parallel_chunks(order.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) paths[i] = style_path(*order[i], course);
  });

  StyleTable table;
  table.weeks = course.week_count();
  table.weekly_counts.assign(static_cast<std::size_t>(table.weeks), {0, 0, 0});
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (int w = 1; w <= table.weeks; ++w) {
      ++table.weekly_counts[static_cast<std::size_t>(w - 1)][style_slot(paths[i].at(w))];
    }
    table.paths.emplace(order[i]->learner_id, std::move(paths[i]));
  }
  return table;
}

}  // namespace navstyle
