#pragma once

#include <chrono>
#include <initializer_list>
#include <string>
#include <vector>

#include "navstyle/course.hpp"
#include "navstyle/ingest.hpp"
#include "navstyle/timestamp.hpp"

namespace navstyle::testing {

inline WeekStructure make_week(int week, std::initializer_list<StepKind> kinds) {
  WeekStructure w{week, {}};
  int index = 1;
  for (StepKind kind : kinds) w.steps.push_back({{week, index++}, kind});
  return w;
}

// Intro, Main, Main, Assessment, Review.
inline CourseStructure five_step_course(int weeks = 1) {
  std::vector<WeekStructure> all;
  for (int w = 1; w <= weeks; ++w) {
    all.push_back(make_week(w, {StepKind::Introduction, StepKind::Main, StepKind::Main,
                                StepKind::Assessment, StepKind::Review}));
  }
  return CourseStructure::from_weeks(std::move(all));
}

inline std::string repo_file(const std::string& relative) {
  return std::string(NAVSTYLE_SOURCE_DIR) + "/" + relative;
}

inline CourseStructure six_week_course() {
  return load_course_file(repo_file("data/six_week_course.json"));
}

inline Timestamp at_minute(int minute) {
  return parse_timestamp("2020-03-02T00:00:00Z") + std::chrono::minutes{minute};
}

// One visit per step, one minute apart, every step completed.
inline LearnerTrace trace_of(const std::string& learner, const std::vector<StepRef>& steps,
                             int start_minute = 0) {
  std::vector<VisitRecord> visits;
  int minute = start_minute;
  for (const auto& step : steps) {
    visits.push_back({learner, step, at_minute(minute), at_minute(minute)});
    ++minute;
  }
  auto traces = build_traces(visits);
  if (traces.empty()) return LearnerTrace{learner, {}, false};
  return traces.begin()->second;
}

inline std::vector<StepRef> refs(int week, std::initializer_list<int> indices) {
  std::vector<StepRef> out;
  for (int i : indices) out.push_back({week, i});
  return out;
}

}  // namespace navstyle::testing
