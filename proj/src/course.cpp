#include "navstyle/course.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "navstyle/errors.hpp"

namespace navstyle {
namespace {

constexpr std::array<std::string_view, kStepKindCount> kKindNames = {
    "Introduction", "Main",       "Discussion",     "Experiment",
    "Assessment",   "Review",     "FurtherReading", "Certificates",
};

int parse_positive(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || value < 1) {
    throw ParseError("invalid step component '" + std::string(text) + "'");
  }
  return value;
}

std::string week_label(int week) { return "week " + std::to_string(week); }

}  // namespace

std::string StepRef::to_string() const {
  return std::to_string(week) + "." + std::to_string(index);
}

StepRef StepRef::parse(std::string_view text) {
  auto dot = text.find('.');
  if (dot == std::string_view::npos) {
    throw ParseError("step reference '" + std::string(text) + "' is not of the form w.i");
  }
  return {parse_positive(text.substr(0, dot)), parse_positive(text.substr(dot + 1))};
}

std::string_view to_string(StepKind kind) {
  return kKindNames[static_cast<std::size_t>(kind)];
}

StepKind parse_step_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<StepKind>(i);
  }
  throw ParseError("unknown step kind '" + std::string(name) + "'");
}

CourseStructure CourseStructure::from_weeks(std::vector<WeekStructure> weeks) {
  if (weeks.empty()) throw ValidationError("course has no weeks");

  CourseStructure course;
  int global_index = 0;
  for (std::size_t w = 0; w < weeks.size(); ++w) {
    const auto& week = weeks[w];
    const int expected_week = static_cast<int>(w) + 1;
    if (week.week_number != expected_week) {
      throw ValidationError("weeks must be numbered 1..W contiguously: expected " +
                            week_label(expected_week) + ", found " +
                            week_label(week.week_number));
    }
    if (week.steps.empty()) {
      throw ValidationError(week_label(week.week_number) + " has no steps");
    }
    bool has_main = false;
    for (std::size_t i = 0; i < week.steps.size(); ++i) {
      const Step& step = week.steps[i];
      if (step.ref.week != week.week_number) {
        throw ValidationError("step " + step.ref.to_string() + " listed under " +
                              week_label(week.week_number));
      }
      if (course.index_.contains(step.ref)) {
        throw ValidationError("duplicate step " + step.ref.to_string());
      }
      if (step.ref.index != static_cast<int>(i) + 1) {
        throw ValidationError(week_label(week.week_number) +
                              ": step indices must be 1..k in order, found " +
                              step.ref.to_string() + " at position " + std::to_string(i + 1));
      }
      has_main = has_main || step.kind == StepKind::Main;
      ++global_index;
      course.index_.emplace(step.ref, Entry{step.kind, static_cast<int>(i), global_index});
      course.global_.push_back(step.ref);
    }
    if (!has_main) {
      throw ValidationError(week_label(week.week_number) + " has no Main step");
    }
  }
  course.weeks_ = std::move(weeks);
  return course;
}

const WeekStructure& CourseStructure::week(int week_number) const {
  if (week_number < 1 || week_number > week_count()) {
    throw UnknownWeek("unknown " + week_label(week_number) + " (course has " +
                      std::to_string(week_count()) + " weeks)");
  }
  return weeks_[static_cast<std::size_t>(week_number - 1)];
}

std::vector<StepRef> CourseStructure::linear_path(int week_number) const {
  std::vector<StepRef> path;
  for (const auto& step : week(week_number).steps) path.push_back(step.ref);
  return path;
}

std::vector<StepRef> CourseStructure::main_steps(int week_number) const {
  std::vector<StepRef> mains;
  for (const auto& step : week(week_number).steps) {
    if (step.kind == StepKind::Main) mains.push_back(step.ref);
  }
  return mains;
}

std::vector<StepRef> CourseStructure::global_trigger_steps(int week_number) const {
  const auto& steps = week(week_number).steps;
  auto last_main = std::find_if(steps.rbegin(), steps.rend(),
                                [](const Step& s) { return s.kind == StepKind::Main; });
  if (last_main == steps.rend()) {
    throw NoMainSteps(week_label(week_number) + " has no Main step");
  }
  std::vector<StepRef> triggers;
  for (auto it = last_main.base(); it != steps.end(); ++it) triggers.push_back(it->ref);
  return triggers;
}

bool CourseStructure::contains(const StepRef& step) const { return index_.contains(step); }

StepKind CourseStructure::kind(const StepRef& step) const {
  auto it = index_.find(step);
  if (it == index_.end()) throw UnknownStep("unknown step " + step.to_string());
  return it->second.kind;
}

int CourseStructure::position_in_week(const StepRef& step) const {
  auto it = index_.find(step);
  if (it == index_.end()) throw UnknownStep("unknown step " + step.to_string());
  return it->second.position;
}

int CourseStructure::global_step_index(const StepRef& step) const {
  auto it = index_.find(step);
  if (it == index_.end()) throw UnknownStep("unknown step " + step.to_string());
  return it->second.global_index;
}

StepRef CourseStructure::step_at(int global_index) const {
  if (global_index < 1 || global_index > total_steps()) {
    throw UnknownStep("global step index " + std::to_string(global_index) + " out of range 1.." +
                      std::to_string(total_steps()));
  }
  return global_[static_cast<std::size_t>(global_index - 1)];
}

StepRef CourseStructure::week_final_step(int week_number) const {
  return week(week_number).steps.back().ref;
}

StepRef CourseStructure::final_step() const {
  if (global_.empty()) throw UnknownStep("course is empty");
  return global_.back();
}

CourseStructure load_course_text(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("course document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("weeks") || !doc["weeks"].is_array()) {
    throw ParseError("course document must be an object with a \"weeks\" array");
  }

  std::vector<WeekStructure> weeks;
  for (const auto& jweek : doc["weeks"]) {
    if (!jweek.is_object() || !jweek.contains("week") || !jweek["week"].is_number_integer() ||
        !jweek.contains("steps") || !jweek["steps"].is_array()) {
      throw ParseError("each week needs an integer \"week\" and a \"steps\" array");
    }
    WeekStructure week;
    week.week_number = jweek["week"].get<int>();
    for (const auto& jstep : jweek["steps"]) {
      if (!jstep.is_object() || !jstep.contains("index") || !jstep["index"].is_number_integer() ||
          !jstep.contains("kind") || !jstep["kind"].is_string()) {
        throw ParseError(week_label(week.week_number) +
                         ": each step needs an integer \"index\" and a string \"kind\"");
      }
      StepRef ref{week.week_number, jstep["index"].get<int>()};
      StepKind kind;
      try {
        kind = parse_step_kind(jstep["kind"].get<std::string>());
      } catch (const ParseError& e) {
        throw ParseError("step " + ref.to_string() + ": " + e.what());
      }
      week.steps.push_back({ref, kind});
    }
    weeks.push_back(std::move(week));
  }
  return CourseStructure::from_weeks(std::move(weeks));
}

CourseStructure load_course(std::istream& in) {
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_course_text(buffer.str());
}

CourseStructure load_course_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open course file " + path);
  return load_course(in);
}

std::string course_to_json(const CourseStructure& course) {
  nlohmann::json doc;
  doc["weeks"] = nlohmann::json::array();
  for (const auto& week : course.weeks()) {
    nlohmann::json jweek;
    jweek["week"] = week.week_number;
    jweek["steps"] = nlohmann::json::array();
    for (const auto& step : week.steps) {
      jweek["steps"].push_back({{"index", step.ref.index}, {"kind", to_string(step.kind)}});
    }
    doc["weeks"].push_back(std::move(jweek));
  }
  return doc.dump(2) + "\n";
}

}  // namespace navstyle
