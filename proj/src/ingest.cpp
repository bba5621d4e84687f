#include "navstyle/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <tuple>

#include "navstyle/csv.hpp"
#include "navstyle/errors.hpp"

namespace navstyle {
namespace {

std::string join_header(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

int parse_int_field(const std::string& text, const char* name) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ParseError(std::string("invalid ") + name + " '" + text + "'");
  }
  if (value < 1) throw ParseError(std::string(name) + " must be >= 1, got " + text);
  return value;
}

Timestamp parse_time_field(const std::string& text, const char* name) {
  try {
    return parse_timestamp(text);
  } catch (const ParseError&) {
    throw ParseError(std::string("invalid ") + name + " '" + text + "'");
  }
}

std::string require_id(const std::string& text) {
  if (text.empty()) throw ParseError("empty learner_id");
  return text;
}

// Shared driver: header check, then one record per data row via `convert`,
// routing row failures through the policy.
template <typename Record, typename Convert>
ParseResult<Record> parse_csv(std::istream& in, RowPolicy policy, const char* header,
                              std::size_t columns, Convert convert) {
  csv::Reader reader(in);
  ParseResult<Record> result;

  auto first = reader.next();
  if (!first) throw SchemaError(std::string("missing header; expected '") + header + "'");
  if (join_header(*first) != header) {
    throw SchemaError("bad header '" + join_header(*first) + "'; expected '" + header + "'");
  }

  while (true) {
    std::optional<std::vector<std::string>> fields;
    try {
      fields = reader.next();
    } catch (const RowError& e) {
      if (policy == RowPolicy::Strict) throw;
      result.issues.push_back({e.line(), e.detail()});
      continue;
    }
    if (!fields) break;
    try {
      if (fields->size() != columns) {
        throw ParseError("expected " + std::to_string(columns) + " fields, found " +
                         std::to_string(fields->size()));
      }
      result.records.push_back(convert(*fields));
      result.lines.push_back(reader.line());
    } catch (const ParseError& e) {
      if (policy == RowPolicy::Strict) throw RowError(reader.line(), e.what());
      result.issues.push_back({reader.line(), e.what()});
    }
  }
  return result;
}

std::string optional_time(const std::optional<Timestamp>& ts) {
  return ts ? format_timestamp(*ts) : std::string();
}

}  // namespace

ParseResult<VisitRecord> parse_activity(std::istream& in, RowPolicy policy) {
  return parse_csv<VisitRecord>(in, policy, kActivityHeader, 5, [](const auto& f) {
    VisitRecord v;
    v.learner_id = require_id(f[0]);
    v.step = {parse_int_field(f[1], "week_number"), parse_int_field(f[2], "step_number")};
    v.first_visited_at = parse_time_field(f[3], "first_visited_at");
    if (!f[4].empty()) {
      v.last_completed_at = parse_time_field(f[4], "last_completed_at");
      if (*v.last_completed_at < v.first_visited_at) {
        throw ParseError("last_completed_at precedes first_visited_at");
      }
    }
    return v;
  });
}

ParseResult<CommentRecord> parse_comments(std::istream& in, RowPolicy policy) {
  return parse_csv<CommentRecord>(in, policy, kCommentsHeader, 4, [](const auto& f) {
    CommentRecord c;
    c.learner_id = require_id(f[0]);
    c.step = {parse_int_field(f[1], "week_number"), parse_int_field(f[2], "step_number")};
    c.posted_at = parse_time_field(f[3], "posted_at");
    return c;
  });
}

ParseResult<AttemptRecord> parse_attempts(std::istream& in, RowPolicy policy) {
  return parse_csv<AttemptRecord>(in, policy, kAttemptsHeader, 6, [](const auto& f) {
    AttemptRecord a;
    a.learner_id = require_id(f[0]);
    a.step = {parse_int_field(f[1], "week_number"), parse_int_field(f[2], "step_number")};
    a.question_number = parse_int_field(f[3], "question_number");
    if (f[4] == "true") {
      a.correct = true;
    } else if (f[4] == "false") {
      a.correct = false;
    } else {
      throw ParseError("correct must be true or false, got '" + f[4] + "'");
    }
    a.submitted_at = parse_time_field(f[5], "submitted_at");
    return a;
  });
}

ParseResult<EnrolmentRecord> parse_enrolments(std::istream& in, RowPolicy policy) {
  return parse_csv<EnrolmentRecord>(in, policy, kEnrolmentsHeader, 3, [](const auto& f) {
    EnrolmentRecord e;
    e.learner_id = require_id(f[0]);
    e.enrolled_at = parse_time_field(f[1], "enrolled_at");
    if (!f[2].empty()) {
      e.unenrolled_at = parse_time_field(f[2], "unenrolled_at");
      if (*e.unenrolled_at < e.enrolled_at) throw ParseError("unenrolled_at precedes enrolled_at");
    }
    return e;
  });
}

TraceMap build_traces(std::span<const VisitRecord> visits) {
  // learner -> step -> collapsed visit
  std::map<std::string, std::map<StepRef, VisitRecord>> collapsed;
  for (const auto& v : visits) {
    auto& per_step = collapsed[v.learner_id];
    auto [it, inserted] = per_step.try_emplace(v.step, v);
    if (inserted) continue;
    VisitRecord& kept = it->second;
    kept.first_visited_at = std::min(kept.first_visited_at, v.first_visited_at);
    if (v.last_completed_at &&
        (!kept.last_completed_at || *kept.last_completed_at < *v.last_completed_at)) {
      kept.last_completed_at = v.last_completed_at;
    }
  }

  TraceMap traces;
  for (auto& [learner, per_step] : collapsed) {
    LearnerTrace trace;
    trace.learner_id = learner;
    trace.visits.reserve(per_step.size());
    for (auto& [step, visit] : per_step) {
      trace.is_active = trace.is_active || visit.last_completed_at.has_value();
      trace.visits.push_back(std::move(visit));
    }
    std::sort(trace.visits.begin(), trace.visits.end(),
              [](const VisitRecord& a, const VisitRecord& b) {
                return std::tie(a.first_visited_at, a.step) < std::tie(b.first_visited_at, b.step);
              });
    traces.emplace(learner, std::move(trace));
  }
  return traces;
}

TraceMap active_learners(const TraceMap& traces) {
  TraceMap active;
  for (const auto& [id, trace] : traces) {
    if (trace.is_active) active.emplace(id, trace);
  }
  return active;
}

std::size_t remaining_enrolments(std::span<const EnrolmentRecord> enrolments) {
  return static_cast<std::size_t>(std::count_if(
      enrolments.begin(), enrolments.end(), [](const auto& e) { return !e.unenrolled_at; }));
}

std::string write_activity_row(const VisitRecord& v) {
  return csv::escape(v.learner_id) + "," + std::to_string(v.step.week) + "," +
         std::to_string(v.step.index) + "," + format_timestamp(v.first_visited_at) + "," +
         optional_time(v.last_completed_at);
}

std::string write_comment_row(const CommentRecord& c) {
  return csv::escape(c.learner_id) + "," + std::to_string(c.step.week) + "," +
         std::to_string(c.step.index) + "," + format_timestamp(c.posted_at);
}

std::string write_attempt_row(const AttemptRecord& a) {
  return csv::escape(a.learner_id) + "," + std::to_string(a.step.week) + "," +
         std::to_string(a.step.index) + "," + std::to_string(a.question_number) + "," +
         (a.correct ? "true" : "false") + "," + format_timestamp(a.submitted_at);
}

std::string write_enrolment_row(const EnrolmentRecord& e) {
  return csv::escape(e.learner_id) + "," + format_timestamp(e.enrolled_at) + "," +
         optional_time(e.unenrolled_at);
}

}  // namespace navstyle
