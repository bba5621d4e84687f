#include "navstyle/temporal.hpp"

#include <algorithm>
#include <tuple>

#include "navstyle/csv.hpp"
#include "navstyle/errors.hpp"
#include "navstyle/format.hpp"

namespace navstyle {

std::size_t TransitionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : counts) {
    for (auto c : row) sum += c;
  }
  return sum;
}

TransitionMatrix transition_matrix(const StyleTable& table, int from_week) {
  if (from_week < 1 || from_week + 1 > table.weeks) {
    throw UnknownWeek("no transition from week " + std::to_string(from_week) + " in a " +
                      std::to_string(table.weeks) + "-week table");
  }
  TransitionMatrix m;
  m.from_week = from_week;
  for (const auto& [id, path] : table.paths) {
    ++m.counts[style_slot(path.at(from_week))][style_slot(path.at(from_week + 1))];
  }
  for (std::size_t r = 0; r < 3; ++r) {
    std::size_t row_total = 0;
    for (auto c : m.counts[r]) row_total += c;
    m.empty_rows[r] = row_total == 0;
    for (std::size_t c = 0; c < 3; ++c) {
      m.probabilities[r][c] =
          row_total == 0 ? 0.0
                         : static_cast<double>(m.counts[r][c]) / static_cast<double>(row_total);
    }
  }
  return m;
}

std::vector<TransitionMatrix> all_transitions(const StyleTable& table) {
  std::vector<TransitionMatrix> out;
  for (int w = 1; w < table.weeks; ++w) out.push_back(transition_matrix(table, w));
  return out;
}

nlohmann::json to_json(const TransitionMatrix& matrix) {
  nlohmann::json j;
  j["from_week"] = matrix.from_week;
  j["counts"] = matrix.counts;
  j["probabilities"] = matrix.probabilities;
  j["empty"] = matrix.empty_rows;
  return j;
}

std::vector<std::pair<std::string, std::size_t>> PathCensus::top(std::size_t k) const {
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return std::tie(b.second, a.first) < std::tie(a.second, b.first);
  });
  if (ranked.size() > k) ranked.resize(k);
  return ranked;
}

PathCensus path_census(const StyleTable& table) {
  PathCensus census;
  for (const auto& [id, path] : table.paths) {
    ++census.counts[path.str()];
    if (path.is_constant()) {
      ++census.kept;
    } else {
      ++census.changed;
    }
  }
  return census;
}

StepRef dropout_step(const LearnerTrace& trace, const CourseStructure& course) {
  // visits are sorted by the ingestion key, so the last course step wins
  for (auto it = trace.visits.rbegin(); it != trace.visits.rend(); ++it) {
    if (course.contains(it->step)) return it->step;
  }
  throw EmptyTrace("learner " + trace.learner_id + " has no visits to course steps");
}

std::optional<double> DropoutDistribution::proportion(NavStyle style, int global_index) const {
  const auto slot = style_slot(style);
  if (global_index < 1 || global_index > total_steps) return std::nullopt;
  std::size_t placed = 0;
  for (auto c : counts[slot]) placed += c;
  return navstyle::proportion(counts[slot][static_cast<std::size_t>(global_index - 1)], placed);
}

DropoutDistribution dropout_distribution(const TraceMap& traces, const CourseStructure& course,
                                         const StyleLabels& labels) {
  DropoutDistribution dist;
  dist.total_steps = course.total_steps();
  for (auto& c : dist.counts) c.assign(static_cast<std::size_t>(dist.total_steps), 0);
  for (const auto& [id, trace] : traces) {
    auto label = labels.find(id);
    if (label == labels.end()) continue;
    const auto slot = style_slot(label->second);
    try {
      const int index = course.global_step_index(dropout_step(trace, course));
      ++dist.counts[slot][static_cast<std::size_t>(index - 1)];
      ++dist.group_sizes[slot];
    } catch (const EmptyTrace&) {
      ++dist.skipped;
    }
  }
  return dist;
}

std::string dropout_csv(const DropoutDistribution& dist, const CourseStructure& course) {
  std::string out = "style,global_step_index,week,step_index,count,proportion\n";
  for (NavStyle style : kAllStyles) {
    const auto slot = style_slot(style);
    if (dist.group_sizes[slot] == 0) continue;
    for (int g = 1; g <= dist.total_steps; ++g) {
      const StepRef step = course.step_at(g);
      out += std::string(1, style_code(style)) + "," + std::to_string(g) + "," +
             std::to_string(step.week) + "," + std::to_string(step.index) + "," +
             std::to_string(dist.counts[slot][static_cast<std::size_t>(g - 1)]) + "," +
             format_decimal(*dist.proportion(style, g)) + "\n";
    }
  }
  return out;
}

std::array<CompletionShare, 3> completion_summary(const TraceMap& traces,
                                                  const CourseStructure& course,
                                                  const StyleLabels& labels) {
  std::array<CompletionShare, 3> shares{};
  const StepRef final = course.final_step();
  for (const auto& [id, trace] : traces) {
    auto label = labels.find(id);
    if (label == labels.end()) continue;
    auto& share = shares[style_slot(label->second)];
    ++share.group_size;
    StepRef stop;
    try {
      stop = dropout_step(trace, course);
    } catch (const EmptyTrace&) {
      continue;
    }
    if (stop == final) ++share.completed;
    if (stop.week > 1) ++share.continued_past_week1;
  }
  for (auto& share : shares) {
    share.completed_proportion = proportion(share.completed, share.group_size);
    share.continued_proportion = proportion(share.continued_past_week1, share.group_size);
  }
  return shares;
}

double periodicity_index(const DropoutDistribution& dist, const CourseStructure& course,
                         NavStyle style) {
  const auto slot = style_slot(style);
  if (dist.group_sizes[slot] == 0) {
    throw EmptyGroup(std::string(style_name(style)) + " group has no dropout steps");
  }
  std::size_t boundary = 0;
  for (int w = 1; w <= course.week_count(); ++w) {
    const int index = course.global_step_index(course.week_final_step(w));
    boundary += dist.counts[slot][static_cast<std::size_t>(index - 1)];
  }
  return static_cast<double>(boundary) / static_cast<double>(dist.group_sizes[slot]);
}

std::array<std::optional<double>, 3> periodicity_indices(const DropoutDistribution& dist,
                                                         const CourseStructure& course) {
  std::array<std::optional<double>, 3> out;
  for (NavStyle style : kAllStyles) {
    if (dist.group_sizes[style_slot(style)] > 0) {
      out[style_slot(style)] = periodicity_index(dist, course, style);
    }
  }
  return out;
}

}  // namespace navstyle
