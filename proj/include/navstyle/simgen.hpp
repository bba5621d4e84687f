#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "navstyle/classify.hpp"
#include "navstyle/course.hpp"
#include "navstyle/ingest.hpp"
#include "navstyle/temporal.hpp"
#include "navstyle/timestamp.hpp"

namespace navstyle {

// Behaviour of learners in one style during a week they spend in that style.
struct ArchetypeParams {
  double comment_probability = 0.0;      // one comment per visited Discussion step
  double mean_attempts = 0.0;            // Poisson mean per visited Assessment step
  double correctness_probability = 0.0;  // per submission
  double step_hazard = 0.0;              // Middle weeks: stop before each further step
  double boundary_stop_probability = 0.0;  // leave the course after finishing the week
  double completion_probability = 1.0;   // each visited step marked complete
};

struct SimConfig {
  CourseStructure course;
  std::size_t cohort_size = 1000;  // active learners
  std::array<double, 3> initial_mix{};
  Matrix3 transitions{};
  std::array<ArchetypeParams, 3> archetypes{};  // S, G, M
  std::uint64_t seed = 42;
  int questions_per_assessment = 7;
  std::size_t inactive_learners = 0;    // visit a few steps, never complete any
  std::size_t unenrolled_learners = 0;  // enrol then unenrol, no activity
  Timestamp start{};
};

/// Defaults shaped after the reported cohort: Week-1 mix, weekly transition
/// ranges (midpoint per cell, rows renormalized) and per-style engagement.
SimConfig default_sim_config(CourseStructure course);

/// Throws ConfigError naming the offending field.
void validate_config(const SimConfig& config);

/// Overlays the fields present in `doc` on default_sim_config(course).
SimConfig sim_config_from_json(const nlohmann::json& doc, CourseStructure course);
nlohmann::json to_json(const SimConfig& config);

struct TruthRecord {
  std::string learner_id;
  StylePath path;
  bool active = true;
  int weeks_present = 0;  // weeks whose style was sampled before dropping out
};

using GroundTruth = std::vector<TruthRecord>;  // ordered by learner_id

struct SimulatedCohort {
  std::vector<VisitRecord> visits;
  std::vector<CommentRecord> comments;
  std::vector<AttemptRecord> attempts;
  std::vector<EnrolmentRecord> enrolments;
  GroundTruth truth;
};

struct WeekTrace {
  std::vector<StepRef> steps;
  bool stopped_early = false;  // the hazard ended a Middle week
};

/// Builds a first-visit sequence that classifies as `style`:
///   S: the full path in order.
///   G: the full path with one trigger step moved before a Main step; the
///      trigger, the Main step and the insertion point are sampled.
///   M: a strict in-order prefix whose length follows `step_hazard`, never
///      shorter than `min_length`.
/// Throws Unconstructible when the week cannot hold the style.
WeekTrace construct_week_trace(NavStyle style, const WeekStructure& week, std::mt19937_64& rng,
                               double step_hazard = 0.0, std::size_t min_length = 0);

/// Learner k draws from its own generator seeded by (seed XOR k), so the
/// output is identical for any thread count.
SimulatedCohort generate_cohort(const SimConfig& config, unsigned threads = 1);

struct SimBundle {
  std::string activity_csv;
  std::string comments_csv;
  std::string attempts_csv;
  std::string enrolments_csv;
  std::string ground_truth_csv;  // learner_id,style_path,active
};

SimBundle to_bundle(const SimulatedCohort& cohort);

/// Transition counts pooled over every consecutive week pair in which the
/// learner was still present in the later week.
std::array<std::array<std::size_t, 3>, 3> empirical_transition_counts(const GroundTruth& truth);

/// Largest elementwise gap between the empirical and configured matrices,
/// over rows with at least one observed transition.
double empirical_transition_check(const GroundTruth& truth, const SimConfig& config);

}  // namespace navstyle
