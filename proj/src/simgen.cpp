#include "navstyle/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "navstyle/csv.hpp"
#include "navstyle/errors.hpp"
#include "navstyle/parallel.hpp"

namespace navstyle {
namespace {

using std::chrono::days;
using std::chrono::hours;
using std::chrono::minutes;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string learner_name(std::size_t ordinal) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "L%07zu", ordinal + 1);
  return buf;
}

bool flip(std::mt19937_64& rng, double p) {
  return std::bernoulli_distribution(std::clamp(p, 0.0, 1.0))(rng);
}

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

NavStyle sample_style(std::mt19937_64& rng, const std::array<double, 3>& weights) {
  std::discrete_distribution<int> pick(weights.begin(), weights.end());
  return static_cast<NavStyle>(pick(rng));
}

void check_probability(double p, const std::string& field) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(field + " must lie in [0, 1], got " + std::to_string(p));
  }
}

void check_distribution(const std::array<double, 3>& row, const std::string& field) {
  double sum = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    check_probability(row[i], field + "[" + std::to_string(i) + "]");
    sum += row[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ConfigError(field + " must sum to 1, sums to " + std::to_string(sum));
  }
}

// Per-learner output before the deterministic merge.
struct LearnerOutput {
  std::vector<VisitRecord> visits;
  std::vector<CommentRecord> comments;
  std::vector<AttemptRecord> attempts;
  EnrolmentRecord enrolment;
  TruthRecord truth;
};

class LearnerSimulator {
 public:
  LearnerSimulator(const SimConfig& config, std::size_t ordinal)
      : config_(config), rng_(splitmix64(config.seed ^ static_cast<std::uint64_t>(ordinal))) {
    out_.truth.learner_id = learner_name(ordinal);
    out_.enrolment.learner_id = out_.truth.learner_id;
    out_.enrolment.enrolled_at = config.start - days{uniform_int(rng_, 1, 30)};
  }

  LearnerOutput active(NavStyle first_style) {
    const auto& course = config_.course;
    std::string codes;
    clock_ = config_.start + minutes{uniform_int(rng_, 0, 72 * 60)};
    bool dropped = false;
    NavStyle style = first_style;
    for (int w = 1; w <= course.week_count(); ++w) {
      if (dropped) {
        codes.push_back(style_code(NavStyle::Middle));
        continue;
      }
      if (w > 1) {
        style = sample_style(rng_, config_.transitions[style_slot(style)]);
        const auto week_start = config_.start + days{7 * (w - 1)};
        clock_ = std::max(clock_, week_start) + minutes{uniform_int(rng_, 0, 48 * 60)};
      }
      const auto& params = config_.archetypes[style_slot(style)];
      auto trace = construct_week_trace(style, course.week(w), rng_, params.step_hazard,
                                        w == 1 ? 1 : 0);
      emit_week(trace.steps, params);
      codes.push_back(style_code(style));
      out_.truth.weeks_present = w;
      dropped = trace.stopped_early ||
                (w < course.week_count() && flip(rng_, params.boundary_stop_probability));
    }
    out_.truth.path = StylePath(std::move(codes));
    out_.truth.active = true;
    return std::move(out_);
  }

  // Visits the first one to three steps of week 1 in order; completes nothing.
  LearnerOutput inactive() {
    const auto& first_week = config_.course.week(1);
    clock_ = config_.start + minutes{uniform_int(rng_, 0, 72 * 60)};
    const int max_steps = std::min<int>(3, static_cast<int>(first_week.steps.size()) - 1);
    const int count = max_steps < 1 ? 0 : uniform_int(rng_, 1, max_steps);
    for (int i = 0; i < count; ++i) {
      clock_ += minutes{uniform_int(rng_, 2, 30)};
      out_.visits.push_back(
          {out_.truth.learner_id, first_week.steps[static_cast<std::size_t>(i)].ref, clock_, {}});
    }
    return idle();
  }

  LearnerOutput unenrolled() {
    out_.enrolment.unenrolled_at = out_.enrolment.enrolled_at + days{uniform_int(rng_, 1, 10)};
    return idle();
  }

 private:
  LearnerOutput idle() {
    out_.truth.path =
        StylePath(std::string(static_cast<std::size_t>(config_.course.week_count()), 'M'));
    out_.truth.active = false;
    return std::move(out_);
  }

  void emit_week(const std::vector<StepRef>& steps, const ArchetypeParams& params) {
    const auto& course = config_.course;
    for (const auto& step : steps) {
      clock_ += minutes{uniform_int(rng_, 2, 30)};
      VisitRecord visit{out_.truth.learner_id, step, clock_, {}};
      if (out_.visits.empty() || flip(rng_, params.completion_probability)) {
        visit.last_completed_at = clock_ + minutes{uniform_int(rng_, 1, 20)};
      }
      out_.visits.push_back(visit);

      const StepKind kind = course.kind(step);
      if (kind == StepKind::Discussion && flip(rng_, params.comment_probability)) {
        out_.comments.push_back(
            {out_.truth.learner_id, step, clock_ + minutes{uniform_int(rng_, 1, 10)}});
      } else if (kind == StepKind::Assessment && params.mean_attempts > 0.0) {
        const int submissions = std::poisson_distribution<int>(params.mean_attempts)(rng_);
        const int questions = config_.questions_per_assessment;
        for (int i = 0; i < submissions; ++i) {
          AttemptRecord attempt;
          attempt.learner_id = out_.truth.learner_id;
          attempt.step = step;
          attempt.question_number = i < questions ? i + 1 : uniform_int(rng_, 1, questions);
          attempt.correct = flip(rng_, params.correctness_probability);
          attempt.submitted_at = clock_ + minutes{i + 1};
          out_.attempts.push_back(attempt);
        }
      }
    }
  }

  const SimConfig& config_;
  std::mt19937_64 rng_;
  Timestamp clock_{};
  LearnerOutput out_;
};

// Week-1 styles by quota rather than independent draws, so the cohort's
// opening mix matches the configuration up to rounding. Quotas use largest
// remainders; the assignment to learners is a seeded shuffle.
std::vector<NavStyle> initial_styles(const SimConfig& config) {
  const std::size_t n = config.cohort_size;
  std::array<std::size_t, 3> quota{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < 3; ++s) {
    const double exact = config.initial_mix[s] * static_cast<double>(n);
    quota[s] = static_cast<std::size_t>(std::floor(exact));
    remainder[s] = exact - static_cast<double>(quota[s]);
    assigned += quota[s];
  }
  std::array<std::size_t, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < n; i = (i + 1) % 3, ++assigned) ++quota[order[i]];

  std::vector<NavStyle> styles;
  styles.reserve(n);
  for (NavStyle style : kAllStyles) styles.insert(styles.end(), quota[style_slot(style)], style);
  std::mt19937_64 rng(splitmix64(~config.seed));
  std::shuffle(styles.begin(), styles.end(), rng);
  return styles;
}

}  // namespace

SimConfig default_sim_config(CourseStructure course) {
  SimConfig config;
  config.course = std::move(course);
  config.cohort_size = 5204;
  config.initial_mix = {0.2982, 0.0673, 0.6345};

  // Midpoints of the observed week-to-week ranges. Cells without a reported
  // range take the remaining mass: S->G / S->M split as in the Week 1->2
  // transition (29.45 : 13.40), M->G as the residual of the M row.
  const double s_stay = (57.15 + 77.15) / 2.0;
  const double s_rest = 100.0 - s_stay;
  const std::array<double, 3> s_row = {s_stay, s_rest * 29.45 / (29.45 + 13.40),
                                       s_rest * 13.40 / (29.45 + 13.40)};
  const std::array<double, 3> g_row = {(8.03 + 20.29) / 2.0, (21.02 + 39.76) / 2.0,
                                       (41.42 + 67.55) / 2.0};
  const double m_to_s = (0.16 + 2.63) / 2.0;
  const double m_stay = (89.04 + 98.86) / 2.0;
  const std::array<double, 3> m_row = {m_to_s, 100.0 - m_to_s - m_stay, m_stay};
  const std::array<std::array<double, 3>, 3> raw = {s_row, g_row, m_row};
  for (std::size_t r = 0; r < 3; ++r) {
    const double sum = raw[r][0] + raw[r][1] + raw[r][2];
    for (std::size_t c = 0; c < 3; ++c) config.transitions[r][c] = raw[r][c] / sum;
  }

  // Continue-past-week probabilities 87.82% (S) and 61.71% (G); the Middle
  // hazard leaves about 14.5% of Week-1 Middle learners reaching the end of
  // the week's prefix.
  config.archetypes[style_slot(NavStyle::Sequential)] = {0.30, 13.6, 0.700, 0.0, 0.1218, 0.99};
  config.archetypes[style_slot(NavStyle::Global)] = {0.22, 9.1, 0.643, 0.0, 0.3829, 0.93};
  config.archetypes[style_slot(NavStyle::Middle)] = {0.02, 0.8, 0.593, 0.15, 0.0, 0.76};

  config.seed = 42;
  config.questions_per_assessment = 7;
  config.start = parse_timestamp("2020-01-06T00:00:00Z");
  return config;
}

void validate_config(const SimConfig& config) {
  if (config.course.week_count() == 0) throw ConfigError("config has no course");
  if (config.cohort_size == 0) throw ConfigError("cohort_size must be positive");
  if (config.questions_per_assessment < 1) {
    throw ConfigError("questions_per_assessment must be >= 1");
  }
  check_distribution(config.initial_mix, "initial_mix");
  for (NavStyle style : kAllStyles) {
    const std::string code(1, style_code(style));
    check_distribution(config.transitions[style_slot(style)], "transitions[" + code + "]");
    const auto& p = config.archetypes[style_slot(style)];
    const std::string prefix = "archetypes." + code + ".";
    check_probability(p.comment_probability, prefix + "comment_probability");
    check_probability(p.correctness_probability, prefix + "correctness_probability");
    check_probability(p.step_hazard, prefix + "step_hazard");
    check_probability(p.boundary_stop_probability, prefix + "boundary_stop_probability");
    check_probability(p.completion_probability, prefix + "completion_probability");
    if (!(p.mean_attempts >= 0.0) || !std::isfinite(p.mean_attempts)) {
      throw ConfigError(prefix + "mean_attempts must be a finite value >= 0");
    }
  }
  // Week 1 must admit a non-empty Middle prefix, and Global needs triggers
  // in every week a Global label can be sampled for.
  if (config.course.week(1).steps.size() < 2) {
    throw ConfigError("week 1 needs at least 2 steps to host a Middle learner");
  }
  const bool global_reachable =
      config.initial_mix[1] > 0.0 || config.transitions[0][1] > 0.0 ||
      config.transitions[2][1] > 0.0;
  if (global_reachable) {
    for (int w = 1; w <= config.course.week_count(); ++w) {
      if (config.course.global_trigger_steps(w).empty()) {
        throw ConfigError("week " + std::to_string(w) +
                          " has no step after its last Main step, so Global is unreachable");
      }
    }
  }
}

SimConfig sim_config_from_json(const nlohmann::json& doc, CourseStructure course) {
  SimConfig config = default_sim_config(std::move(course));
  if (!doc.is_object()) throw ConfigError("simulation config must be a JSON object");
  try {
    if (doc.contains("cohort_size")) config.cohort_size = doc["cohort_size"].get<std::size_t>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("initial_mix")) {
      config.initial_mix = doc["initial_mix"].get<std::array<double, 3>>();
    }
    if (doc.contains("transitions")) config.transitions = doc["transitions"].get<Matrix3>();
    if (doc.contains("questions_per_assessment")) {
      config.questions_per_assessment = doc["questions_per_assessment"].get<int>();
    }
    if (doc.contains("inactive_learners")) {
      config.inactive_learners = doc["inactive_learners"].get<std::size_t>();
    }
    if (doc.contains("unenrolled_learners")) {
      config.unenrolled_learners = doc["unenrolled_learners"].get<std::size_t>();
    }
    if (doc.contains("start")) config.start = parse_timestamp(doc["start"].get<std::string>());
    if (doc.contains("archetypes")) {
      for (NavStyle style : kAllStyles) {
        const std::string code(1, style_code(style));
        if (!doc["archetypes"].contains(code)) continue;
        const auto& j = doc["archetypes"][code];
        auto& p = config.archetypes[style_slot(style)];
        p.comment_probability = j.value("comment_probability", p.comment_probability);
        p.mean_attempts = j.value("mean_attempts", p.mean_attempts);
        p.correctness_probability = j.value("correctness_probability", p.correctness_probability);
        p.step_hazard = j.value("step_hazard", p.step_hazard);
        p.boundary_stop_probability =
            j.value("boundary_stop_probability", p.boundary_stop_probability);
        p.completion_probability = j.value("completion_probability", p.completion_probability);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad simulation config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad simulation config: ") + e.what());
  }
  validate_config(config);
  return config;
}

nlohmann::json to_json(const SimConfig& config) {
  nlohmann::json j;
  j["cohort_size"] = config.cohort_size;
  j["seed"] = config.seed;
  j["initial_mix"] = config.initial_mix;
  j["transitions"] = config.transitions;
  j["questions_per_assessment"] = config.questions_per_assessment;
  j["inactive_learners"] = config.inactive_learners;
  j["unenrolled_learners"] = config.unenrolled_learners;
  j["start"] = format_timestamp(config.start);
  for (NavStyle style : kAllStyles) {
    const auto& p = config.archetypes[style_slot(style)];
    j["archetypes"][std::string(1, style_code(style))] = {
        {"comment_probability", p.comment_probability},
        {"mean_attempts", p.mean_attempts},
        {"correctness_probability", p.correctness_probability},
        {"step_hazard", p.step_hazard},
        {"boundary_stop_probability", p.boundary_stop_probability},
        {"completion_probability", p.completion_probability},
    };
  }
  return j;
}

WeekTrace construct_week_trace(NavStyle style, const WeekStructure& week, std::mt19937_64& rng,
                               double step_hazard, std::size_t min_length) {
  WeekTrace out;
  std::vector<StepRef> path;
  std::vector<std::size_t> mains;
  for (std::size_t i = 0; i < week.steps.size(); ++i) {
    path.push_back(week.steps[i].ref);
    if (week.steps[i].kind == StepKind::Main) mains.push_back(i);
  }
  const std::string where = "week " + std::to_string(week.week_number);

  switch (style) {
    case NavStyle::Sequential:
      out.steps = std::move(path);
      return out;

    case NavStyle::Global: {
      if (mains.empty() || mains.back() + 1 >= path.size()) {
        throw Unconstructible(where + " has no step after its last Main step");
      }
      const std::size_t trigger =
          std::uniform_int_distribution<std::size_t>(mains.back() + 1, path.size() - 1)(rng);
      const std::size_t main = mains[std::uniform_int_distribution<std::size_t>(0, mains.size() - 1)(rng)];
      const std::size_t insert_at = std::uniform_int_distribution<std::size_t>(0, main)(rng);
      const StepRef moved = path[trigger];
      path.erase(path.begin() + static_cast<std::ptrdiff_t>(trigger));
      path.insert(path.begin() + static_cast<std::ptrdiff_t>(insert_at), moved);
      out.steps = std::move(path);
      return out;
    }

    case NavStyle::Middle: {
      if (path.size() <= min_length) {
        throw Unconstructible(where + " is too short for a Middle prefix of length " +
                              std::to_string(min_length));
      }
      // Strict prefix: the week's last step is never reached.
      std::size_t length = min_length;
      while (length + 1 < path.size()) {
        if (flip(rng, step_hazard)) {
          out.stopped_early = true;
          break;
        }
        ++length;
      }
      path.resize(length);
      out.steps = std::move(path);
      return out;
    }
  }
  return out;
}

SimulatedCohort generate_cohort(const SimConfig& config, unsigned threads) {
  validate_config(config);
  const std::size_t active = config.cohort_size;
  const std::size_t total = active + config.inactive_learners + config.unenrolled_learners;

  const std::vector<NavStyle> first_styles = initial_styles(config);
  std::vector<LearnerOutput> learners(total);
  parallel_chunks(total, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      LearnerSimulator sim(config, k);
      if (k < active) {
        learners[k] = sim.active(first_styles[k]);
      } else if (k < active + config.inactive_learners) {
        learners[k] = sim.inactive();
      } else {
        learners[k] = sim.unenrolled();
      }
    }
  });

  SimulatedCohort cohort;
  for (auto& l : learners) {
    std::move(l.visits.begin(), l.visits.end(), std::back_inserter(cohort.visits));
    std::move(l.comments.begin(), l.comments.end(), std::back_inserter(cohort.comments));
    std::move(l.attempts.begin(), l.attempts.end(), std::back_inserter(cohort.attempts));
    cohort.enrolments.push_back(std::move(l.enrolment));
    cohort.truth.push_back(std::move(l.truth));
  }
  return cohort;
}

SimBundle to_bundle(const SimulatedCohort& cohort) {
  SimBundle bundle;
  bundle.activity_csv = std::string(kActivityHeader) + "\n";
  for (const auto& v : cohort.visits) bundle.activity_csv += write_activity_row(v) + "\n";
  bundle.comments_csv = std::string(kCommentsHeader) + "\n";
  for (const auto& c : cohort.comments) bundle.comments_csv += write_comment_row(c) + "\n";
  bundle.attempts_csv = std::string(kAttemptsHeader) + "\n";
  for (const auto& a : cohort.attempts) bundle.attempts_csv += write_attempt_row(a) + "\n";
  bundle.enrolments_csv = std::string(kEnrolmentsHeader) + "\n";
  for (const auto& e : cohort.enrolments) bundle.enrolments_csv += write_enrolment_row(e) + "\n";
  bundle.ground_truth_csv = "learner_id,style_path,active\n";
  for (const auto& t : cohort.truth) {
    bundle.ground_truth_csv += csv::escape(t.learner_id) + "," + t.path.str() + "," +
                               (t.active ? "true" : "false") + "\n";
  }
  return bundle;
}

std::array<std::array<std::size_t, 3>, 3> empirical_transition_counts(const GroundTruth& truth) {
  std::array<std::array<std::size_t, 3>, 3> counts{};
  for (const auto& t : truth) {
    if (!t.active) continue;
    for (int w = 1; w < t.weeks_present; ++w) {
      ++counts[style_slot(t.path.at(w))][style_slot(t.path.at(w + 1))];
    }
  }
  return counts;
}

double empirical_transition_check(const GroundTruth& truth, const SimConfig& config) {
  const auto counts = empirical_transition_counts(truth);
  double worst = 0.0;
  for (std::size_t r = 0; r < 3; ++r) {
    const std::size_t row_total = counts[r][0] + counts[r][1] + counts[r][2];
    if (row_total == 0) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      const double empirical = static_cast<double>(counts[r][c]) / static_cast<double>(row_total);
      worst = std::max(worst, std::abs(empirical - config.transitions[r][c]));
    }
  }
  return worst;
}

}  // namespace navstyle
