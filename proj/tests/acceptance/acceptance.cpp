// Acceptance checks, one line per criterion:
//   acceptance            run all
//   acceptance 3 5        run the listed criteria
// Exit status is 0 only when every selected criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "../oracles.hpp"
#include "../support.hpp"
#include "navstyle/classify.hpp"
#include "navstyle/format.hpp"
#include "navstyle/report.hpp"
#include "navstyle/simgen.hpp"
#include "navstyle/stats.hpp"
#include "navstyle/temporal.hpp"

namespace ns = navstyle;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int places = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", places, v);
  return buf;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1. Classifier agrees with the literal definitions on every arrangement.
Outcome classifier_oracle() {
  Outcome out;
  const auto start = Clock::now();
  const auto course = ns::testing::five_step_course();
  const auto arrangements = ns::oracle::all_arrangements(course.linear_path(1));
  std::size_t agree = 0;
  for (const auto& f : arrangements) {
    const auto trace = ns::testing::trace_of("L", f);
    if (ns::classify_week(trace, course, 1) == ns::oracle::classify(f, course, 1)) ++agree;
  }
  const double elapsed = seconds_since(start);
  out.require(arrangements.size() == 326, std::to_string(arrangements.size()) +
                                              " traces (325 arrangements + empty)");
  out.require(agree == arrangements.size(),
              std::to_string(agree) + "/" + std::to_string(arrangements.size()) + " agree");
  out.require(elapsed < 1.0, "runtime " + fixed(elapsed, 3) + " s < 1 s");
  return out;
}

// 2. A 10,000-learner cohort classifies back to its ground truth.
Outcome simulator_round_trip() {
  Outcome out;
  const auto start = Clock::now();
  auto config = ns::default_sim_config(ns::testing::six_week_course());
  config.cohort_size = 10000;
  config.seed = 42;
  const auto cohort = ns::generate_cohort(config, worker_count());
  const auto active = ns::active_learners(ns::build_traces(cohort.visits));
  const auto table = ns::cohort_styles(active, config.course, worker_count());
  std::size_t agree = 0, truth_active = 0;
  for (const auto& t : cohort.truth) {
    if (!t.active) continue;
    ++truth_active;
    auto it = table.paths.find(t.learner_id);
    if (it != table.paths.end() && it->second == t.path) ++agree;
  }
  const double gap = ns::empirical_transition_check(cohort.truth, config);
  const double elapsed = seconds_since(start);
  out.require(truth_active == 10000 && agree == truth_active,
              std::to_string(agree) + "/" + std::to_string(truth_active) + " labels agree");
  out.require(table.cohort_size() == 10000, "classified cohort " +
                                                std::to_string(table.cohort_size()));
  out.require(gap <= 0.02, "max transition gap " + fixed(gap) + " <= 0.02");
  out.require(elapsed < 10.0, "runtime " + fixed(elapsed, 2) + " s < 10 s");
  return out;
}

// 3. Mann-Whitney U arithmetic and the normal approximation at small n.
Outcome mann_whitney_checks() {
  Outcome out;
  const std::vector<double> low = {1, 2, 3, 4}, high = {5, 6, 7, 8};
  const std::vector<double> odd = {1, 3, 5, 7}, even = {2, 4, 6, 8};
  const double separated = ns::mann_whitney(low, high).statistic;
  const double interleaved = ns::mann_whitney(odd, even).statistic;
  out.require(separated == 0.0 && interleaved == 6.0,
              "hand cases U=" + fixed(separated, 1) + ", U=" + fixed(interleaved, 1));

  // Every tie-free split of 1..2n into two samples of n. The normal
  // approximation is evaluated with the continuity correction, its most
  // accurate form at these sizes.
  double worst = 0.0;
  std::string per_n;
  for (int n = 1; n <= 6; ++n) {
    std::vector<double> pooled(static_cast<std::size_t>(2 * n));
    std::iota(pooled.begin(), pooled.end(), 1.0);
    std::vector<bool> pick(pooled.size(), false);
    std::fill(pick.begin(), pick.begin() + n, true);
    double worst_n = 0.0;
    do {
      std::vector<double> a, b;
      for (std::size_t i = 0; i < pooled.size(); ++i) (pick[i] ? a : b).push_back(pooled[i]);
      const double exact = ns::mann_whitney_exact(a, b).p_value;
      const double approx = ns::mann_whitney(a, b, true).p_value;
      worst_n = std::max(worst_n, std::abs(exact - approx));
    } while (std::prev_permutation(pick.begin(), pick.end()));
    worst = std::max(worst, worst_n);
    per_n += (n > 1 ? "," : "") + std::string("n=") + std::to_string(n) + ":" + fixed(worst_n);
  }
  out.require(worst <= 0.05, "normal vs exact max |dp| " + fixed(worst) + " <= 0.05 [" +
                                 per_n + "]");

  std::mt19937_64 rng(20200301);
  std::size_t exact_sums = 0;
  for (int round = 0; round < 1000; ++round) {
    std::vector<double> a(1 + rng() % 40), b(1 + rng() % 40);
    for (auto& x : a) x = static_cast<double>(rng() % 25);
    for (auto& x : b) x = static_cast<double>(rng() % 25);
    const double sum = ns::mann_whitney(a, b).statistic + ns::mann_whitney(b, a).statistic;
    if (sum == static_cast<double>(a.size() * b.size())) ++exact_sums;
  }
  out.require(exact_sums == 1000, "U_a+U_b=n1*n2 on " + std::to_string(exact_sums) + "/1000");
  return out;
}

// 4. Kruskal-Wallis values and the two-group identity with Mann-Whitney.
Outcome kruskal_wallis_checks() {
  Outcome out;
  const std::vector<std::vector<double>> textbook = {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}};
  const double h = ns::kruskal_wallis(textbook).statistic;
  out.require(std::abs(h - 7.2) <= 1e-9, "H=" + ns::format_decimal(h));

  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int round = 0; round < 100; ++round) {
    std::vector<double> pool(60);
    std::iota(pool.begin(), pool.end(), 1.0);
    std::shuffle(pool.begin(), pool.end(), rng);
    const std::size_t n1 = 2 + rng() % 20, n2 = 2 + rng() % 20;
    const std::vector<double> a(pool.begin(), pool.begin() + static_cast<long>(n1));
    const std::vector<double> b(pool.begin() + static_cast<long>(n1),
                                pool.begin() + static_cast<long>(n1 + n2));
    const double z = *ns::mann_whitney(a, b).z;
    const std::vector<std::vector<double>> groups = {a, b};
    worst = std::max(worst, std::abs(ns::kruskal_wallis(groups).statistic - z * z));
  }
  out.require(worst <= 1e-9, "max |H - Z^2| " + ns::format_decimal(worst));

  const std::vector<std::vector<double>> ties = {{5, 5, 5}, {5, 5}, {5}};
  const auto null = ns::kruskal_wallis(ties);
  out.require(null.statistic == 0.0 && null.p_value == 1.0, "all ties H=0, p=1");
  return out;
}

// 5. Lilliefors on a normal sample, a zero-inflated sample and a brute-force sup.
Outcome lilliefors_checks() {
  Outcome out;
  const ns::MonteCarloOptions mc{20200301, 10000, worker_count()};

  std::mt19937_64 rng(2020);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> gaussian(10000);
  for (auto& x : gaussian) x = normal(rng);
  const auto g = ns::ks_normality(gaussian, mc);
  out.require(g.statistic <= 0.02 && g.p_value > 0.05,
              "normal n=10000 D=" + fixed(g.statistic, 5) + " p=" + fixed(g.p_value));

  // 90% zeros, the rest small positive counts.
  std::vector<double> inflated(5204, 0.0);
  std::poisson_distribution<int> counts(3.0);
  for (std::size_t i = 0; i < inflated.size(); ++i) {
    if (i % 10 == 0) inflated[i] = 1.0 + counts(rng);
  }
  const auto z = ns::ks_normality(inflated, mc);
  out.require(z.p_value < 0.001,
              "zero-inflated n=5204 D=" + fixed(z.statistic) + " p=" + fixed(z.p_value, 5));

  double worst = 0.0;
  for (int round = 0; round < 100; ++round) {
    std::vector<double> v(10 + rng() % 200);
    for (auto& x : v) x = round % 3 == 0 ? std::floor(normal(rng) * 2.0) : normal(rng);
    worst = std::max(worst,
                     std::abs(ns::lilliefors_statistic(v) - ns::oracle::ks_sup_distance(v)));
  }
  out.require(worst <= 1e-12, "max |D - sup| " + ns::format_decimal(worst));
  return out;
}

// 6. Percentages of the reported counts and the shipped course size.
Outcome arithmetic_checks() {
  Outcome out;
  struct Case {
    std::size_t num, den;
    double expected;
  };
  const Case cases[] = {{1552, 5204, 29.82}, {350, 5204, 6.73},  {3302, 5204, 63.45},
                        {887, 1552, 57.15},  {422, 3302, 12.78}, {358, 1552, 23.07}};
  for (const auto& c : cases) {
    const auto pct = ns::rounded_percentage(c.num, c.den);
    out.require(pct && std::abs(*pct - c.expected) <= 0.01 + 1e-9,
                std::to_string(c.num) + "/" + std::to_string(c.den) + "=" +
                    (pct ? ns::format_decimal(*pct) : "n/a") + "%");
  }
  const auto course = ns::testing::six_week_course();
  out.require(course.total_steps() == 82, "course steps " + std::to_string(course.total_steps()));
  return out;
}

std::array<double, 3> random_distribution(std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::array<double, 3> row{};
  for (auto& x : row) x = gamma(rng) + 1e-6;
  const double sum = row[0] + row[1] + row[2];
  for (auto& x : row) x /= sum;
  row[2] = 1.0 - row[0] - row[1];
  return row;
}

// 7. Structural invariants on many random cohorts, plus the two periodicity
// reference cohorts.
Outcome structural_invariants() {
  Outcome out;
  const auto course = ns::testing::six_week_course();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::size_t rows_ok = 0, partitions_ok = 0, census_ok = 0, dropout_ok = 0;
  double worst_row = 0.0, worst_dropout = 0.0;
  const int cohorts = 1000;

  for (int k = 0; k < cohorts; ++k) {
    auto config = ns::default_sim_config(course);
    config.seed = rng();
    config.cohort_size = 10 + rng() % 60;
    config.initial_mix = random_distribution(rng);
    for (auto& row : config.transitions) row = random_distribution(rng);
    for (auto& p : config.archetypes) {
      p.comment_probability = unit(rng);
      p.mean_attempts = 5.0 * unit(rng);
      p.correctness_probability = unit(rng);
      p.step_hazard = 0.3 * unit(rng);
      p.boundary_stop_probability = 0.5 * unit(rng);
      p.completion_probability = 0.5 + 0.5 * unit(rng);
    }
    const auto cohort = ns::generate_cohort(config);
    const auto active = ns::active_learners(ns::build_traces(cohort.visits));
    const auto table = ns::cohort_styles(active, course);
    const std::size_t n = table.cohort_size();

    bool rows = true;
    for (const auto& m : ns::all_transitions(table)) {
      for (std::size_t r = 0; r < 3; ++r) {
        if (m.empty_rows[r]) continue;
        const double sum = m.probabilities[r][0] + m.probabilities[r][1] + m.probabilities[r][2];
        worst_row = std::max(worst_row, std::abs(sum - 1.0));
        rows = rows && std::abs(sum - 1.0) <= 1e-12;
      }
    }
    rows_ok += rows;

    bool partition = n == config.cohort_size;
    for (const auto& c : table.weekly_counts) partition = partition && c[0] + c[1] + c[2] == n;
    partitions_ok += partition;

    census_ok += ns::path_census(table).total() == n;

    const auto dist = ns::dropout_distribution(active, course, table.labels_for_week(1));
    bool dropout = dist.skipped == 0;
    for (ns::NavStyle style : ns::kAllStyles) {
      if (dist.group_sizes[ns::style_slot(style)] == 0) continue;
      double sum = 0.0;
      for (int g = 1; g <= dist.total_steps; ++g) sum += *dist.proportion(style, g);
      worst_dropout = std::max(worst_dropout, std::abs(sum - 1.0));
      dropout = dropout && std::abs(sum - 1.0) <= 1e-12;
    }
    dropout_ok += dropout;
  }
  const auto tally = [&](std::size_t ok) {
    return std::to_string(ok) + "/" + std::to_string(cohorts);
  };
  out.require(rows_ok == cohorts, "row sums " + tally(rows_ok) + " (max err " +
                                      ns::format_decimal(worst_row) + ")");
  out.require(partitions_ok == cohorts, "weekly partitions " + tally(partitions_ok));
  out.require(census_ok == cohorts, "census totals " + tally(census_ok));
  out.require(dropout_ok == cohorts, "dropout sums " + tally(dropout_ok) + " (max err " +
                                         ns::format_decimal(worst_dropout) + ")");

  // Sequential learners who only ever leave at week boundaries.
  auto boundary = ns::default_sim_config(course);
  boundary.cohort_size = 2000;
  boundary.initial_mix = {1.0, 0.0, 0.0};
  boundary.transitions = {{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
  boundary.archetypes[0].boundary_stop_probability = 0.3;
  const auto b_cohort = ns::generate_cohort(boundary);
  const auto b_active = ns::active_learners(ns::build_traces(b_cohort.visits));
  const auto b_table = ns::cohort_styles(b_active, course);
  const auto b_dist = ns::dropout_distribution(b_active, course, b_table.labels_for_week(1));
  const double b_index = ns::periodicity_index(b_dist, course, ns::NavStyle::Sequential);
  out.require(b_index == 1.0, "boundary-only periodicity " + ns::format_decimal(b_index));

  // One learner stopping at each of the 82 steps.
  ns::TraceMap uniform;
  ns::StyleLabels labels;
  for (int g = 1; g <= course.total_steps(); ++g) {
    std::vector<ns::StepRef> steps;
    for (int i = 1; i <= g; ++i) steps.push_back(course.step_at(i));
    const std::string id = "U" + std::to_string(g);
    uniform[id] = ns::testing::trace_of(id, steps);
    labels[id] = ns::NavStyle::Middle;
  }
  const auto u_dist = ns::dropout_distribution(uniform, course, labels);
  const double u_index = ns::periodicity_index(u_dist, course, ns::NavStyle::Middle);
  out.require(std::abs(u_index - 6.0 / 82.0) <= 1e-9,
              "uniform periodicity " + ns::format_decimal(u_index) + " vs 6/82");
  return out;
}

// 8. Byte-identical outputs across runs and thread counts.
Outcome determinism_checks() {
  Outcome out;
  const auto course = ns::testing::six_week_course();
  ns::NamedInput course_input{"six_week_course.json", ns::course_to_json(course)};

  auto config = ns::default_sim_config(course);
  config.inactive_learners = 50;
  config.unenrolled_learners = 20;
  const auto sim_a = ns::simulate_bundle(config, course_input, {}, 1);
  const auto sim_b = ns::simulate_bundle(config, course_input, {}, 1);
  const auto sim_c = ns::simulate_bundle(config, course_input, {}, 4);
  bool sim_same = true;
  for (const auto& [name, content] : sim_a) {
    if (name == "manifest.json") continue;
    sim_same = sim_same && content == sim_b.at(name) && content == sim_c.at(name);
  }
  out.require(sim_same, "simulation bundle identical across 2 runs and threads 1/4");

  auto small = config;
  small.cohort_size = 1200;
  const auto files = ns::to_bundle(ns::generate_cohort(small));
  ns::DatasetInputs inputs;
  inputs.course = course_input;
  inputs.activity = ns::NamedInput{"activity.csv", files.activity_csv};
  inputs.comments = ns::NamedInput{"comments.csv", files.comments_csv};
  inputs.attempts = ns::NamedInput{"attempts.csv", files.attempts_csv};

  std::vector<std::string> reports;
  for (unsigned threads : {1u, 1u, 4u}) {
    ns::RunOptions options;
    options.threads = threads;
    const auto data = ns::load_dataset(inputs, options, "report");
    reports.push_back(ns::report_bundle(data, options).at("report.json"));
  }
  out.require(reports[0] == reports[1] && reports[0] == reports[2],
              "report.json identical across 2 runs and threads 1/4 (" +
                  std::to_string(reports[0].size()) + " bytes)");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"classifier oracle equivalence", classifier_oracle},
      {"simulator round-trip", simulator_round_trip},
      {"Mann-Whitney correctness", mann_whitney_checks},
      {"Kruskal-Wallis correctness", kruskal_wallis_checks},
      {"KS/Lilliefors sanity", lilliefors_checks},
      {"percentage arithmetic and course size", arithmetic_checks},
      {"structural invariants", structural_invariants},
      {"determinism", determinism_checks},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(number)) continue;
    const auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    all = all && outcome.pass;
    std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", outcome.pass ? "PASS" : "FAIL", number,
                criteria[i].first, seconds_since(start), outcome.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
