#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "navstyle/classify.hpp"

namespace navstyle {

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  std::optional<double> sd;  // sample (n-1) sd; absent for n == 1
  double median = 0.0;
};

/// Throws EmptySample when `values` is empty.
Summary describe(std::span<const double> values);

/// Average ranks (1-based) of the values in their original order; tied
/// values share the mean of the ranks they span.
std::vector<double> mid_ranks(std::span<const double> values);

/// Sum over tie groups of t^3 - t.
double tie_term(std::span<const double> values);

double normal_cdf(double z);
/// Two-sided p for a standard normal statistic.
double normal_two_sided_p(double z);
/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, int df);

struct TestResult {
  std::string test_name;
  double statistic = 0.0;             // D, H or U
  std::optional<double> z;            // Mann-Whitney
  std::optional<int> df;              // Kruskal-Wallis
  std::vector<std::size_t> sizes;     // n, (n1, n2) or per-group sizes
  double p_value = 1.0;
  bool tie_correction_applied = false;
  bool continuity_correction = false;
  std::optional<std::size_t> replicates;  // Monte-Carlo p
  std::optional<std::uint64_t> seed;
};

struct MonteCarloOptions {
  std::uint64_t seed = 20200301;
  std::size_t replicates = 10000;
  unsigned threads = 1;
};

/// Kolmogorov-Smirnov distance between the sample standardized by its own
/// mean and sample sd and the standard normal CDF, taking both one-sided
/// limits of the empirical CDF at each point.
double lilliefors_statistic(std::span<const double> values);

/// Lilliefors normality test. p = (1 + #{replicate D >= observed D}) / (R + 1)
/// over R standard-normal samples of the same size; replicate r draws from
/// its own generator seeded from (seed + r), so p is independent of the
/// thread count. Throws TooSmall (n < 4) or DegenerateSample (sd == 0).
TestResult ks_normality(std::span<const double> values, const MonteCarloOptions& options = {});

/// Kruskal-Wallis H with tie correction, p from chi-square with k-1 df.
/// All-tied input yields H = 0, p = 1.
TestResult kruskal_wallis(std::span<const std::vector<double>> groups);

/// Mann-Whitney U of the first sample with a tie-corrected normal
/// approximation and two-sided p. All-tied input yields Z = 0, p = 1.
TestResult mann_whitney(std::span<const double> a, std::span<const double> b,
                        bool continuity_correction = false);

/// Exact two-sided p by enumerating every assignment of ranks to the first
/// sample. Requires n1 + n2 <= 12 (TooLarge) and no ties (TiesPresent).
TestResult mann_whitney_exact(std::span<const double> a, std::span<const double> b);

struct PairwiseResult {
  NavStyle first;
  NavStyle second;
  TestResult test;
};

struct ComparisonReport {
  std::string metric;
  std::array<std::optional<Summary>, 3> groups;  // S, G, M; absent when empty
  std::optional<TestResult> normality;
  std::optional<TestResult> omnibus;
  std::vector<PairwiseResult> pairwise;
  std::vector<std::string> warnings;
};

struct CompareOptions {
  MonteCarloOptions monte_carlo;
  bool continuity_correction = false;
};

/// Summaries per style group, Lilliefors screen on the pooled values,
/// Kruskal-Wallis across the non-empty groups and Mann-Whitney for every
/// pair of them, in S, G, M order. Learners missing from either map are
/// left out. Throws TooFewGroups with fewer than two non-empty groups.
ComparisonReport compare_groups(const std::map<std::string, double>& metric,
                                const StyleLabels& labels, const std::string& metric_name,
                                const CompareOptions& options = {});

nlohmann::json to_json(const Summary& summary);
nlohmann::json to_json(const TestResult& result);
nlohmann::json to_json(const ComparisonReport& report);

}  // namespace navstyle
