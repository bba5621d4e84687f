#include "navstyle/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <random>
#include <tuple>

#include <boost/math/special_functions/gamma.hpp>

#include "navstyle/errors.hpp"
#include "navstyle/parallel.hpp"

namespace navstyle {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double sample_mean(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// D for values already sorted ascending, standardized with (mean, sd).
double sorted_ks_distance(std::span<const double> sorted, double mean, double sd) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf((sorted[i] - mean) / sd);
    d = std::max(d, static_cast<double>(i + 1) / n - cdf);
    d = std::max(d, cdf - static_cast<double>(i) / n);
  }
  return d;
}

std::vector<double> concat(std::span<const double> a, std::span<const double> b) {
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  return pooled;
}

}  // namespace

Summary describe(std::span<const double> values) {
  if (values.empty()) throw EmptySample("cannot describe an empty sample");
  Summary s;
  s.n = values.size();
  s.mean = sample_mean(values);
  if (s.n > 1) s.sd = sample_sd(values, s.mean);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = s.n / 2;
  s.median = (s.n % 2 == 1) ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
  return s;
}

std::vector<double> mid_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) hold ranks i+1..j+1
    const double rank = static_cast<double>(i + j + 2) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double tie_term(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double total = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i + 1);
    total += t * t * t - t;
    i = j + 1;
  }
  return total;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double normal_two_sided_p(double z) { return std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0))); }

double chi_square_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(df) / 2.0, x / 2.0);
}

double lilliefors_statistic(std::span<const double> values) {
  if (values.size() < 2) throw TooSmall("Lilliefors statistic needs at least 2 values");
  const double mean = sample_mean(values);
  const double sd = sample_sd(values, mean);
  if (!(sd > 0.0)) throw DegenerateSample("sample has zero standard deviation");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return sorted_ks_distance(sorted, mean, sd);
}

namespace {

// Null statistics depend only on (n, seed, replicates), and a report screens
// several metrics over the same pooled cohort, so recent tables are kept.
std::shared_ptr<const std::vector<double>> null_statistics(std::size_t n,
                                                           const MonteCarloOptions& options) {
  using Key = std::tuple<std::size_t, std::uint64_t, std::size_t>;
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const std::vector<double>>> cache;
  const Key key{n, options.seed, options.replicates};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  auto table = std::make_shared<std::vector<double>>(options.replicates);
  parallel_chunks(options.replicates, options.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> sample(n);
    for (std::size_t r = begin; r < end; ++r) {
      std::mt19937_64 rng(splitmix64(options.seed + r));
      std::normal_distribution<double> normal(0.0, 1.0);
      for (auto& x : sample) x = normal(rng);
      std::sort(sample.begin(), sample.end());
      const double mean = sample_mean(sample);
      (*table)[r] = sorted_ks_distance(sample, mean, sample_sd(sample, mean));
    }
  });

  std::lock_guard lock(mutex);
  if (cache.size() >= 8) cache.clear();
  cache.emplace(key, table);
  return table;
}

}  // namespace

TestResult ks_normality(std::span<const double> values, const MonteCarloOptions& options) {
  if (values.size() < 4) {
    throw TooSmall("normality test needs n >= 4, got " + std::to_string(values.size()));
  }
  if (options.replicates == 0) throw TooSmall("normality test needs at least one replicate");
  const double observed = lilliefors_statistic(values);
  const std::size_t n = values.size();
  const auto null = null_statistics(n, options);
  const auto hits = static_cast<std::size_t>(
      std::count_if(null->begin(), null->end(), [&](double d) { return d >= observed; }));

  TestResult result;
  result.test_name = "lilliefors_ks";
  result.statistic = observed;
  result.sizes = {n};
  result.p_value = static_cast<double>(hits + 1) / static_cast<double>(options.replicates + 1);
  result.replicates = options.replicates;
  result.seed = options.seed;
  return result;
}

TestResult kruskal_wallis(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw TooFewGroups("Kruskal-Wallis needs at least 2 groups");
  std::vector<double> pooled;
  TestResult result;
  result.test_name = "kruskal_wallis";
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw EmptyGroup("group " + std::to_string(g + 1) + " is empty");
    pooled.insert(pooled.end(), groups[g].begin(), groups[g].end());
    result.sizes.push_back(groups[g].size());
  }
  const double n_total = static_cast<double>(pooled.size());
  if (pooled.size() < 3) throw TooSmall("Kruskal-Wallis needs at least 3 observations");
  result.df = static_cast<int>(groups.size()) - 1;

  const auto ranks = mid_ranks(pooled);
  double weighted = 0.0;
  std::size_t offset = 0;
  for (const auto& group : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < group.size(); ++i) rank_sum += ranks[offset + i];
    weighted += rank_sum * rank_sum / static_cast<double>(group.size());
    offset += group.size();
  }

  const double ties = tie_term(pooled);
  const double denom = n_total * n_total * n_total - n_total;
  const double correction = 1.0 - ties / denom;
  if (correction <= 0.0) {
    result.statistic = 0.0;
    result.p_value = 1.0;
    result.tie_correction_applied = true;
    return result;
  }
  double h = 12.0 / (n_total * (n_total + 1.0)) * weighted - 3.0 * (n_total + 1.0);
  if (ties > 0.0) {
    h /= correction;
    result.tie_correction_applied = true;
  }
  result.statistic = std::max(0.0, h);
  result.p_value = chi_square_sf(result.statistic, *result.df);
  return result;
}

TestResult mann_whitney(std::span<const double> a, std::span<const double> b,
                        bool continuity_correction) {
  if (a.empty() || b.empty()) throw EmptySample("Mann-Whitney needs two non-empty samples");
  const auto pooled = concat(a, b);
  const auto ranks = mid_ranks(pooled);
  const double n1 = static_cast<double>(a.size());
  const double n2 = static_cast<double>(b.size());
  const double n = n1 + n2;

  const double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  const double u = rank_sum_a - n1 * (n1 + 1.0) / 2.0;

  TestResult result;
  result.test_name = "mann_whitney_u";
  result.statistic = u;
  result.sizes = {a.size(), b.size()};
  result.continuity_correction = continuity_correction;

  const double ties = tie_term(pooled);
  result.tie_correction_applied = ties > 0.0;
  const double variance = (n1 * n2 / 12.0) * ((n * n * n - n) - ties) / (n * (n - 1.0));
  if (!(variance > 0.0)) {
    result.z = 0.0;
    result.p_value = 1.0;
    return result;
  }
  double deviation = u - n1 * n2 / 2.0;
  if (continuity_correction) {
    const double magnitude = std::max(0.0, std::abs(deviation) - 0.5);
    deviation = std::copysign(magnitude, deviation);
  }
  result.z = deviation / std::sqrt(variance);
  result.p_value = normal_two_sided_p(*result.z);
  return result;
}

TestResult mann_whitney_exact(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw EmptySample("Mann-Whitney needs two non-empty samples");
  const std::size_t n = a.size() + b.size();
  if (n > 12) throw TooLarge("exact enumeration is limited to n1 + n2 <= 12");
  const auto pooled = concat(a, b);
  if (tie_term(pooled) > 0.0) throw TiesPresent("exact enumeration requires tie-free samples");

  const auto ranks = mid_ranks(pooled);
  const auto n1 = static_cast<int>(a.size());
  const double base = n1 * (n1 + 1) / 2.0;
  const double u_obs =
      std::accumulate(ranks.begin(), ranks.begin() + n1, 0.0) - base;

  // Every choice of n1 rank positions out of n is equally likely under H0.
  std::size_t total = 0, at_or_below = 0, at_or_above = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) != n1) continue;
    int rank_sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) rank_sum += static_cast<int>(i) + 1;
    }
    const double u = rank_sum - base;
    ++total;
    if (u <= u_obs) ++at_or_below;
    if (u >= u_obs) ++at_or_above;
  }

  TestResult result;
  result.test_name = "mann_whitney_u_exact";
  result.statistic = u_obs;
  result.sizes = {a.size(), b.size()};
  const double tail = static_cast<double>(std::min(at_or_below, at_or_above)) /
                      static_cast<double>(total);
  result.p_value = std::min(1.0, 2.0 * tail);
  return result;
}

ComparisonReport compare_groups(const std::map<std::string, double>& metric,
                                const StyleLabels& labels, const std::string& metric_name,
                                const CompareOptions& options) {
  ComparisonReport report;
  report.metric = metric_name;

  std::array<std::vector<double>, 3> by_style;
  std::vector<double> pooled;
  for (const auto& [learner, value] : metric) {
    auto label = labels.find(learner);
    if (label == labels.end()) continue;
    by_style[style_slot(label->second)].push_back(value);
    pooled.push_back(value);
  }

  std::vector<NavStyle> present;
  for (NavStyle style : kAllStyles) {
    const auto& values = by_style[style_slot(style)];
    if (values.empty()) {
      report.warnings.push_back(std::string(style_name(style)) + " group is empty");
      continue;
    }
    report.groups[style_slot(style)] = describe(values);
    present.push_back(style);
  }
  if (present.size() < 2) {
    throw TooFewGroups("comparison of " + metric_name + " needs at least 2 non-empty groups");
  }

  try {
    report.normality = ks_normality(pooled, options.monte_carlo);
  } catch (const Error& e) {
    report.warnings.push_back(std::string("normality screen skipped: ") + e.what());
  }

  std::vector<std::vector<double>> groups;
  for (NavStyle style : present) groups.push_back(by_style[style_slot(style)]);
  try {
    report.omnibus = kruskal_wallis(groups);
  } catch (const Error& e) {
    report.warnings.push_back(std::string("omnibus test skipped: ") + e.what());
  }

  for (std::size_t i = 0; i < present.size(); ++i) {
    for (std::size_t j = i + 1; j < present.size(); ++j) {
      report.pairwise.push_back({present[i], present[j],
                                 mann_whitney(by_style[style_slot(present[i])],
                                              by_style[style_slot(present[j])],
                                              options.continuity_correction)});
    }
  }
  return report;
}

nlohmann::json to_json(const Summary& summary) {
  nlohmann::json j;
  j["n"] = summary.n;
  j["mean"] = summary.mean;
  j["sd"] = summary.sd ? nlohmann::json(*summary.sd) : nlohmann::json(nullptr);
  j["median"] = summary.median;
  return j;
}

nlohmann::json to_json(const TestResult& result) {
  nlohmann::json j;
  j["test"] = result.test_name;
  j["statistic"] = result.statistic;
  if (result.z) j["z"] = *result.z;
  if (result.df) j["df"] = *result.df;
  j["sizes"] = result.sizes;
  j["p_value"] = result.p_value;
  j["tie_correction_applied"] = result.tie_correction_applied;
  if (result.test_name == "mann_whitney_u") {
    j["continuity_correction"] = result.continuity_correction;
    j["u_of"] = "first_sample";
  }
  if (result.replicates) j["replicates"] = *result.replicates;
  if (result.seed) j["seed"] = *result.seed;
  return j;
}

nlohmann::json to_json(const ComparisonReport& report) {
  nlohmann::json j;
  j["metric"] = report.metric;
  j["groups"] = nlohmann::json::object();
  for (NavStyle style : kAllStyles) {
    const auto& summary = report.groups[style_slot(style)];
    j["groups"][std::string(1, style_code(style))] =
        summary ? to_json(*summary) : nlohmann::json(nullptr);
  }
  j["normality"] = report.normality ? to_json(*report.normality) : nlohmann::json(nullptr);
  j["omnibus"] = report.omnibus ? to_json(*report.omnibus) : nlohmann::json(nullptr);
  j["pairwise"] = nlohmann::json::array();
  for (const auto& pair : report.pairwise) {
    auto entry = to_json(pair.test);
    entry["first"] = std::string(1, style_code(pair.first));
    entry["second"] = std::string(1, style_code(pair.second));
    j["pairwise"].push_back(std::move(entry));
  }
  j["warnings"] = report.warnings;
  return j;
}

}  // namespace navstyle
