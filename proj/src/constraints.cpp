#include "eklab/constraints.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"
#include <ostream>

#include "eklab/csv.hpp"
#include "eklab/error.hpp"

namespace eklab {
namespace {

constexpr double kZeroTrend = 1e-15;

// floor(alpha) clamped into [0, n].
std::uint64_t floor_clamped(double alpha, std::uint64_t n) {
  if (alpha >= static_cast<double>(n)) return n;
  return static_cast<std::uint64_t>(std::floor(alpha));
}

void require_n(const TruncatedPmf& pmf, const char* who) {
  if (pmf.n() < 3) {
    throw DomainError(std::string(who) + ": n must be >= 3 (got " + std::to_string(pmf.n()) + ")");
  }
}

struct DivisorSearch {
  const TruncatedPmf& pmf;
  std::span<const std::uint64_t> primes;
  unsigned max_k;
  std::size_t cap;
  double D;
  C5Report& report;

  void run(std::size_t start, std::uint64_t product, unsigned k) {
    const std::uint64_t n = pmf.n();
    for (std::size_t i = start; i < primes.size(); ++i) {
      const std::uint64_t p = primes[i];
      if (product > n / p) break;
      if (k + 1 > max_k) {
        report.depth_truncated = true;
        return;
      }
      if (report.entries.size() >= cap) {
        report.cap_truncated = true;
        return;
      }
      const std::uint64_t d = product * p;
      C5Entry e;
      e.d = d;
      e.k = k + 1;
      e.eps_sum = pmf.epsilon_multiple_sum(d);
      e.bound = D / static_cast<double>(n);
      e.pass = e.eps_sum <= e.bound + kPassSlack;
      report.entries.push_back(e);
      run(i + 1, d, k + 1);
      if (report.cap_truncated) return;
    }
  }
};

}  // namespace

std::size_t C4Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const C4Entry& e) { return !e.pass; }));
}

std::size_t C5Report::failures() const {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(), [](const C5Entry& e) { return !e.pass; }));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kConvergingToZero:
      return "converging-to-zero";
    case Verdict::kNonvanishing:
      return "nonvanishing";
    case Verdict::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

C4Report check_c4(const TruncatedPmf& pmf, double C, const C4Options& options) {
  require_n(pmf, "check_c4");
  if (!(C >= 0.0)) throw DomainError("check_c4: C must be >= 0");
  const std::uint64_t n = pmf.n();
  C4Report report;
  report.n = n;
  report.alpha = alpha_n(n);
  report.C = C;
  report.all_primes = options.all_primes;

  PrimeTable owned;
  const PrimeTable* primes = options.primes;
  if (primes == nullptr || primes->limit() < n) {
    owned = sieve_primes(n);
    primes = &owned;
  }
  const std::uint64_t lower = options.all_primes ? 1 : floor_clamped(report.alpha, n);
  const auto range = primes->in_range(lower, n);
  report.entries.reserve(range.size());
  double sup = 0.0;
  for (const std::uint64_t p : range) {
    C4Entry e;
    e.p = p;
    e.eps_sum = pmf.epsilon_multiple_sum(p);
    e.bound = C / static_cast<double>(p);
    e.pass = e.eps_sum <= e.bound + kPassSlack;
    sup = std::max(sup, static_cast<double>(p) * e.eps_sum);
    report.entries.push_back(e);
  }
  report.minimal_C = sup;
  return report;
}

C5Report check_c5(const TruncatedPmf& pmf, double D, unsigned max_k, const C5Options& options) {
  require_n(pmf, "check_c5");
  if (!(D >= 0.0)) throw DomainError("check_c5: D must be >= 0");
  if (max_k == 0) throw DomainError("check_c5: max_k must be >= 1");
  const std::uint64_t n = pmf.n();
  C5Report report;
  report.n = n;
  report.alpha = alpha_n(n);
  report.D = D;
  report.max_k = max_k;

  const PrimeTable primes = sieve_primes(std::max<std::uint64_t>(floor_clamped(report.alpha, n), 1));
  DivisorSearch search{pmf, primes.primes(), max_k, options.entry_cap, D, report};
  search.run(0, 1, 0);

  std::sort(report.entries.begin(), report.entries.end(),
            [](const C5Entry& a, const C5Entry& b) { return a.d < b.d; });
  double sup = 0.0;
  for (const auto& e : report.entries) sup = std::max(sup, static_cast<double>(n) * e.eps_sum);
  report.minimal_D = sup;
  return report;
}

Verdict classify_trend(std::span<const double> values, double tolerance) {
  if (values.size() < 3) return Verdict::kInconclusive;
  const auto tail = values.subspan(values.size() - 3);
  const double a0 = std::abs(tail[0]);
  const double a1 = std::abs(tail[1]);
  const double a2 = std::abs(tail[2]);
  if (a0 <= kZeroTrend && a1 <= kZeroTrend && a2 <= kZeroTrend) {
    return Verdict::kConvergingToZero;
  }
  if (a0 > a1 && a1 > a2 && a2 <= tolerance) return Verdict::kConvergingToZero;
  const double mean = (tail[0] + tail[1] + tail[2]) / 3.0;
  if (std::abs(mean) > kZeroTrend) {
    const bool close = std::all_of(tail.begin(), tail.end(), [&](double v) {
      return std::abs(v - mean) <= 0.1 * std::abs(mean);
    });
    if (close) return Verdict::kNonvanishing;
  }
  return Verdict::kInconclusive;
}

C6Trend check_c6(const FamilySpec& spec, std::uint64_t p, std::span<const std::uint64_t> schedule,
                 double tolerance) {
  if (schedule.size() < 3) throw DomainError("check_c6: schedule needs at least 3 points");
  if (!is_prime(p)) throw DomainError("check_c6: " + std::to_string(p) + " is not prime");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < p) throw DomainError("check_c6: every n must be >= p");
    if (i > 0 && schedule[i] <= schedule[i - 1]) {
      throw DomainError("check_c6: schedule must be strictly increasing");
    }
  }
  C6Trend trend;
  trend.p = p;
  trend.tolerance = tolerance;
  trend.schedule.assign(schedule.begin(), schedule.end());
  for (const std::uint64_t n : schedule) {
    trend.values.push_back(make_pmf(spec, n).epsilon_multiple_sum(p));
  }
  trend.tail_magnitude = std::abs(trend.values.back());
  trend.verdict = classify_trend(trend.values, tolerance);
  return trend;
}

UniformScanSummary uniform_scan(const std::function<FamilySpec(std::uint64_t)>& family,
                                std::span<const std::uint64_t> j_schedule,
                                std::span<const std::uint64_t> n_schedule,
                                const UniformScanOptions& options) {
  if (j_schedule.empty() || n_schedule.empty()) {
    throw DomainError("uniform_scan: schedules must be nonempty");
  }
  UniformScanSummary summary;
  summary.candidate_C = options.candidate_C;
  summary.candidate_D = options.candidate_D;
  summary.p = options.p;

  const std::uint64_t n_max = *std::max_element(n_schedule.begin(), n_schedule.end());
  const PrimeTable primes = sieve_primes(n_max);
  C4Options c4_options;
  c4_options.primes = &primes;

  // pass flags indexed [j][n]
  std::vector<std::vector<bool>> passes;
  summary.dominated = true;
  for (const std::uint64_t j : j_schedule) {
    const FamilySpec spec = family(j);
    DoubleLimitRow row;
    row.j = j;
    std::vector<bool> row_pass;
    for (const std::uint64_t n : n_schedule) {
      if (summary.points.size() >= options.grid_cap) {
        summary.partial = true;
        break;
      }
      const TruncatedPmf pmf = make_pmf(spec, n);
      const C4Report c4 = check_c4(pmf, options.candidate_C, c4_options);
      const C5Report c5 = check_c5(pmf, options.candidate_D, options.max_k);
      summary.points.push_back({j, n, c4.minimal_C, c5.minimal_D, c5.truncated()});
      summary.sup_C = std::max(summary.sup_C, c4.minimal_C);
      summary.sup_D = std::max(summary.sup_D, c5.minimal_D);
      const bool ok = c4.all_pass() && c5.all_pass();
      summary.dominated = summary.dominated && ok;
      row_pass.push_back(ok);
      row.eps_sums.push_back(pmf.epsilon_multiple_sum(options.p));
    }
    if (!row.eps_sums.empty()) row.limit_estimate = row.eps_sums.back();
    passes.push_back(std::move(row_pass));
    summary.double_limit.push_back(std::move(row));
    if (summary.partial) break;
  }

  for (std::size_t ni = 0; ni < n_schedule.size(); ++ni) {
    std::optional<std::size_t> threshold;
    for (std::size_t ji = passes.size(); ji-- > 0;) {
      if (ni >= passes[ji].size() || !passes[ji][ni]) break;
      threshold = ji;
    }
    summary.j_threshold.push_back(threshold);
  }

  summary.limit_decreasing_in_j = summary.double_limit.size() >= 2;
  for (std::size_t i = 1; i < summary.double_limit.size(); ++i) {
    if (!(std::abs(summary.double_limit[i].limit_estimate) <
          std::abs(summary.double_limit[i - 1].limit_estimate))) {
      summary.limit_decreasing_in_j = false;
    }
  }
  return summary;
}

void write_csv_header(std::ostream& out) { out << "n,d_or_p,k,eps_sum,bound,pass\n"; }

void write_csv(std::ostream& out, const C4Report& report) {
  for (const auto& e : report.entries) {
    out << report.n << ',' << e.p << ",1," << format_double(e.eps_sum) << ','
        << format_double(e.bound) << ',' << format_bool(e.pass) << '\n';
  }
}

void write_csv(std::ostream& out, const C5Report& report) {
  for (const auto& e : report.entries) {
    out << report.n << ',' << e.d << ',' << e.k << ',' << format_double(e.eps_sum) << ','
        << format_double(e.bound) << ',' << format_bool(e.pass) << '\n';
  }
}

void write_csv(std::ostream& out, const C6Trend& trend) {
  out << "p,n,eps_sum\n";
  for (std::size_t i = 0; i < trend.values.size(); ++i) {
    out << trend.p << ',' << trend.schedule[i] << ',' << format_double(trend.values[i]) << '\n';
  }
}

std::string summary_json(const C4Report& c4, const C5Report* c5) {
  nlohmann::ordered_json j;
  j["schema"] = "ek-lab/1";
  j["kind"] = "constraints";
  j["n"] = c4.n;
  j["alpha"] = c4.alpha;
  j["large_primes"] = {{"C", c4.C},
                       {"minimal_C", c4.minimal_C},
                       {"entries", c4.entries.size()},
                       {"failures", c4.failures()},
                       {"all_primes", c4.all_primes}};
  if (c5 != nullptr) {
    j["small_products"] = {{"D", c5->D},
                           {"minimal_D", c5->minimal_D},
                           {"max_k", c5->max_k},
                           {"entries", c5->entries.size()},
                           {"failures", c5->failures()},
                           {"depth_truncated", c5->depth_truncated},
                           {"cap_truncated", c5->cap_truncated}};
  }
  j["pass_slack"] = kPassSlack;
  return j.dump(2);
}

std::string summary_json(const C6Trend& trend) {
  nlohmann::ordered_json j;
  j["schema"] = "ek-lab/1";
  j["kind"] = "vanishing-trend";
  j["p"] = trend.p;
  j["schedule"] = trend.schedule;
  j["values"] = trend.values;
  j["tail_magnitude"] = trend.tail_magnitude;
  j["tolerance"] = trend.tolerance;
  j["verdict"] = to_string(trend.verdict);
  j["verdict_rule"] =
      "last three points: converging-to-zero if |values| strictly decreasing (or all zero) and "
      "last |value| <= tolerance; nonvanishing if all within 10% of their nonzero mean; else "
      "inconclusive";
  return j.dump(2);
}

}  // namespace eklab
