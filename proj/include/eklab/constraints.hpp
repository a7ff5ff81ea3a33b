#pragma once

// Checks of the three perturbation constraints on a truncated PMF:
//
//   large primes   sum_{l <= n/p} eps(lp) <= C/p      for primes p in (alpha_n, n]
//   small products sum_{l <= n/d} eps(ld) <= D/n      for squarefree d of primes <= alpha_n
//   vanishing      sum_{l <= n/p} eps(lp) -> 0        as n grows, for each fixed p
//
// Every inequality is tested with kPassSlack absolute slack.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eklab/family_spec.hpp"
#include "eklab/prime_core.hpp"
#include "eklab/truncated_pmf.hpp"

namespace eklab {

inline constexpr double kPassSlack = 1e-12;

struct C4Entry {
  std::uint64_t p = 0;
  double eps_sum = 0.0;
  double bound = 0.0;  // C / p
  bool pass = true;
};

struct C4Report {
  std::uint64_t n = 0;
  double alpha = 0.0;
  double C = 0.0;
  bool all_primes = false;  // diagnostic scan of every p <= n
  std::vector<C4Entry> entries;  // ascending p
  double minimal_C = 0.0;       // max(0, sup p * eps_sum)

  std::size_t failures() const;
  bool all_pass() const { return failures() == 0; }
};

struct C5Entry {
  std::uint64_t d = 0;
  unsigned k = 0;  // number of prime factors of d
  double eps_sum = 0.0;
  double bound = 0.0;  // D / n
  bool pass = true;
};

struct C5Report {
  std::uint64_t n = 0;
  double alpha = 0.0;
  double D = 0.0;
  unsigned max_k = 0;
  std::vector<C5Entry> entries;  // ascending d
  double minimal_D = 0.0;        // max(0, sup n * eps_sum)
  bool depth_truncated = false;  // products with more than max_k factors exist
  bool cap_truncated = false;    // entry cap reached
  bool truncated() const { return depth_truncated || cap_truncated; }

  std::size_t failures() const;
  bool all_pass() const { return failures() == 0; }
};

enum class Verdict { kConvergingToZero, kNonvanishing, kInconclusive };
std::string to_string(Verdict v);

struct C6Trend {
  std::uint64_t p = 0;
  std::vector<std::uint64_t> schedule;
  std::vector<double> values;
  double tail_magnitude = 0.0;
  double tolerance = 1e-2;
  Verdict verdict = Verdict::kInconclusive;
};

struct C4Options {
  bool all_primes = false;
  // Reuse a prime table covering n when the caller already has one.
  const PrimeTable* primes = nullptr;
};

struct C5Options {
  std::size_t entry_cap = 1'000'000;
};

C4Report check_c4(const TruncatedPmf& pmf, double C, const C4Options& options = {});

/// Depth-first enumeration of squarefree d <= n built from distinct primes
/// <= alpha_n with at most max_k factors.
C5Report check_c5(const TruncatedPmf& pmf, double D, unsigned max_k,
                  const C5Options& options = {});

/// Verdict policy on the last three schedule points:
///  - converging-to-zero: |values| strictly decreasing (or identically zero)
///    and the last magnitude <= tolerance;
///  - nonvanishing: the three values lie within 10% of their nonzero mean;
///  - otherwise inconclusive.
C6Trend check_c6(const FamilySpec& spec, std::uint64_t p, std::span<const std::uint64_t> schedule,
                 double tolerance = 1e-2);
Verdict classify_trend(std::span<const double> values, double tolerance);

struct ScanPoint {
  std::uint64_t j = 0;
  std::uint64_t n = 0;
  double minimal_C = 0.0;
  double minimal_D = 0.0;
  bool c5_truncated = false;
};

/// Row of the iterated-limit table: eps sums at prime p for one j across the
/// n schedule; the value at the largest n stands in for the n-limit.
struct DoubleLimitRow {
  std::uint64_t j = 0;
  std::vector<double> eps_sums;
  double limit_estimate = 0.0;
};

struct UniformScanOptions {
  unsigned max_k = 4;
  std::uint64_t p = 2;
  double candidate_C = 1.0;
  double candidate_D = 1.0;
  std::size_t grid_cap = 10'000;
};

struct UniformScanSummary {
  std::vector<ScanPoint> points;  // j-major
  double sup_C = 0.0;
  double sup_D = 0.0;
  double candidate_C = 0.0;
  double candidate_D = 0.0;
  /// True when (candidate_C, candidate_D) bounds every grid point.
  bool dominated = false;
  /// Per n: index into the j schedule from which every later j satisfies the
  /// candidate pair (the empirical j-threshold); nullopt if none does.
  std::vector<std::optional<std::size_t>> j_threshold;
  std::uint64_t p = 2;
  std::vector<DoubleLimitRow> double_limit;
  /// |limit_estimate| strictly decreasing along the j schedule.
  bool limit_decreasing_in_j = false;
  bool partial = false;  // grid cap reached
};

UniformScanSummary uniform_scan(const std::function<FamilySpec(std::uint64_t)>& family,
                                std::span<const std::uint64_t> j_schedule,
                                std::span<const std::uint64_t> n_schedule,
                                const UniformScanOptions& options = {});

// CSV columns: n,d_or_p,k,eps_sum,bound,pass
void write_csv_header(std::ostream& out);
void write_csv(std::ostream& out, const C4Report& report);
void write_csv(std::ostream& out, const C5Report& report);
// CSV columns: p,n,eps_sum
void write_csv(std::ostream& out, const C6Trend& trend);

std::string summary_json(const C4Report& c4, const C5Report* c5);
std::string summary_json(const C6Trend& trend);

}  // namespace eklab
