#pragma once

// Sequence-indexed studies: prime zeta means along Zeta(1 + 1/a) schedules,
// dependence of divisibility events under the logarithmic law, the
// log-zeta passage to the limit, and the zeroed-at-a-prime negative control.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eklab/constraints.hpp"
#include "eklab/prime_core.hpp"

namespace eklab {

/// Sum of p^-s over primes p <= cutoff.
double prime_zeta_partial(double s, std::uint64_t cutoff);

/// Upper bound N^(1-s) / ((s-1) ln N) on the prime zeta tail beyond N.
double prime_zeta_tail_bound(double s, std::uint64_t cutoff);

/// Smallest power-of-two cutoff whose tail bound is below abs_tol, or nullopt
/// when that cutoff exceeds kPrimeZetaDirectLimit.
std::optional<std::uint64_t> prime_zeta_direct_cutoff(double s, double abs_tol);
inline constexpr std::uint64_t kPrimeZetaDirectLimit = std::uint64_t{1} << 25;

/// sum_k mu(k)/k ln zeta(ks), used when direct summation would need too
/// many primes.
double prime_zeta_mobius(double s);

/// P(s) with absolute error below abs_tol. s > 1, abs_tol >= 1e-12.
double prime_zeta(double s, double abs_tol = 1e-10);

struct SequencePoint {
  std::size_t j = 0;
  double a = 0.0;
  double s = 0.0;
  double mu = 0.0;
  std::uint64_t n_j = 0;
  bool capped = false;
  // NaN when n_j < 3, where neither the checks nor log log n make sense.
  double minimal_C = 0.0;
  double minimal_D = 0.0;
  bool c5_truncated = false;
  double eps_sum_p = 0.0;
  double ks = 0.0;
  double mean_ratio = 0.0;
};

struct SequenceOptions {
  std::uint64_t n_cap = 10'000'000;
  std::uint64_t p = 2;
  unsigned max_k = 4;
  OmegaBuildOptions omega{};
};

struct SequenceStudy {
  std::uint64_t p = 2;
  std::uint64_t n_cap = 0;
  std::vector<SequencePoint> points;
};

/// For each a: s = 1 + 1/a, mu = P(s), n_j = min(max(floor(e^(e^mu)), 2), n_cap),
/// then constraint checks, KS and mean ratio for the Zipf(s) truncation at n_j.
SequenceStudy zeta_sequence_study(std::span<const double> a_schedule,
                                  const SequenceOptions& options = {});

struct DependenceGap {
  double s = 0.0;
  std::uint64_t p = 0;
  std::uint64_t q = 0;
  double marginal_p = 0.0;
  double marginal_q = 0.0;
  double joint = 0.0;
  double gap = 0.0;  // joint - marginal_p * marginal_q
};

/// P(d | X) = (1/d) ln(1 - s^d) / ln(1 - s) for X logarithmic(s) on the
/// positive integers.
double log_divisibility(double s, std::uint64_t d);

DependenceGap log_dependence(double s, std::uint64_t p, std::uint64_t q);

struct LzPoint {
  double s = 0.0;
  double alpha = 0.0;
  std::uint64_t n = 0;
  std::uint64_t p = 0;
  double eps_sum = 0.0;
  double power_bound = 0.0;  // 1/p^alpha
  double prime_bound = 0.0;  // 1/p
  bool chain_holds = false;  // eps_sum <= 1/p^alpha <= 1/p
  double minimal_C = 0.0;
  double minimal_D = 0.0;
  double ks = 0.0;
  double truncated_mean = 0.0;  // E_n omega, standing in for the untruncated mean
  double mean_ratio = 0.0;
};

std::vector<LzPoint> lz_limit_study(std::span<const std::pair<double, double>> path,
                                    std::uint64_t n, std::uint64_t p, unsigned max_k = 4,
                                    const OmegaBuildOptions& omega = {});

/// Vanishing-trend check of the law uniform on integers not divisible by p.
C6Trend nonexample_control(std::span<const std::uint64_t> n_schedule, std::uint64_t p);

// CSV columns: j,s,alpha,mu,n_j,capped,minimal_C,minimal_D,eps_sum_p,ks,mean_ratio
void write_csv(std::ostream& out, const SequenceStudy& study);
// Same columns; j is the path index and mu the truncated mean.
void write_csv(std::ostream& out, std::span<const LzPoint> points);
void write_csv(std::ostream& out, std::span<const DependenceGap> gaps);

std::string summary_json(const SequenceStudy& study);

}  // namespace eklab
