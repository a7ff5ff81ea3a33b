#pragma once

// Moments of the independent Bernoulli model against weighted moments of the
// truncated prime-factor count, and the standardized CDF of omega.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "eklab/family_spec.hpp"
#include "eklab/prime_core.hpp"
#include "eklab/truncated_pmf.hpp"

namespace eklab {

inline constexpr unsigned kMaxMomentOrder = 16;

/// Standard normal CDF.
double normal_cdf(double x);

/// E(S^r) for r = 0..r_max, S the sum of independent indicators with
/// P(X_p = 1) = 1/p over the given primes. Element 0 is 1.
std::vector<double> bernoulli_model_moments(std::span<const std::uint64_t> primes, unsigned r_max);

/// sum_m pmf(m) g(m)^r for r = 0..r_max. g.limit() must equal pmf.n().
std::vector<double> weighted_g_moments(const TruncatedPmf& pmf, const OmegaTable& g, unsigned r_max);

struct MomentTable {
  std::uint64_t n = 0;
  std::uint64_t cutoff = 0;
  double alpha = 0.0;
  double b = 0.0;
  double a2 = 0.0;
  bool b_within_alpha = true;  // b <= alpha_n, checked rather than assumed
  // Indexed by order r; element 0 is the trivial moment.
  std::vector<double> model_moments;
  std::vector<double> weighted_moments;
  std::vector<double> gaps;
};

std::vector<MomentTable> moment_gap_study(const FamilySpec& spec,
                                          std::span<const std::uint64_t> n_schedule,
                                          unsigned r_max, const OmegaBuildOptions& options = {});

enum class Centering {
  kLogLog,  // center log log n, scale sqrt(log log n)
  kModel,   // center b, scale a for the primes up to floor(alpha_n)
};

std::string to_string(Centering c);

struct JumpPoint {
  unsigned omega = 0;
  double x = 0.0;  // standardized position
  double mass = 0.0;
  double cdf_before = 0.0;  // F(x-)
  double cdf = 0.0;         // F(x)
};

struct StandardizedStudy {
  std::uint64_t n = 0;
  Centering centering = Centering::kLogLog;
  double center = 0.0;
  double scale = 1.0;
  std::vector<JumpPoint> jumps;  // ascending x, positive mass only
  double total_mass = 0.0;
  double ks = 0.0;
};

StandardizedStudy standardized_cdf(const TruncatedPmf& pmf, const OmegaTable& omega,
                                   Centering centering = Centering::kLogLog);

/// Empirical CDF of the study at x.
double empirical_cdf(const StandardizedStudy& study, double x);

/// sup |F - G| between two step CDFs, exact over the union of their jumps.
double ks_between(const StandardizedStudy& a, const StandardizedStudy& b);

/// E_n(omega) / log log n.
double mean_ratio(const TruncatedPmf& pmf, const OmegaTable& omega);

// CSV columns: x,empirical_cdf,normal_cdf,diff (one row per jump point)
void write_csv(std::ostream& out, const StandardizedStudy& study);
// CSV columns: n,cutoff,r,model,weighted,gap
void write_csv(std::ostream& out, std::span<const MomentTable> tables);

/// Plain-text gnuplot script overlaying the empirical CDF from csv_path on
/// the normal curve.
void write_gnuplot_script(std::ostream& out, const std::string& csv_path, const std::string& title);

}  // namespace eklab
