#include "eklab/moments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "eklab/compensated_sum.hpp"
#include "eklab/csv.hpp"
#include "eklab/error.hpp"

namespace eklab {
namespace {

using Binomials = std::array<std::array<double, kMaxMomentOrder + 1>, kMaxMomentOrder + 1>;

const Binomials& binomials() {
  static const Binomials table = [] {
    Binomials t{};
    for (unsigned r = 0; r <= kMaxMomentOrder; ++r) {
      t[r][0] = 1.0;
      for (unsigned k = 1; k <= r; ++k) t[r][k] = t[r - 1][k - 1] + (k < r ? t[r - 1][k] : 0.0);
    }
    return t;
  }();
  return table;
}

void check_order(unsigned r_max, const char* who) {
  if (r_max == 0 || r_max > kMaxMomentOrder) {
    throw DomainError(std::string(who) + ": r_max must lie in [1, " +
                      std::to_string(kMaxMomentOrder) + "], got " + std::to_string(r_max));
  }
}

// Mass of pmf grouped by the table value, index = value.
std::vector<double> mass_by_value(const TruncatedPmf& pmf, const OmegaTable& table) {
  if (table.limit() != pmf.n()) {
    throw DomainError("table limit " + std::to_string(table.limit()) + " does not match n = " +
                      std::to_string(pmf.n()));
  }
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(table.max_count()) + 1);
  const std::uint64_t n = pmf.n();
  for (std::uint64_t m = 1; m <= n; ++m) acc[table[m]].add(pmf(m));
  std::vector<double> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.value());
  return out;
}

double loglog(std::uint64_t n) {
  if (n < 3) throw DomainError("log log n needs n >= 3, got " + std::to_string(n));
  return std::log(std::log(static_cast<double>(n)));
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<double> bernoulli_model_moments(std::span<const std::uint64_t> primes, unsigned r_max) {
  check_order(r_max, "bernoulli_model_moments");
  const auto& binom = binomials();
  std::vector<double> m(r_max + 1, 0.0);
  m[0] = 1.0;
  std::vector<double> next(r_max + 1);
  for (const std::uint64_t p : primes) {
    const double inv = 1.0 / static_cast<double>(p);
    next[0] = 1.0;
    for (unsigned r = 1; r <= r_max; ++r) {
      CompensatedSum mixed;
      for (unsigned k = 0; k < r; ++k) mixed.add(binom[r][k] * m[k]);
      next[r] = m[r] + inv * mixed.value();
    }
    m.swap(next);
  }
  return m;
}

std::vector<double> weighted_g_moments(const TruncatedPmf& pmf, const OmegaTable& g, unsigned r_max) {
  check_order(r_max, "weighted_g_moments");
  const std::vector<double> mass = mass_by_value(pmf, g);
  std::vector<double> out(r_max + 1);
  for (unsigned r = 0; r <= r_max; ++r) {
    CompensatedSum s;
    for (std::size_t v = 0; v < mass.size(); ++v) {
      s.add(mass[v] * std::pow(static_cast<double>(v), static_cast<double>(r)));
    }
    out[r] = s.value();
  }
  return out;
}

std::vector<MomentTable> moment_gap_study(const FamilySpec& spec,
                                          std::span<const std::uint64_t> n_schedule,
                                          unsigned r_max, const OmegaBuildOptions& options) {
  check_order(r_max, "moment_gap_study");
  for (std::size_t i = 1; i < n_schedule.size(); ++i) {
    if (n_schedule[i] <= n_schedule[i - 1]) {
      throw DomainError("moment_gap_study: schedule must be strictly increasing");
    }
  }
  std::vector<MomentTable> tables;
  for (const std::uint64_t n : n_schedule) {
    MomentTable t;
    t.n = n;
    t.alpha = alpha_n(n);
    t.cutoff = small_prime_cutoff(n);
    const PrimeTable primes = sieve_primes(t.cutoff, options.budget);
    const PrimeSums sums = prime_reciprocal_sums(primes, t.cutoff);
    t.b = sums.b;
    t.a2 = sums.a2;
    t.b_within_alpha = t.b <= t.alpha;
    t.model_moments = bernoulli_model_moments(primes.primes(), r_max);
    const OmegaTable g = build_omega_table(n, t.cutoff, options);
    t.weighted_moments = weighted_g_moments(make_pmf(spec, n), g, r_max);
    t.gaps.resize(r_max + 1);
    for (unsigned r = 0; r <= r_max; ++r) {
      t.gaps[r] = std::abs(t.model_moments[r] - t.weighted_moments[r]);
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string to_string(Centering c) { return c == Centering::kLogLog ? "loglog" : "model"; }

StandardizedStudy standardized_cdf(const TruncatedPmf& pmf, const OmegaTable& omega,
                                   Centering centering) {
  const std::uint64_t n = pmf.n();
  if (n < 3) throw DomainError("standardized_cdf: n must be >= 3");
  if (omega.cutoff().has_value()) {
    throw DomainError("standardized_cdf: needs the full omega table (no cutoff)");
  }
  StandardizedStudy study;
  study.n = n;
  study.centering = centering;
  if (centering == Centering::kLogLog) {
    study.center = loglog(n);
    study.scale = std::sqrt(study.center);
  } else {
    const PrimeSums sums = prime_reciprocal_sums(small_prime_cutoff(n));
    study.center = sums.b;
    study.scale = std::sqrt(sums.a2);
  }
  if (!(study.scale > 0.0)) throw DomainError("standardized_cdf: degenerate scale");

  const std::vector<double> mass = mass_by_value(pmf, omega);
  CompensatedSum running;
  double ks = 0.0;
  for (std::size_t w = 0; w < mass.size(); ++w) {
    if (!(mass[w] > 0.0)) continue;
    JumpPoint j;
    j.omega = static_cast<unsigned>(w);
    j.x = (static_cast<double>(w) - study.center) / study.scale;
    j.mass = mass[w];
    j.cdf_before = running.value();
    running.add(mass[w]);
    j.cdf = running.value();
    const double phi = normal_cdf(j.x);
    ks = std::max({ks, std::abs(j.cdf - phi), std::abs(j.cdf_before - phi)});
    study.jumps.push_back(j);
  }
  study.total_mass = running.value();
  study.ks = std::min(ks, 1.0);
  return study;
}

double empirical_cdf(const StandardizedStudy& study, double x) {
  const auto it = std::upper_bound(study.jumps.begin(), study.jumps.end(), x,
                                   [](double v, const JumpPoint& j) { return v < j.x; });
  if (it == study.jumps.begin()) return 0.0;
  return std::prev(it)->cdf;
}

double ks_between(const StandardizedStudy& a, const StandardizedStudy& b) {
  // Both are right-continuous steps, so the supremum is attained at a jump of
  // either; compare the values there and just before.
  double ks = 0.0;
  auto scan = [&](const StandardizedStudy& from, const StandardizedStudy& other) {
    for (const auto& j : from.jumps) {
      const double other_at = empirical_cdf(other, j.x);
      const double other_before = empirical_cdf(other, std::nextafter(j.x, -INFINITY));
      ks = std::max({ks, std::abs(j.cdf - other_at), std::abs(j.cdf_before - other_before)});
    }
  };
  scan(a, b);
  scan(b, a);
  return ks;
}

double mean_ratio(const TruncatedPmf& pmf, const OmegaTable& omega) {
  const double ll = loglog(pmf.n());
  if (omega.cutoff().has_value()) {
    throw DomainError("mean_ratio: needs the full omega table (no cutoff)");
  }
  const std::vector<double> mass = mass_by_value(pmf, omega);
  CompensatedSum mean;
  for (std::size_t w = 1; w < mass.size(); ++w) mean.add(mass[w] * static_cast<double>(w));
  return mean.value() / ll;
}

void write_csv(std::ostream& out, const StandardizedStudy& study) {
  out << "x,empirical_cdf,normal_cdf,diff\n";
  for (const auto& j : study.jumps) {
    const double phi = normal_cdf(j.x);
    out << format_double(j.x) << ',' << format_double(j.cdf) << ',' << format_double(phi) << ','
        << format_double(j.cdf - phi) << '\n';
  }
}

void write_csv(std::ostream& out, std::span<const MomentTable> tables) {
  out << "n,cutoff,r,model,weighted,gap\n";
  for (const auto& t : tables) {
    for (std::size_t r = 1; r < t.gaps.size(); ++r) {
      out << t.n << ',' << t.cutoff << ',' << r << ',' << format_double(t.model_moments[r]) << ','
          << format_double(t.weighted_moments[r]) << ',' << format_double(t.gaps[r]) << '\n';
    }
  }
}

void write_gnuplot_script(std::ostream& out, const std::string& csv_path, const std::string& title) {
  out << "# gnuplot script; run with: gnuplot -p <this file>\n"
      << "set datafile separator ','\n"
      << "set key left top\n"
      << "set title '" << title << "'\n"
      << "set xlabel 'standardized omega'\n"
      << "set ylabel 'CDF'\n"
      << "Phi(x) = 0.5 * erfc(-x / sqrt(2))\n"
      << "plot '" << csv_path << "' using 1:2 skip 1 with steps title 'empirical', \\\n"
      << "     Phi(x) with lines title 'normal'\n";
}

}  // namespace eklab
