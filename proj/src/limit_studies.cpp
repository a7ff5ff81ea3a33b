#include "eklab/limit_studies.hpp"

#include <cmath>
#include <limits>
#include <ostream>

#include "eklab/compensated_sum.hpp"
#include "eklab/csv.hpp"
#include "eklab/error.hpp"
#include "eklab/moments.hpp"
#include "eklab/special_sums.hpp"
#include "eklab/truncated_pmf.hpp"
#include "json.hpp"

namespace eklab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_s(double s, const char* who) {
  if (!(s > 1.0) || !std::isfinite(s)) {
    throw DomainError(std::string(who) + ": s must be > 1, the prime zeta series diverges at s <= 1");
  }
}

int mobius(std::uint64_t k) {
  int sign = 1;
  for (std::uint64_t p = 2; p * p <= k; ++p) {
    if (k % p != 0) continue;
    k /= p;
    if (k % p == 0) return 0;
    sign = -sign;
  }
  if (k > 1) sign = -sign;
  return sign;
}

struct PointChecks {
  double minimal_C = kNaN;
  double minimal_D = kNaN;
  bool c5_truncated = false;
  double eps_sum_p = kNaN;
  double ks = kNaN;
  double mean = kNaN;
  double mean_ratio = kNaN;
};

PointChecks run_point(const TruncatedPmf& pmf, std::uint64_t p, unsigned max_k,
                      const OmegaTable& omega) {
  PointChecks out;
  const std::uint64_t n = pmf.n();
  if (n < 3) return out;
  out.minimal_C = check_c4(pmf, 1.0).minimal_C;
  const C5Report c5 = check_c5(pmf, 1.0, max_k);
  out.minimal_D = c5.minimal_D;
  out.c5_truncated = c5.truncated();
  if (p <= n) out.eps_sum_p = pmf.epsilon_multiple_sum(p);
  out.ks = standardized_cdf(pmf, omega).ks;
  out.mean_ratio = mean_ratio(pmf, omega);
  out.mean = out.mean_ratio * std::log(std::log(static_cast<double>(n)));
  return out;
}

void write_row(std::ostream& out, std::size_t j, double s, double alpha, double mu,
               std::uint64_t n, bool capped, double minimal_C, double minimal_D, double eps,
               double ks, double ratio) {
  out << j << ',' << format_double(s) << ',' << format_double(alpha) << ',' << format_double(mu)
      << ',' << n << ',' << format_bool(capped) << ',' << format_double(minimal_C) << ','
      << format_double(minimal_D) << ',' << format_double(eps) << ',' << format_double(ks) << ','
      << format_double(ratio) << '\n';
}

constexpr const char* kSequenceHeader =
    "j,s,alpha,mu,n_j,capped,minimal_C,minimal_D,eps_sum_p,ks,mean_ratio\n";

}  // namespace

double prime_zeta_partial(double s, std::uint64_t cutoff) {
  const PrimeTable primes = sieve_primes(std::max<std::uint64_t>(cutoff, 1));
  CompensatedSum sum;
  const auto ps = primes.primes();
  // Smallest terms first.
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) sum.add(std::pow(static_cast<double>(*it), -s));
  return sum.value();
}

double prime_zeta_tail_bound(double s, std::uint64_t cutoff) {
  check_s(s, "prime_zeta_tail_bound");
  if (cutoff < 2) throw DomainError("prime_zeta_tail_bound: cutoff must be >= 2");
  const double N = static_cast<double>(cutoff);
  return std::pow(N, 1.0 - s) / ((s - 1.0) * std::log(N));
}

std::optional<std::uint64_t> prime_zeta_direct_cutoff(double s, double abs_tol) {
  check_s(s, "prime_zeta_direct_cutoff");
  for (std::uint64_t N = 1024; N <= kPrimeZetaDirectLimit; N *= 2) {
    if (prime_zeta_tail_bound(s, N) < abs_tol) return N;
  }
  return std::nullopt;
}

double prime_zeta_mobius(double s) {
  check_s(s, "prime_zeta_mobius");
  // ln zeta(ks) ~ 2^-ks, negligible once ks > 64.
  const auto k_max = static_cast<std::uint64_t>(std::ceil(64.0 / s)) + 1;
  CompensatedSum sum;
  for (std::uint64_t k = k_max; k >= 1; --k) {
    const int m = mobius(k);
    if (m == 0) continue;
    const double term = std::log1p(zeta_minus_one(static_cast<double>(k) * s)) / static_cast<double>(k);
    sum.add(m > 0 ? term : -term);
  }
  return sum.value();
}

double prime_zeta(double s, double abs_tol) {
  check_s(s, "prime_zeta");
  if (!(abs_tol >= 1e-12)) throw DomainError("prime_zeta: abs_tol must be >= 1e-12");
  if (const auto cutoff = prime_zeta_direct_cutoff(s, abs_tol)) {
    return prime_zeta_partial(s, *cutoff);
  }
  return prime_zeta_mobius(s);
}

SequenceStudy zeta_sequence_study(std::span<const double> a_schedule, const SequenceOptions& options) {
  if (a_schedule.empty()) throw DomainError("zeta_sequence_study: empty schedule");
  for (std::size_t i = 0; i < a_schedule.size(); ++i) {
    if (!(a_schedule[i] > 0.0) || !std::isfinite(a_schedule[i])) {
      throw DomainError("zeta_sequence_study: every a must be a positive real");
    }
    if (i > 0 && !(a_schedule[i] > a_schedule[i - 1])) {
      throw DomainError("zeta_sequence_study: schedule must be strictly increasing");
    }
  }
  if (options.n_cap < 1000) throw DomainError("zeta_sequence_study: n_cap must be >= 1000");
  if (!is_prime(options.p)) throw DomainError("zeta_sequence_study: p must be prime");

  SequenceStudy study;
  study.p = options.p;
  study.n_cap = options.n_cap;
  for (std::size_t j = 0; j < a_schedule.size(); ++j) {
    SequencePoint pt;
    pt.j = j;
    pt.a = a_schedule[j];
    pt.s = 1.0 + 1.0 / pt.a;
    pt.mu = prime_zeta(pt.s, 1e-8);
    const double raw = std::floor(std::exp(std::exp(pt.mu)));
    if (!std::isfinite(raw) || raw > static_cast<double>(options.n_cap)) {
      pt.capped = true;
      pt.n_j = options.n_cap;
    } else {
      pt.n_j = std::max<std::uint64_t>(static_cast<std::uint64_t>(raw), 2);
    }
    const TruncatedPmf pmf = make_pmf(FamilySpec::zipf(pt.s), pt.n_j);
    const OmegaTable omega =
        pt.n_j >= 3 ? build_omega_table(pt.n_j, std::nullopt, options.omega) : OmegaTable{};
    const PointChecks checks = run_point(pmf, options.p, options.max_k, omega);
    pt.minimal_C = checks.minimal_C;
    pt.minimal_D = checks.minimal_D;
    pt.c5_truncated = checks.c5_truncated;
    pt.eps_sum_p = checks.eps_sum_p;
    pt.ks = checks.ks;
    pt.mean_ratio = checks.mean_ratio;
    study.points.push_back(pt);
  }
  return study;
}

double log_divisibility(double s, std::uint64_t d) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("log_divisibility: s must lie in (0, 1)");
  if (d == 0) throw DomainError("log_divisibility: d must be positive");
  const double sd = std::pow(s, static_cast<double>(d));
  return std::log1p(-sd) / std::log1p(-s) / static_cast<double>(d);
}

DependenceGap log_dependence(double s, std::uint64_t p, std::uint64_t q) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("log_dependence: s must lie in (0, 1)");
  if (!is_prime(p) || !is_prime(q) || p == q) {
    throw DomainError("log_dependence: p and q must be distinct primes");
  }
  DependenceGap g;
  g.s = s;
  g.p = p;
  g.q = q;
  g.marginal_p = log_divisibility(s, p);
  g.marginal_q = log_divisibility(s, q);
  g.joint = log_divisibility(s, p * q);
  g.gap = g.joint - g.marginal_p * g.marginal_q;
  return g;
}

std::vector<LzPoint> lz_limit_study(std::span<const std::pair<double, double>> path,
                                    std::uint64_t n, std::uint64_t p, unsigned max_k,
                                    const OmegaBuildOptions& omega_options) {
  if (n < 1000) throw DomainError("lz_limit_study: n must be >= 1000");
  if (!is_prime(p) || p > n) throw DomainError("lz_limit_study: p must be a prime <= n");
  for (const auto& [s, alpha] : path) validate(FamilySpec::logzeta(s, alpha));

  const OmegaTable omega = build_omega_table(n, std::nullopt, omega_options);
  std::vector<LzPoint> out;
  for (const auto& [s, alpha] : path) {
    LzPoint pt;
    pt.s = s;
    pt.alpha = alpha;
    pt.n = n;
    pt.p = p;
    const TruncatedPmf pmf = make_pmf(FamilySpec::logzeta(s, alpha), n);
    const PointChecks checks = run_point(pmf, p, max_k, omega);
    pt.eps_sum = checks.eps_sum_p;
    pt.prime_bound = 1.0 / static_cast<double>(p);
    pt.power_bound = std::pow(static_cast<double>(p), -alpha);
    pt.chain_holds = pt.eps_sum <= pt.power_bound + kPassSlack && pt.power_bound <= pt.prime_bound;
    pt.minimal_C = checks.minimal_C;
    pt.minimal_D = checks.minimal_D;
    pt.ks = checks.ks;
    pt.truncated_mean = checks.mean;
    pt.mean_ratio = checks.mean_ratio;
    out.push_back(pt);
  }
  return out;
}

C6Trend nonexample_control(std::span<const std::uint64_t> n_schedule, std::uint64_t p) {
  return check_c6(FamilySpec::zeroed({p}), p, n_schedule);
}

void write_csv(std::ostream& out, const SequenceStudy& study) {
  out << kSequenceHeader;
  for (const auto& pt : study.points) {
    write_row(out, pt.j, pt.s, 1.0, pt.mu, pt.n_j, pt.capped, pt.minimal_C, pt.minimal_D,
              pt.eps_sum_p, pt.ks, pt.mean_ratio);
  }
}

void write_csv(std::ostream& out, std::span<const LzPoint> points) {
  out << kSequenceHeader;
  for (std::size_t j = 0; j < points.size(); ++j) {
    const auto& pt = points[j];
    write_row(out, j, pt.s, pt.alpha, pt.truncated_mean, pt.n, false, pt.minimal_C, pt.minimal_D,
              pt.eps_sum, pt.ks, pt.mean_ratio);
  }
}

void write_csv(std::ostream& out, std::span<const DependenceGap> gaps) {
  out << "s,p,q,marginal_p,marginal_q,joint,gap\n";
  for (const auto& g : gaps) {
    out << format_double(g.s) << ',' << g.p << ',' << g.q << ',' << format_double(g.marginal_p)
        << ',' << format_double(g.marginal_q) << ',' << format_double(g.joint) << ','
        << format_double(g.gap) << '\n';
  }
}

std::string summary_json(const SequenceStudy& study) {
  nlohmann::ordered_json j;
  j["schema"] = "ek-lab/1";
  j["kind"] = "zeta-sequence";
  j["p"] = study.p;
  j["n_cap"] = study.n_cap;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; };
  for (const auto& pt : study.points) {
    pts.push_back({{"j", pt.j},
                   {"a", pt.a},
                   {"s", pt.s},
                   {"mu", pt.mu},
                   {"n_j", pt.n_j},
                   {"capped", pt.capped},
                   {"minimal_C", num(pt.minimal_C)},
                   {"minimal_D", num(pt.minimal_D)},
                   {"c5_truncated", pt.c5_truncated},
                   {"eps_sum_p", num(pt.eps_sum_p)},
                   {"ks", num(pt.ks)},
                   {"mean_ratio", num(pt.mean_ratio)}});
  }
  return j.dump(2);
}

}  // namespace eklab
