#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "eklab/constraints.hpp"
#include "eklab/error.hpp"
#include "json.hpp"

using namespace eklab;

namespace {

// Direct long double sum of 1/(l d) / H_n over multiples, minus floor(n/d)/n.
long double harmonic_eps_sum(std::uint64_t n, std::uint64_t d) {
  long double h = 0;
  for (std::uint64_t i = n; i >= 1; --i) h += 1.0L / static_cast<long double>(i);
  long double s = 0;
  for (std::uint64_t l = n / d; l >= 1; --l) s += 1.0L / static_cast<long double>(l * d);
  return s / h - static_cast<long double>(n / d) / static_cast<long double>(n);
}

bool squarefree_small(std::uint64_t d, std::uint64_t bound, unsigned max_k) {
  unsigned k = 0;
  for (std::uint64_t p = 2; p * p <= d; ++p) {
    if (d % p != 0) continue;
    if (p > bound) return false;
    d /= p;
    if (d % p == 0) return false;
    ++k;
  }
  if (d > 1) {
    if (d > bound) return false;
    ++k;
  }
  return k >= 1 && k <= max_k;
}

}  // namespace

TEST(C4, UniformPassesWithZeroConstant) {
  for (const std::uint64_t n : {3u, 100u, 5000u}) {
    const C4Report r = check_c4(make_pmf(FamilySpec::uniform(), n), 0.0);
    EXPECT_TRUE(r.all_pass());
    EXPECT_EQ(r.minimal_C, 0.0);
  }
}

TEST(C4, EmptyRangeWhenAlphaExceedsN) {
  const C4Report r = check_c4(make_pmf(FamilySpec::harmonic(), 10), 0.0);
  EXPECT_GT(r.alpha, 10.0);
  EXPECT_TRUE(r.entries.empty());
  EXPECT_EQ(r.minimal_C, 0.0);
}

TEST(C4, HarmonicMatchesDirectSumsAndPassesWithOne) {
  const std::uint64_t n = 1000;
  const C4Report r = check_c4(make_pmf(FamilySpec::harmonic(), n), 1.0);
  const PrimeTable primes = sieve_primes(n);
  const auto expected = primes.in_range(static_cast<std::uint64_t>(std::floor(alpha_n(n))), n);
  ASSERT_EQ(r.entries.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    const auto& e = r.entries[i];
    ASSERT_EQ(e.p, expected[i]);
    EXPECT_GT(static_cast<double>(e.p), r.alpha);
    EXPECT_NEAR(e.eps_sum, static_cast<double>(harmonic_eps_sum(n, e.p)), 1e-15);
    EXPECT_LE(e.eps_sum, 1.0 / static_cast<double>(e.p));
    EXPECT_TRUE(e.pass);
    EXPECT_EQ(e.bound, 1.0 / static_cast<double>(e.p));
  }
}

TEST(C4, ZeroedAtTwoLargePrimes) {
  // Odd multiples carry 2/n each, so eps_sum is 1/n when floor(n/p) is odd
  // and 0 otherwise: C = 0 fails, C = 1 holds with minimal_C = 997/1000.
  const std::uint64_t n = 1000;
  const TruncatedPmf pmf = make_pmf(FamilySpec::zeroed({2}), n);
  const C4Report zero = check_c4(pmf, 0.0);
  ASSERT_EQ(zero.entries.size(), 157u);
  std::size_t odd_quotients = 0;
  for (const auto& e : zero.entries) {
    const bool odd = (n / e.p) % 2 == 1;
    odd_quotients += odd ? 1 : 0;
    EXPECT_NEAR(e.eps_sum, odd ? 1e-3 : 0.0, 1e-15) << e.p;
    EXPECT_EQ(e.pass, !odd) << e.p;
  }
  EXPECT_EQ(odd_quotients, 108u);
  EXPECT_EQ(zero.failures(), 108u);
  EXPECT_NEAR(zero.minimal_C, 0.997, 1e-13);
  EXPECT_TRUE(check_c4(pmf, 1.0).all_pass());
}

TEST(C4, PassFlagFollowsSlackRule) {
  const TruncatedPmf pmf = make_pmf(FamilySpec::zipf(0.6), 3000);
  const C4Report r = check_c4(pmf, 0.05);
  for (const auto& e : r.entries) {
    EXPECT_EQ(e.pass, e.eps_sum <= 0.05 / static_cast<double>(e.p) + 1e-12);
  }
  double sup = 0.0;
  for (const auto& e : r.entries) sup = std::max(sup, static_cast<double>(e.p) * e.eps_sum);
  EXPECT_EQ(r.minimal_C, sup);
}

TEST(C4, AllPrimesDiagnosticScan) {
  C4Options opts;
  opts.all_primes = true;
  const C4Report r = check_c4(make_pmf(FamilySpec::harmonic(), 2000), 1.0, opts);
  EXPECT_EQ(r.entries.size(), sieve_primes(2000).count());
  EXPECT_EQ(r.entries.front().p, 2u);
}

TEST(C4, Preconditions) {
  EXPECT_THROW(check_c4(make_pmf(FamilySpec::uniform(), 2), 1.0), DomainError);
  EXPECT_THROW(check_c4(make_pmf(FamilySpec::uniform(), 20), -1.0), DomainError);
}

TEST(C5, EntriesAreExactlyTheSmallSquarefreeProducts) {
  const std::uint64_t n = 1000;
  const C5Report r = check_c5(make_pmf(FamilySpec::harmonic(), n), 1.0, 4);
  const auto bound = static_cast<std::uint64_t>(std::floor(alpha_n(n)));
  std::vector<std::uint64_t> expected;
  for (std::uint64_t d = 2; d <= n; ++d) {
    if (squarefree_small(d, bound, 4)) expected.push_back(d);
  }
  ASSERT_EQ(r.entries.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(r.entries[i].d, expected[i]);
    EXPECT_NEAR(r.entries[i].eps_sum, static_cast<double>(harmonic_eps_sum(n, expected[i])), 1e-15);
  }
  EXPECT_TRUE(r.all_pass());
  EXPECT_FALSE(r.truncated());
}

TEST(C5, DepthTruncationFlag) {
  // 2*3*5*7 = 210 <= 1000 but 2*3*5*7*11 > 1000
  const TruncatedPmf pmf = make_pmf(FamilySpec::uniform(), 1000);
  EXPECT_TRUE(check_c5(pmf, 0.0, 3).depth_truncated);
  EXPECT_FALSE(check_c5(pmf, 0.0, 4).depth_truncated);
  EXPECT_FALSE(check_c5(pmf, 0.0, 9).depth_truncated);
}

TEST(C5, EntryCapGivesPartialReport) {
  C5Options opts;
  opts.entry_cap = 10;
  const C5Report r = check_c5(make_pmf(FamilySpec::uniform(), 10'000), 0.0, 4, opts);
  EXPECT_TRUE(r.cap_truncated);
  EXPECT_TRUE(r.truncated());
  EXPECT_EQ(r.entries.size(), 10u);
}

TEST(C5, FamilyExamplesPassWithOne) {
  EXPECT_TRUE(check_c5(make_pmf(FamilySpec::harmonic(), 1000), 1.0, 4).all_pass());
  EXPECT_TRUE(check_c5(make_pmf(FamilySpec::zipf(1.5), 1000), 1.0, 4).all_pass());
  const C5Report u = check_c5(make_pmf(FamilySpec::uniform(), 1000), 0.0, 4);
  EXPECT_TRUE(u.all_pass());
  EXPECT_EQ(u.minimal_D, 0.0);
}

TEST(C5, SinglePrimeDepthMatchesDirectEpsilonSums) {
  const TruncatedPmf pmf = make_pmf(FamilySpec::logarithmic(0.95), 4000);
  const C5Report r = check_c5(pmf, 1.0, 1);
  const PrimeTable table = sieve_primes(static_cast<std::uint64_t>(std::floor(alpha_n(4000))));
  const auto primes = table.primes();
  ASSERT_EQ(r.entries.size(), primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) {
    EXPECT_EQ(r.entries[i].d, primes[i]);
    EXPECT_NEAR(r.entries[i].eps_sum, pmf.epsilon_multiple_sum(primes[i]), 1e-14);
  }
}

TEST(C6, UniformConvergesWithZeroValues) {
  const std::vector<std::uint64_t> schedule{100, 1000, 10'000};
  const C6Trend t = check_c6(FamilySpec::uniform(), 2, schedule);
  for (const double v : t.values) EXPECT_EQ(v, 0.0);
  EXPECT_EQ(t.verdict, Verdict::kConvergingToZero);
}

TEST(C6, HarmonicConvergesSlowly) {
  const std::vector<std::uint64_t> schedule{1000, 10'000, 100'000, 1'000'000};
  const C6Trend t = check_c6(FamilySpec::harmonic(), 2, schedule, 1e-1);
  ASSERT_EQ(t.values.size(), schedule.size());
  EXPECT_NEAR(t.values[0], static_cast<double>(harmonic_eps_sum(1000, 2)), 1e-15);
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const double n = static_cast<double>(schedule[i]);
    // (1/2) ln(n/2) / ln n - 1/2 up to O(1/ln n^2)
    EXPECT_NEAR(t.values[i], 0.5 * std::log(n / 2.0) / std::log(n) - 0.5, 0.01);
  }
  EXPECT_EQ(t.verdict, Verdict::kConvergingToZero);
  EXPECT_EQ(t.tail_magnitude, std::abs(t.values.back()));
}

TEST(C6, ZeroedAtTwoIsNonvanishing) {
  const std::vector<std::uint64_t> schedule{1000, 10'000, 100'000};
  const C6Trend t = check_c6(FamilySpec::zeroed({2}), 2, schedule);
  for (const double v : t.values) EXPECT_NEAR(v, -0.5, 1e-12);
  EXPECT_EQ(t.verdict, Verdict::kNonvanishing);
}

TEST(C6, ScheduleValidation) {
  const std::vector<std::uint64_t> short_schedule{10, 100};
  EXPECT_THROW(check_c6(FamilySpec::uniform(), 2, short_schedule), DomainError);
  const std::vector<std::uint64_t> unordered{10, 100, 50};
  EXPECT_THROW(check_c6(FamilySpec::uniform(), 2, unordered), DomainError);
  const std::vector<std::uint64_t> below_p{5, 10, 20};
  EXPECT_THROW(check_c6(FamilySpec::uniform(), 7, below_p), DomainError);
  const std::vector<std::uint64_t> fine{10, 20, 30};
  EXPECT_THROW(check_c6(FamilySpec::uniform(), 4, fine), DomainError);
}

TEST(ClassifyTrend, Rules) {
  const std::vector<double> shrinking{0.3, 0.02, -0.01, 0.005};
  EXPECT_EQ(classify_trend(shrinking, 1e-2), Verdict::kConvergingToZero);
  const std::vector<double> shrinking_but_large{0.9, 0.5, 0.2};
  EXPECT_EQ(classify_trend(shrinking_but_large, 1e-2), Verdict::kInconclusive);
  const std::vector<double> flat{-0.31, -0.33, -0.32};
  EXPECT_EQ(classify_trend(flat, 1e-2), Verdict::kNonvanishing);
  const std::vector<double> wobbling{0.1, 0.3, 0.2};
  EXPECT_EQ(classify_trend(wobbling, 1e-2), Verdict::kInconclusive);
  const std::vector<double> two{0.0, 0.0};
  EXPECT_EQ(classify_trend(two, 1e-2), Verdict::kInconclusive);
}

TEST(ConvexClosure, MinimalConstantsAreSubadditive) {
  const std::uint64_t n = 20'000;
  const TruncatedPmf a = make_pmf(FamilySpec::zipf(0.8), n);
  const TruncatedPmf b = make_pmf(FamilySpec::geometric(0.999), n);
  const double ca = check_c4(a, 1.0).minimal_C;
  const double cb = check_c4(b, 1.0).minimal_C;
  const double da = check_c5(a, 1.0, 4).minimal_D;
  const double db = check_c5(b, 1.0, 4).minimal_D;
  for (const double lambda : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const std::vector<std::pair<double, TruncatedPmf>> parts{{lambda, a}, {1.0 - lambda, b}};
    const TruncatedPmf mix = convex_combine(parts);
    EXPECT_LE(check_c4(mix, 1.0).minimal_C, lambda * ca + (1.0 - lambda) * cb + 1e-12) << lambda;
    EXPECT_LE(check_c5(mix, 1.0, 4).minimal_D, lambda * da + (1.0 - lambda) * db + 1e-12) << lambda;
  }
}

TEST(Reflection, ReflectedSumsStayBelowReciprocalPrime) {
  const TruncatedPmf base = make_pmf(FamilySpec::geometric(0.9999), 5000);
  const TruncatedPmf r = reflect(base);
  C4Options opts;
  opts.all_primes = true;
  const C4Report rep = check_c4(r, 1.0, opts);
  for (const auto& e : rep.entries) EXPECT_LE(e.eps_sum, 1.0 / static_cast<double>(e.p) + 1e-12);
  EXPECT_LE(rep.minimal_C, 1.0);
}

TEST(UniformScan, ConstantUniformFamily) {
  const std::vector<std::uint64_t> js{1, 2, 3};
  const std::vector<std::uint64_t> ns{100, 1000};
  UniformScanOptions opts;
  opts.candidate_C = 0.0;
  opts.candidate_D = 0.0;
  const auto s = uniform_scan([](std::uint64_t) { return FamilySpec::uniform(); }, js, ns, opts);
  EXPECT_EQ(s.points.size(), 6u);
  EXPECT_EQ(s.sup_C, 0.0);
  EXPECT_EQ(s.sup_D, 0.0);
  EXPECT_TRUE(s.dominated);
  for (const auto& t : s.j_threshold) EXPECT_EQ(t, std::optional<std::size_t>(0));
}

TEST(UniformScan, ZipfSequenceIsDominatedByOne) {
  const std::vector<std::uint64_t> js{1, 2, 4, 8};
  const std::vector<std::uint64_t> ns{1000, 10'000, 100'000};
  const auto s = uniform_scan(
      [](std::uint64_t j) { return FamilySpec::zipf(1.0 + 1.0 / static_cast<double>(j)); }, js, ns);
  EXPECT_LE(s.sup_C, 1.0);
  EXPECT_LE(s.sup_D, 1.0);
  EXPECT_TRUE(s.dominated);
  EXPECT_FALSE(s.partial);
  ASSERT_EQ(s.double_limit.size(), 4u);
  // s = 2: 1/4 - 1/2
  EXPECT_NEAR(s.double_limit[0].limit_estimate, -0.25, 1e-3);
  EXPECT_TRUE(s.limit_decreasing_in_j);
}

TEST(UniformScan, GridCapMarksPartial) {
  const std::vector<std::uint64_t> js{1, 2, 3};
  const std::vector<std::uint64_t> ns{100, 200};
  UniformScanOptions opts;
  opts.grid_cap = 3;
  const auto s = uniform_scan([](std::uint64_t) { return FamilySpec::harmonic(); }, js, ns, opts);
  EXPECT_TRUE(s.partial);
  EXPECT_EQ(s.points.size(), 3u);
}

TEST(Reports, CsvAndJson) {
  const TruncatedPmf pmf = make_pmf(FamilySpec::harmonic(), 1000);
  const C4Report c4 = check_c4(pmf, 1.0);
  const C5Report c5 = check_c5(pmf, 1.0, 2);
  std::ostringstream csv;
  write_csv_header(csv);
  write_csv(csv, c4);
  write_csv(csv, c5);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line, "n,d_or_p,k,eps_sum,bound,pass");
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("1000,37,1,", 0), 0u);
  const auto j = nlohmann::json::parse(summary_json(c4, &c5));
  EXPECT_EQ(j["schema"], "ek-lab/1");
  EXPECT_EQ(j["large_primes"]["failures"], 0);
  EXPECT_EQ(j["small_products"]["depth_truncated"], true);

  const std::vector<std::uint64_t> schedule{1000, 10'000, 100'000};
  const auto tj = nlohmann::json::parse(summary_json(check_c6(FamilySpec::zeroed({3}), 3, schedule)));
  EXPECT_EQ(tj["verdict"], "nonvanishing");
}
