#include "eklab/special_sums.hpp"

#include <array>
#include <cmath>
#include <string>

#include "eklab/compensated_sum.hpp"
#include "eklab/error.hpp"

namespace eklab {
namespace {

constexpr std::uint64_t kHarmonicTable = 1024;
constexpr std::uint64_t kEulerMaclaurinStart = 32;
constexpr double kEulerGamma = 0.57721566490153286060651209;

// B_{2j} / (2j)! for j = 1..7.
constexpr std::array<double, 7> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
};

const std::array<double, kHarmonicTable + 1>& harmonic_table() {
  static const auto table = [] {
    std::array<double, kHarmonicTable + 1> t{};
    CompensatedSum acc;
    for (std::uint64_t i = 1; i <= kHarmonicTable; ++i) {
      acc += 1.0 / static_cast<double>(i);
      t[i] = acc.value();
    }
    return t;
  }();
  return table;
}

// sum_{l=from}^{to-1} l^(-s), compensated.
CompensatedSum direct_head(double s, std::uint64_t from, std::uint64_t to) {
  CompensatedSum acc;
  for (std::uint64_t l = to; l-- > from;) acc += std::pow(static_cast<double>(l), -s);
  return acc;
}

// Sum over j of B_{2j}/(2j)! * (s)_{2j-1} * x^(-s-2j+1): the Euler-Maclaurin
// correction with f(x) = x^(-s), sign folded so that the tail from x to
// infinity is  integral + f(x)/2 + correction(x).
double em_correction(double s, double x) {
  double rising = s;  // (s)_1
  double power = std::pow(x, -s - 1.0);
  const double inv_x2 = 1.0 / (x * x);
  double total = 0.0;
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    total += kBernoulliOverFactorial[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power *= inv_x2;
  }
  return total;
}

// integral_a^b x^(-s) dx, stable for s near 1.
double power_integral(double s, double a, double b) {
  const double log_ratio = std::log(b / a);
  const double one_minus_s = 1.0 - s;
  if (std::abs(one_minus_s) < 1e-300) return log_ratio;
  return std::pow(a, one_minus_s) * std::expm1(one_minus_s * log_ratio) / one_minus_s;
}

}  // namespace

double harmonic_number(std::uint64_t k) {
  if (k <= kHarmonicTable) return harmonic_table()[k];
  const double x = static_cast<double>(k);
  const double inv2 = 1.0 / (x * x);
  const double series = 1.0 / (2.0 * x) - inv2 * (1.0 / 12.0 - inv2 * (1.0 / 120.0 - inv2 / 252.0));
  return std::log(x) + kEulerGamma + series;
}

double partial_zeta(double s, std::uint64_t k) {
  if (!(s > 0.0)) throw DomainError("partial_zeta: s must be > 0");
  if (k < kEulerMaclaurinStart) return direct_head(s, 1, k + 1).value();
  const double m = static_cast<double>(kEulerMaclaurinStart);
  const double kd = static_cast<double>(k);
  // sum_{l=M}^{k} f(l) = int_M^k f + (f(M) + f(k))/2 + C(M) - C(k)
  CompensatedSum acc = direct_head(s, 1, kEulerMaclaurinStart);
  acc += power_integral(s, m, kd);
  acc += 0.5 * (std::pow(m, -s) + std::pow(kd, -s));
  acc += em_correction(s, m);
  acc += -em_correction(s, kd);
  return acc.value();
}

double zeta_minus_one(double s) {
  if (!(s > 1.0)) throw DomainError("zeta_minus_one: s must be > 1 (got " + std::to_string(s) + ")");
  const double m = static_cast<double>(kEulerMaclaurinStart);
  CompensatedSum acc = direct_head(s, 2, kEulerMaclaurinStart);
  acc += std::pow(m, 1.0 - s) / (s - 1.0);
  acc += 0.5 * std::pow(m, -s);
  acc += em_correction(s, m);
  return acc.value();
}

double riemann_zeta(double s) { return 1.0 + zeta_minus_one(s); }

}  // namespace eklab
