#include "eklab/prime_core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "eklab/compensated_sum.hpp"
#include "eklab/error.hpp"

namespace eklab {
namespace {

constexpr std::uint64_t kSieveSegment = std::uint64_t{1} << 18;

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Dusart-style upper bound on pi(x), used only for memory estimates.
std::uint64_t prime_count_upper_bound(std::uint64_t x) {
  if (x < 17) return 7;
  const double xd = static_cast<double>(x);
  return static_cast<std::uint64_t>(1.25506 * xd / std::log(xd)) + 1;
}

void require_budget(std::uint64_t required, const MemoryBudget& budget, const char* what) {
  if (required > budget.bytes) {
    throw ResourceError(std::string(what) + " needs " + std::to_string(required) +
                            " bytes, budget is " + std::to_string(budget.bytes),
                        required);
  }
}

std::vector<std::uint64_t> small_sieve(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<char> composite(limit + 1, 0);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return out;
}

unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Fills counts[lo..hi] for one segment. Primes up to sqrt(limit) are divided
// out of a residual; anything left over is the single prime factor above
// sqrt(limit).
void omega_segment(std::uint64_t lo, std::uint64_t hi, std::uint64_t effective_cutoff,
                   std::span<const std::uint64_t> small_primes, bool track_residual,
                   std::vector<std::uint64_t>& residual, std::uint8_t* counts) {
  const std::uint64_t len = hi - lo + 1;
  if (track_residual) {
    residual.resize(len);
    for (std::uint64_t i = 0; i < len; ++i) residual[i] = lo + i;
  }
  for (const std::uint64_t p : small_primes) {
    const bool counted = p <= effective_cutoff;
    if (!counted && !track_residual) break;
    const std::uint64_t first = ((lo + p - 1) / p) * p;
    for (std::uint64_t m = first; m <= hi; m += p) {
      const std::uint64_t idx = m - lo;
      if (counted) ++counts[m];
      if (track_residual) {
        std::uint64_t r = residual[idx] / p;
        while (r % p == 0) r /= p;
        residual[idx] = r;
      }
    }
  }
  if (track_residual) {
    for (std::uint64_t i = 0; i < len; ++i) {
      if (residual[i] > 1 && residual[i] <= effective_cutoff) ++counts[lo + i];
    }
  }
}

}  // namespace

std::span<const std::uint64_t> PrimeTable::up_to(std::uint64_t bound) const {
  const auto end = std::upper_bound(primes_.begin(), primes_.end(), bound);
  return {primes_.data(), static_cast<std::size_t>(end - primes_.begin())};
}

std::span<const std::uint64_t> PrimeTable::in_range(std::uint64_t lo, std::uint64_t hi) const {
  if (hi <= lo) return {};
  const auto first = std::upper_bound(primes_.begin(), primes_.end(), lo);
  const auto last = std::upper_bound(first, primes_.end(), hi);
  return {primes_.data() + (first - primes_.begin()), static_cast<std::size_t>(last - first)};
}

bool PrimeTable::contains(std::uint64_t value) const {
  return std::binary_search(primes_.begin(), primes_.end(), value);
}

OmegaTable::OmegaTable(std::uint64_t limit, std::optional<std::uint64_t> cutoff,
                       std::vector<std::uint8_t> counts)
    : limit_(limit), cutoff_(cutoff), counts_(std::move(counts)) {
  if (counts_.size() != limit_ + 1) {
    throw std::invalid_argument("OmegaTable: counts must hold limit + 1 entries");
  }
}

std::uint8_t OmegaTable::at(std::uint64_t m) const {
  if (m == 0 || m > limit_) {
    throw IndexError("omega index " + std::to_string(m) + " outside [1, " +
                     std::to_string(limit_) + "]");
  }
  return counts_[m];
}

std::uint8_t OmegaTable::max_count() const {
  return counts_.empty() ? 0 : *std::max_element(counts_.begin(), counts_.end());
}

PrimeTable sieve_primes(std::uint64_t limit, const MemoryBudget& budget) {
  if (limit == 0) throw DomainError("sieve_primes: limit must be >= 1");
  const std::uint64_t root = isqrt(limit);
  const std::uint64_t required = prime_count_upper_bound(limit) * sizeof(std::uint64_t) +
                                 (root + 1) + kSieveSegment;
  require_budget(required, budget, "sieve_primes");

  std::vector<std::uint64_t> primes;
  if (limit < 2) return PrimeTable(limit, std::move(primes));
  primes.reserve(static_cast<std::size_t>(prime_count_upper_bound(limit)));

  const std::vector<std::uint64_t> base = small_sieve(root);
  std::vector<char> mark(kSieveSegment);
  for (std::uint64_t lo = 2; lo <= limit; lo += kSieveSegment) {
    const std::uint64_t hi = std::min(limit, lo + kSieveSegment - 1);
    std::fill(mark.begin(), mark.end(), 1);
    for (const std::uint64_t p : base) {
      if (p * p > hi) break;
      const std::uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
      for (std::uint64_t j = start; j <= hi; j += p) mark[j - lo] = 0;
    }
    for (std::uint64_t v = lo; v <= hi; ++v) {
      if (mark[v - lo]) primes.push_back(v);
    }
  }
  primes.shrink_to_fit();
  return PrimeTable(limit, std::move(primes));
}

OmegaTable build_omega_table(std::uint64_t limit, std::optional<std::uint64_t> cutoff,
                             const OmegaBuildOptions& options) {
  if (limit == 0) throw DomainError("build_omega_table: limit must be >= 1");
  if (cutoff && (*cutoff == 0 || *cutoff > limit)) {
    throw DomainError("build_omega_table: cutoff must lie in [1, limit]");
  }
  const std::uint64_t effective = cutoff.value_or(limit);
  const bool segmented = limit > options.segmented_above;
  const std::uint64_t root = isqrt(limit);
  const unsigned threads = segmented ? resolve_threads(options.threads) : 1;
  const std::uint64_t seg_len = std::max<std::uint64_t>(options.segment_length, 1024);

  std::uint64_t required = limit + 1;
  if (segmented) {
    required += prime_count_upper_bound(root) * sizeof(std::uint64_t) +
                std::uint64_t{threads} * seg_len * sizeof(std::uint64_t);
  } else {
    required += prime_count_upper_bound(effective) * sizeof(std::uint64_t);
  }
  require_budget(required, options.budget, "build_omega_table");

  std::vector<std::uint8_t> counts(limit + 1, 0);

  if (!segmented) {
    const PrimeTable primes = sieve_primes(effective, options.budget);
    for (const std::uint64_t p : primes.primes()) {
      for (std::uint64_t m = p; m <= limit; m += p) ++counts[m];
    }
    return OmegaTable(limit, cutoff, std::move(counts));
  }

  const std::vector<std::uint64_t> small = small_sieve(root);
  const bool track_residual = effective > root;
  const std::uint64_t segments = (limit + seg_len - 1) / seg_len;
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    std::vector<std::uint64_t> residual;
    for (std::uint64_t s = next++; s < segments; s = next++) {
      const std::uint64_t lo = std::max<std::uint64_t>(1, s * seg_len);
      const std::uint64_t hi = std::min(limit, (s + 1) * seg_len - 1);
      omega_segment(lo, hi, effective, small, track_residual, residual, counts.data());
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return OmegaTable(limit, cutoff, std::move(counts));
}

double alpha_n(std::uint64_t n) {
  if (n <= 2) {
    throw DomainError("alpha_n: n must be >= 3 so that ln ln n > 0 (got " + std::to_string(n) +
                      ")");
  }
  const double ln_n = std::log(static_cast<double>(n));
  return std::exp(ln_n / std::log(ln_n));
}

std::uint64_t small_prime_cutoff(std::uint64_t n) {
  const double a = alpha_n(n);
  if (a >= static_cast<double>(n)) return n;
  return static_cast<std::uint64_t>(std::floor(a));
}

PrimeSums prime_reciprocal_sums(const PrimeTable& primes, std::uint64_t cutoff) {
  if (cutoff == 0) throw DomainError("prime_reciprocal_sums: cutoff must be >= 1");
  if (cutoff > primes.limit()) {
    throw DomainError("prime_reciprocal_sums: cutoff exceeds the prime table limit");
  }
  CompensatedSum b;
  CompensatedSum a2;
  for (const std::uint64_t p : primes.up_to(cutoff)) {
    const double inv = 1.0 / static_cast<double>(p);
    b += inv;
    a2 += inv * (1.0 - inv);
  }
  return {cutoff, b.value(), a2.value()};
}

PrimeSums prime_reciprocal_sums(std::uint64_t cutoff) {
  return prime_reciprocal_sums(sieve_primes(std::max<std::uint64_t>(cutoff, 1)), cutoff);
}

bool is_prime(std::uint64_t value) {
  if (value < 2) return false;
  if (value < 4) return true;
  if (value % 2 == 0 || value % 3 == 0) return false;
  for (std::uint64_t d = 5; d * d <= value; d += 6) {
    if (value % d == 0 || value % (d + 2) == 0) return false;
  }
  return true;
}

}  // namespace eklab
