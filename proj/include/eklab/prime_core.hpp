#pragma once

// Sieves, distinct-prime-factor tables, the small/large prime threshold and
// prime reciprocal sums.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace eklab {

struct MemoryBudget {
  std::uint64_t bytes = std::uint64_t{1} << 30;
};

/// Ascending primes up to and including `limit`. Immutable after construction.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
      : limit_(limit), primes_(std::move(primes)) {}

  std::uint64_t limit() const { return limit_; }
  std::span<const std::uint64_t> primes() const { return primes_; }
  std::size_t count() const { return primes_.size(); }

  /// Primes p with p <= bound.
  std::span<const std::uint64_t> up_to(std::uint64_t bound) const;
  /// Primes p with lo < p <= hi.
  std::span<const std::uint64_t> in_range(std::uint64_t lo, std::uint64_t hi) const;
  bool contains(std::uint64_t value) const;

 private:
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
};

/// Per-integer count of distinct prime factors for 1..limit, optionally
/// restricted to prime factors <= cutoff (the truncated statistic g).
class OmegaTable {
 public:
  OmegaTable() = default;
  OmegaTable(std::uint64_t limit, std::optional<std::uint64_t> cutoff,
             std::vector<std::uint8_t> counts);

  std::uint64_t limit() const { return limit_; }
  std::optional<std::uint64_t> cutoff() const { return cutoff_; }

  // Unchecked; m in [1, limit].
  std::uint8_t operator[](std::uint64_t m) const { return counts_[m]; }
  std::uint8_t at(std::uint64_t m) const;

  /// Counts for 1..limit (element k is the count for k + 1).
  std::span<const std::uint8_t> counts() const {
    return std::span<const std::uint8_t>(counts_).subspan(1);
  }
  std::uint8_t max_count() const;

  friend bool operator==(const OmegaTable&, const OmegaTable&) = default;

 private:
  std::uint64_t limit_ = 0;
  std::optional<std::uint64_t> cutoff_;
  std::vector<std::uint8_t> counts_;  // index 0 unused, always 0
};

struct PrimeSums {
  std::uint64_t cutoff = 0;
  double b = 0.0;   // sum of 1/p
  double a2 = 0.0;  // sum of (1/p)(1 - 1/p)
};

struct OmegaBuildOptions {
  MemoryBudget budget{};
  // 0 selects std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Tables above this limit are built segment by segment.
  std::uint64_t segmented_above = 10'000'000;
  std::uint64_t segment_length = std::uint64_t{1} << 18;
};

PrimeTable sieve_primes(std::uint64_t limit, const MemoryBudget& budget = {});

OmegaTable build_omega_table(std::uint64_t limit,
                             std::optional<std::uint64_t> cutoff = std::nullopt,
                             const OmegaBuildOptions& options = {});

/// n^(1 / ln ln n). Throws DomainError for n <= 2, where ln ln n <= 0.
double alpha_n(std::uint64_t n);

/// floor(alpha_n(n)) clamped to n: the largest prime candidate counted as
/// "small" at size n.
std::uint64_t small_prime_cutoff(std::uint64_t n);

PrimeSums prime_reciprocal_sums(std::uint64_t cutoff);
PrimeSums prime_reciprocal_sums(const PrimeTable& primes, std::uint64_t cutoff);

bool is_prime(std::uint64_t value);

}  // namespace eklab
