#pragma once

// Probability mass functions on [n] = {1, ..., n}, each viewed as a
// perturbation 1/n + epsilon(i) of the uniform law.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "eklab/family_spec.hpp"

namespace eklab {

namespace detail {
class PmfModel;
}

/// An immutable PMF on [n]. Copies share the underlying model; all queries
/// are const and safe to call concurrently.
class TruncatedPmf {
 public:
  const FamilySpec& spec() const;
  std::uint64_t n() const;
  /// The family's normalizing constant (H_n, sum s^j/j^alpha, ...); 1 for
  /// families assembled from already-normalized parts.
  double normalizer() const;

  /// pmf(i) for 1 <= i <= n; throws IndexError otherwise.
  double pmf(std::uint64_t i) const;
  /// Unchecked pmf(i).
  double operator()(std::uint64_t i) const;
  double epsilon(std::uint64_t i) const;

  /// sum_{l <= n/d} pmf(l d), through the family's closed form when it has one.
  double multiple_sum(std::uint64_t d) const;
  /// Same quantity by looping over the multiples of d.
  double multiple_sum_generic(std::uint64_t d) const;
  /// sum_{l <= n/d} epsilon(l d) = multiple_sum(d) - floor(n/d)/n.
  double epsilon_multiple_sum(std::uint64_t d) const;

  bool has_closed_form() const;

 private:
  explicit TruncatedPmf(std::shared_ptr<const detail::PmfModel> model)
      : model_(std::move(model)) {}
  void check_divisor(std::uint64_t d) const;

  std::shared_ptr<const detail::PmfModel> model_;

  friend TruncatedPmf make_pmf(const FamilySpec& spec, std::uint64_t n);
  friend TruncatedPmf convex_combine(std::span<const std::pair<double, TruncatedPmf>> parts);
  friend TruncatedPmf reflect(const TruncatedPmf& pmf);
};

/// Throws DomainError for out-of-range parameters or n < 2.
TruncatedPmf make_pmf(const FamilySpec& spec, std::uint64_t n);

double epsilon(const TruncatedPmf& pmf, std::uint64_t i);
double multiple_pmf_sum(const TruncatedPmf& pmf, std::uint64_t d);
double epsilon_multiple_sum(const TruncatedPmf& pmf, std::uint64_t d);

/// Pointwise mixture. Components must share n; weights must be nonnegative
/// and sum to 1 within 1e-12.
TruncatedPmf convex_combine(std::span<const std::pair<double, TruncatedPmf>> parts);

/// The PMF 1/n - epsilon(i). Requires |epsilon(i)| <= 1/n everywhere; throws
/// PreconditionError carrying the first violating index.
TruncatedPmf reflect(const TruncatedPmf& pmf);

/// Uniform on the integers in [n] not divisible by any prime in `primes`.
TruncatedPmf zeroed_at_primes(std::uint64_t n, std::vector<std::uint64_t> primes);

/// Law of ceil(X) for X with the given density on (0, n]; composite Simpson
/// on each unit interval.
TruncatedPmf ceiling_pushforward(DensityGrid density, std::uint64_t n);

}  // namespace eklab
