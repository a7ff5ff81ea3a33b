#include "eklab/truncated_pmf.hpp"

#include <cmath>
#include <optional>
#include <string>

#include "eklab/compensated_sum.hpp"
#include "eklab/error.hpp"
#include "eklab/special_sums.hpp"

namespace eklab {
namespace detail {

class PmfModel {
 public:
  PmfModel(FamilySpec spec, std::uint64_t n, double normalizer)
      : spec_(std::move(spec)), n_(n), normalizer_(normalizer) {}
  virtual ~PmfModel() = default;

  virtual double mass(std::uint64_t i) const = 0;
  virtual std::optional<double> closed_multiple_sum(std::uint64_t) const { return std::nullopt; }

  virtual double multiple_sum(std::uint64_t d) const {
    if (auto closed = closed_multiple_sum(d)) return *closed;
    return generic_multiple_sum(d);
  }

  double generic_multiple_sum(std::uint64_t d) const {
    CompensatedSum acc;
    const std::uint64_t count = n_ / d;
    for (std::uint64_t l = count; l >= 1; --l) acc += mass(l * d);
    return acc.value();
  }

  virtual bool has_closed_form() const { return false; }

  const FamilySpec& spec() const { return spec_; }
  std::uint64_t n() const { return n_; }
  double normalizer() const { return normalizer_; }

 protected:
  FamilySpec spec_;
  std::uint64_t n_;
  double normalizer_;
};

}  // namespace detail

namespace {

using detail::PmfModel;

double log_of(std::uint64_t i) { return std::log(static_cast<double>(i)); }

// Sums weight(i) for i = n down to 1, smallest terms first for the usual
// decreasing families.
template <class F>
double direct_normalizer(std::uint64_t n, F&& weight) {
  CompensatedSum acc;
  for (std::uint64_t i = n; i >= 1; --i) acc += weight(i);
  return acc.value();
}

class UniformModel final : public PmfModel {
 public:
  UniformModel(FamilySpec spec, std::uint64_t n) : PmfModel(std::move(spec), n, 1.0) {}
  double mass(std::uint64_t) const override { return 1.0 / static_cast<double>(n_); }
  std::optional<double> closed_multiple_sum(std::uint64_t d) const override {
    return static_cast<double>(n_ / d) / static_cast<double>(n_);
  }
  bool has_closed_form() const override { return true; }
};

class HarmonicModel final : public PmfModel {
 public:
  HarmonicModel(FamilySpec spec, std::uint64_t n)
      : PmfModel(std::move(spec), n,
                 direct_normalizer(n, [](std::uint64_t i) { return 1.0 / static_cast<double>(i); })) {}
  double mass(std::uint64_t i) const override {
    return 1.0 / (static_cast<double>(i) * normalizer_);
  }
  std::optional<double> closed_multiple_sum(std::uint64_t d) const override {
    return harmonic_number(n_ / d) / (static_cast<double>(d) * normalizer_);
  }
  bool has_closed_form() const override { return true; }
};

// Weights i^(-s); also serves logzeta with s = 1.
class ZipfModel final : public PmfModel {
 public:
  ZipfModel(FamilySpec spec, std::uint64_t n, double s)
      : PmfModel(std::move(spec), n,
                 direct_normalizer(n, [s](std::uint64_t i) { return std::exp(-s * log_of(i)); })),
        s_(s) {}
  double mass(std::uint64_t i) const override { return std::exp(-s_ * log_of(i)) / normalizer_; }
  std::optional<double> closed_multiple_sum(std::uint64_t d) const override {
    return std::exp(-s_ * log_of(d)) * partial_zeta(s_, n_ / d) / normalizer_;
  }
  bool has_closed_form() const override { return true; }

 private:
  double s_;
};

// Weights s^i / i^alpha with s < 1 (logarithmic is alpha = 1).
class PowerSeriesModel final : public PmfModel {
 public:
  PowerSeriesModel(FamilySpec spec, std::uint64_t n, double s, double alpha)
      : PmfModel(std::move(spec), n,
                 direct_normalizer(n,
                                   [ls = std::log(s), alpha](std::uint64_t i) {
                                     return std::exp(static_cast<double>(i) * ls -
                                                     alpha * log_of(i));
                                   })),
        log_s_(std::log(s)),
        alpha_(alpha) {}
  double mass(std::uint64_t i) const override {
    return std::exp(static_cast<double>(i) * log_s_ - alpha_ * log_of(i)) / normalizer_;
  }

 private:
  double log_s_;
  double alpha_;
};

class GeometricModel final : public PmfModel {
 public:
  GeometricModel(FamilySpec spec, std::uint64_t n, double s)
      : PmfModel(std::move(spec), n, geometric_sum(std::log(s), 1, n)), log_s_(std::log(s)) {}
  double mass(std::uint64_t i) const override {
    return std::exp(static_cast<double>(i) * log_s_) / normalizer_;
  }
  std::optional<double> closed_multiple_sum(std::uint64_t d) const override {
    return geometric_sum(log_s_, d, n_ / d) / normalizer_;
  }
  bool has_closed_form() const override { return true; }

 private:
  // sum_{l=1}^{count} s^(l*step) = s^step (1 - s^(step*count)) / (1 - s^step)
  static double geometric_sum(double log_s, std::uint64_t step, std::uint64_t count) {
    if (count == 0) return 0.0;
    const double a = static_cast<double>(step) * log_s;
    return std::exp(a) * std::expm1(a * static_cast<double>(count)) / std::expm1(a);
  }
  double log_s_;
};

class ConvexModel final : public PmfModel {
 public:
  ConvexModel(FamilySpec spec, std::uint64_t n, std::vector<double> weights,
              std::vector<std::shared_ptr<const PmfModel>> parts)
      : PmfModel(std::move(spec), n, 1.0), weights_(std::move(weights)), parts_(std::move(parts)) {}
  double mass(std::uint64_t i) const override {
    double total = 0.0;
    for (std::size_t k = 0; k < parts_.size(); ++k) total += weights_[k] * parts_[k]->mass(i);
    return total;
  }
  double multiple_sum(std::uint64_t d) const override {
    double total = 0.0;
    for (std::size_t k = 0; k < parts_.size(); ++k) {
      total += weights_[k] * parts_[k]->multiple_sum(d);
    }
    return total;
  }
  bool has_closed_form() const override {
    for (const auto& part : parts_) {
      if (!part->has_closed_form()) return false;
    }
    return true;
  }

 private:
  std::vector<double> weights_;
  std::vector<std::shared_ptr<const PmfModel>> parts_;
};

class ReflectionModel final : public PmfModel {
 public:
  ReflectionModel(FamilySpec spec, std::shared_ptr<const PmfModel> base)
      : PmfModel(std::move(spec), base->n(), 1.0), base_(std::move(base)) {
    const double inv_n = 1.0 / static_cast<double>(n_);
    const double limit = inv_n * (1.0 + 1e-12);
    for (std::uint64_t i = 1; i <= n_; ++i) {
      const double eps = base_->mass(i) - inv_n;
      if (std::abs(eps) > limit) {
        throw PreconditionError("reflect: |epsilon(" + std::to_string(i) + ")| = " +
                                    std::to_string(std::abs(eps)) + " exceeds 1/n",
                                i);
      }
    }
  }
  double mass(std::uint64_t i) const override {
    const double inv_n = 1.0 / static_cast<double>(n_);
    return std::max(0.0, inv_n - (base_->mass(i) - inv_n));
  }
  double multiple_sum(std::uint64_t d) const override {
    const double share = static_cast<double>(n_ / d) / static_cast<double>(n_);
    return share - (base_->multiple_sum(d) - share);
  }
  bool has_closed_form() const override { return base_->has_closed_form(); }

 private:
  std::shared_ptr<const PmfModel> base_;
};

class ZeroedModel final : public PmfModel {
 public:
  ZeroedModel(FamilySpec spec, std::uint64_t n, std::vector<std::uint64_t> primes)
      : PmfModel(std::move(spec), n, 0.0), primes_(std::move(primes)) {
    std::uint64_t survivors = 0;
    for (std::uint64_t i = 1; i <= n_; ++i) survivors += survives(i) ? 1 : 0;
    normalizer_ = static_cast<double>(survivors);
  }
  double mass(std::uint64_t i) const override { return survives(i) ? 1.0 / normalizer_ : 0.0; }

 private:
  bool survives(std::uint64_t i) const {
    for (const auto p : primes_) {
      if (i % p == 0) return false;
    }
    return true;
  }
  std::vector<std::uint64_t> primes_;
};

class TabulatedModel final : public PmfModel {
 public:
  TabulatedModel(FamilySpec spec, std::uint64_t n, double total, std::vector<double> masses)
      : PmfModel(std::move(spec), n, total), masses_(std::move(masses)) {}
  double mass(std::uint64_t i) const override { return masses_[i - 1]; }

 private:
  std::vector<double> masses_;
};

std::shared_ptr<const PmfModel> build_model(const FamilySpec& spec, std::uint64_t n);

std::shared_ptr<const PmfModel> build_pushforward(const FamilySpec& spec, const DensityGrid& grid,
                                                  std::uint64_t n) {
  if (grid.n != n) {
    throw DomainError("pushforward: density covers (0, " + std::to_string(grid.n) +
                      "] but n = " + std::to_string(n));
  }
  const std::size_t m = grid.points_per_unit;
  const double h = 1.0 / static_cast<double>(m);
  std::vector<double> masses(n);
  CompensatedSum total;
  for (std::uint64_t i = 0; i < n; ++i) {
    const double* f = grid.values.data() + i * (m + 1);
    CompensatedSum acc;
    acc += f[0];
    acc += f[m];
    for (std::size_t k = 1; k < m; ++k) acc += (k % 2 == 1 ? 4.0 : 2.0) * f[k];
    masses[i] = acc.value() * h / 3.0;
    total += masses[i];
  }
  const double mass_total = total.value();
  if (!(mass_total > 0.0)) throw DomainError("pushforward: density has zero total mass");
  for (auto& v : masses) v /= mass_total;
  return std::make_shared<TabulatedModel>(spec, n, mass_total, std::move(masses));
}

std::shared_ptr<const PmfModel> build_model(const FamilySpec& spec, std::uint64_t n) {
  const auto& kind = spec.kind;
  if (std::holds_alternative<family::Uniform>(kind)) {
    return std::make_shared<UniformModel>(spec, n);
  }
  if (std::holds_alternative<family::Harmonic>(kind)) {
    return std::make_shared<HarmonicModel>(spec, n);
  }
  if (const auto* z = std::get_if<family::Zipf>(&kind)) {
    return std::make_shared<ZipfModel>(spec, n, z->s);
  }
  if (const auto* l = std::get_if<family::Logarithmic>(&kind)) {
    return std::make_shared<PowerSeriesModel>(spec, n, l->s, 1.0);
  }
  if (const auto* g = std::get_if<family::Geometric>(&kind)) {
    return std::make_shared<GeometricModel>(spec, n, g->s);
  }
  if (const auto* lz = std::get_if<family::LogZeta>(&kind)) {
    if (lz->s == 1.0) return std::make_shared<ZipfModel>(spec, n, lz->alpha);
    return std::make_shared<PowerSeriesModel>(spec, n, lz->s, lz->alpha);
  }
  if (const auto* c = std::get_if<family::Convex>(&kind)) {
    std::vector<double> weights;
    std::vector<std::shared_ptr<const PmfModel>> parts;
    for (const auto& part : c->parts) {
      weights.push_back(part.weight);
      parts.push_back(build_model(*part.spec, n));
    }
    return std::make_shared<ConvexModel>(spec, n, std::move(weights), std::move(parts));
  }
  if (const auto* r = std::get_if<family::Reflection>(&kind)) {
    return std::make_shared<ReflectionModel>(spec, build_model(*r->base, n));
  }
  if (const auto* z = std::get_if<family::ZeroedAtPrimes>(&kind)) {
    for (const auto p : z->primes) {
      if (p > n) {
        throw DomainError("zeroed: prime " + std::to_string(p) + " exceeds n = " +
                          std::to_string(n));
      }
    }
    return std::make_shared<ZeroedModel>(spec, n, z->primes);
  }
  const auto& pf = std::get<family::CeilingPushforward>(kind);
  return build_pushforward(spec, *pf.density, n);
}

}  // namespace

const FamilySpec& TruncatedPmf::spec() const { return model_->spec(); }
std::uint64_t TruncatedPmf::n() const { return model_->n(); }
double TruncatedPmf::normalizer() const { return model_->normalizer(); }

double TruncatedPmf::pmf(std::uint64_t i) const {
  if (i == 0 || i > n()) {
    throw IndexError("pmf index " + std::to_string(i) + " outside [1, " + std::to_string(n()) +
                     "]");
  }
  return model_->mass(i);
}

double TruncatedPmf::operator()(std::uint64_t i) const { return model_->mass(i); }

double TruncatedPmf::epsilon(std::uint64_t i) const {
  return pmf(i) - 1.0 / static_cast<double>(n());
}

void TruncatedPmf::check_divisor(std::uint64_t d) const {
  if (d == 0 || d > n()) {
    throw IndexError("divisor " + std::to_string(d) + " outside [1, " + std::to_string(n()) + "]");
  }
}

double TruncatedPmf::multiple_sum(std::uint64_t d) const {
  check_divisor(d);
  return model_->multiple_sum(d);
}

double TruncatedPmf::multiple_sum_generic(std::uint64_t d) const {
  check_divisor(d);
  return model_->generic_multiple_sum(d);
}

double TruncatedPmf::epsilon_multiple_sum(std::uint64_t d) const {
  const double total = multiple_sum(d);
  return total - static_cast<double>(n() / d) / static_cast<double>(n());
}

bool TruncatedPmf::has_closed_form() const { return model_->has_closed_form(); }

TruncatedPmf make_pmf(const FamilySpec& spec, std::uint64_t n) {
  if (n < 2) throw DomainError("make_pmf: n must be >= 2 (got " + std::to_string(n) + ")");
  validate(spec);
  return TruncatedPmf(build_model(spec, n));
}

double epsilon(const TruncatedPmf& pmf, std::uint64_t i) { return pmf.epsilon(i); }
double multiple_pmf_sum(const TruncatedPmf& pmf, std::uint64_t d) { return pmf.multiple_sum(d); }
double epsilon_multiple_sum(const TruncatedPmf& pmf, std::uint64_t d) {
  return pmf.epsilon_multiple_sum(d);
}

TruncatedPmf convex_combine(std::span<const std::pair<double, TruncatedPmf>> parts) {
  if (parts.empty()) throw DomainError("convex_combine: at least one part is required");
  const std::uint64_t n = parts.front().second.n();
  std::vector<std::pair<double, FamilySpec>> specs;
  std::vector<double> weights;
  std::vector<std::shared_ptr<const PmfModel>> models;
  for (const auto& [w, pmf] : parts) {
    if (pmf.n() != n) {
      throw DomainError("convex_combine: components disagree on n (" + std::to_string(n) +
                        " vs " + std::to_string(pmf.n()) + ")");
    }
    specs.emplace_back(w, pmf.spec());
    weights.push_back(w);
    models.push_back(pmf.model_);
  }
  FamilySpec spec = FamilySpec::convex(std::move(specs));
  validate(spec);
  return TruncatedPmf(
      std::make_shared<ConvexModel>(std::move(spec), n, std::move(weights), std::move(models)));
}

TruncatedPmf reflect(const TruncatedPmf& pmf) {
  return TruncatedPmf(
      std::make_shared<ReflectionModel>(FamilySpec::reflection(pmf.spec()), pmf.model_));
}

TruncatedPmf zeroed_at_primes(std::uint64_t n, std::vector<std::uint64_t> primes) {
  return make_pmf(FamilySpec::zeroed(std::move(primes)), n);
}

TruncatedPmf ceiling_pushforward(DensityGrid density, std::uint64_t n) {
  return make_pmf(FamilySpec::pushforward(std::move(density)), n);
}

}  // namespace eklab
