#include "eklab/family_spec.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "eklab/error.hpp"
#include "eklab/prime_core.hpp"

namespace eklab {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw DomainError(message);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  FamilySpec parse_all() {
    FamilySpec spec = parse_spec();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return spec;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  std::uint64_t integer() {
    skip_ws();
    std::uint64_t v = 0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr == first) fail("expected an integer");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  // Parses "(k=v, ...)" and checks the key set exactly matches `keys`.
  std::vector<double> parameters(const std::string& name, std::vector<std::string> keys) {
    std::vector<std::optional<double>> values(keys.size());
    if (peek('(')) {
      ++pos_;
      do {
        const std::size_t key_pos = pos_;
        const std::string key = identifier();
        const auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end()) {
          pos_ = key_pos;
          skip_ws();
          fail("unknown parameter '" + key + "' for " + name);
        }
        auto& slot = values[static_cast<std::size_t>(it - keys.begin())];
        if (slot) fail("duplicate parameter '" + key + "'");
        expect('=');
        slot = number();
      } while (peek(',') && (++pos_, true));
      expect(')');
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (!values[i]) fail(name + " requires parameter '" + keys[i] + "'");
      out.push_back(*values[i]);
    }
    return out;
  }

  FamilySpec parse_spec() {
    skip_ws();
    const std::size_t name_pos = pos_;
    const std::string name = identifier();
    if (name == "uniform") return {family::Uniform{}};
    if (name == "harmonic") return {family::Harmonic{}};
    if (name == "zipf") return FamilySpec::zipf(parameters(name, {"s"})[0]);
    if (name == "logarithmic") return FamilySpec::logarithmic(parameters(name, {"s"})[0]);
    if (name == "geometric") return FamilySpec::geometric(parameters(name, {"s"})[0]);
    if (name == "logzeta") {
      const auto v = parameters(name, {"s", "alpha"});
      return FamilySpec::logzeta(v[0], v[1]);
    }
    if (name == "convex") {
      expect('[');
      std::vector<std::pair<double, FamilySpec>> parts;
      do {
        const double w = number();
        expect(':');
        parts.emplace_back(w, parse_spec());
      } while (peek(';') && (++pos_, true));
      expect(']');
      return FamilySpec::convex(std::move(parts));
    }
    if (name == "reflect") {
      expect('[');
      FamilySpec base = parse_spec();
      expect(']');
      return FamilySpec::reflection(std::move(base));
    }
    if (name == "zeroed") {
      expect('[');
      std::vector<std::uint64_t> primes;
      do {
        primes.push_back(integer());
      } while (peek(',') && (++pos_, true));
      expect(']');
      return FamilySpec::zeroed(std::move(primes));
    }
    pos_ = name_pos;
    if (name == "pushforward") fail("density pushforwards have no text form");
    fail("unknown family '" + name + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

FamilySpec FamilySpec::convex(std::vector<std::pair<double, FamilySpec>> parts) {
  family::Convex c;
  for (auto& [w, spec] : parts) {
    c.parts.push_back({w, std::make_shared<const FamilySpec>(std::move(spec))});
  }
  return {std::move(c)};
}

FamilySpec FamilySpec::reflection(FamilySpec base) {
  return {family::Reflection{std::make_shared<const FamilySpec>(std::move(base))}};
}

FamilySpec FamilySpec::zeroed(std::vector<std::uint64_t> primes) {
  std::sort(primes.begin(), primes.end());
  primes.erase(std::unique(primes.begin(), primes.end()), primes.end());
  return {family::ZeroedAtPrimes{std::move(primes)}};
}

FamilySpec FamilySpec::pushforward(DensityGrid density) {
  return {family::CeilingPushforward{std::make_shared<const DensityGrid>(std::move(density))}};
}

std::string_view FamilySpec::name() const {
  return std::visit(overloaded{
                        [](const family::Uniform&) { return std::string_view("uniform"); },
                        [](const family::Harmonic&) { return std::string_view("harmonic"); },
                        [](const family::Zipf&) { return std::string_view("zipf"); },
                        [](const family::Logarithmic&) { return std::string_view("logarithmic"); },
                        [](const family::Geometric&) { return std::string_view("geometric"); },
                        [](const family::LogZeta&) { return std::string_view("logzeta"); },
                        [](const family::Convex&) { return std::string_view("convex"); },
                        [](const family::Reflection&) { return std::string_view("reflect"); },
                        [](const family::ZeroedAtPrimes&) { return std::string_view("zeroed"); },
                        [](const family::CeilingPushforward&) {
                          return std::string_view("pushforward");
                        },
                    },
                    kind);
}

bool operator==(const FamilySpec& a, const FamilySpec& b) {
  if (a.kind.index() != b.kind.index()) return false;
  return std::visit(
      overloaded{
          [&](const family::Convex& ca) {
            const auto& cb = std::get<family::Convex>(b.kind);
            if (ca.parts.size() != cb.parts.size()) return false;
            for (std::size_t i = 0; i < ca.parts.size(); ++i) {
              if (ca.parts[i].weight != cb.parts[i].weight) return false;
              if (!(*ca.parts[i].spec == *cb.parts[i].spec)) return false;
            }
            return true;
          },
          [&](const family::Reflection& ra) {
            return *ra.base == *std::get<family::Reflection>(b.kind).base;
          },
          [&](const family::CeilingPushforward& pa) {
            const auto& pb = std::get<family::CeilingPushforward>(b.kind);
            return pa.density == pb.density ||
                   (pa.density && pb.density && pa.density->n == pb.density->n &&
                    pa.density->points_per_unit == pb.density->points_per_unit &&
                    pa.density->values == pb.density->values);
          },
          [&](const auto& xa) {
            return xa == std::get<std::decay_t<decltype(xa)>>(b.kind);
          },
      },
      a.kind);
}

void validate(const FamilySpec& spec) {
  std::visit(
      overloaded{
          [](const family::Uniform&) {},
          [](const family::Harmonic&) {},
          [](const family::Zipf& z) {
            require(std::isfinite(z.s) && z.s > 0.0,
                    "zipf: s must be > 0 (got " + format_number(z.s) + ")");
          },
          [](const family::Logarithmic& l) {
            require(l.s > 0.0 && l.s < 1.0,
                    "logarithmic: s must lie in (0, 1) (got " + format_number(l.s) + ")");
          },
          [](const family::Geometric& g) {
            require(g.s > 0.0 && g.s < 1.0,
                    "geometric: s must lie in (0, 1) (got " + format_number(g.s) + ")");
          },
          [](const family::LogZeta& lz) {
            require(lz.s > 0.0 && lz.s <= 1.0,
                    "logzeta: s must lie in (0, 1] (got " + format_number(lz.s) + ")");
            require(std::isfinite(lz.alpha) && lz.alpha >= 1.0,
                    "logzeta: alpha must be >= 1 (got " + format_number(lz.alpha) + ")");
          },
          [](const family::Convex& c) {
            require(!c.parts.empty(), "convex: at least one part is required");
            double total = 0.0;
            for (const auto& part : c.parts) {
              require(part.spec != nullptr, "convex: missing component");
              require(std::isfinite(part.weight) && part.weight >= 0.0,
                      "convex: weights must be >= 0 (got " + format_number(part.weight) + ")");
              total += part.weight;
              validate(*part.spec);
            }
            require(std::abs(total - 1.0) <= 1e-12,
                    "convex: weights must sum to 1 within 1e-12 (sum " + format_number(total) + ")");
          },
          [](const family::Reflection& r) {
            require(r.base != nullptr, "reflect: missing base family");
            validate(*r.base);
          },
          [](const family::ZeroedAtPrimes& z) {
            require(!z.primes.empty(), "zeroed: the prime set must be nonempty");
            for (const auto p : z.primes) {
              require(is_prime(p), "zeroed: " + std::to_string(p) + " is not prime");
            }
          },
          [](const family::CeilingPushforward& pf) {
            require(pf.density != nullptr, "pushforward: missing density");
            const auto& g = *pf.density;
            require(g.n >= 1, "pushforward: density must cover (0, n] with n >= 1");
            require(g.points_per_unit >= 16 && g.points_per_unit % 2 == 0,
                    "pushforward: need an even number >= 16 of points per unit interval");
            require(g.values.size() == g.n * (g.points_per_unit + 1),
                    "pushforward: sample count does not match the grid");
            for (const double v : g.values) {
              require(std::isfinite(v) && v >= 0.0, "pushforward: density must be nonnegative");
            }
          },
      },
      spec.kind);
}

FamilySpec parse_family(std::string_view text) {
  FamilySpec spec = Parser(text).parse_all();
  validate(spec);
  return spec;
}

std::string to_string(const FamilySpec& spec) {
  return std::visit(
      overloaded{
          [](const family::Uniform&) { return std::string("uniform"); },
          [](const family::Harmonic&) { return std::string("harmonic"); },
          [](const family::Zipf& z) { return "zipf(s=" + format_number(z.s) + ")"; },
          [](const family::Logarithmic& l) {
            return "logarithmic(s=" + format_number(l.s) + ")";
          },
          [](const family::Geometric& g) { return "geometric(s=" + format_number(g.s) + ")"; },
          [](const family::LogZeta& lz) {
            return "logzeta(s=" + format_number(lz.s) + ",alpha=" + format_number(lz.alpha) + ")";
          },
          [](const family::Convex& c) {
            std::string out = "convex[";
            for (std::size_t i = 0; i < c.parts.size(); ++i) {
              if (i) out += "; ";
              out += format_number(c.parts[i].weight) + ":" + to_string(*c.parts[i].spec);
            }
            return out + "]";
          },
          [](const family::Reflection& r) { return "reflect[" + to_string(*r.base) + "]"; },
          [](const family::ZeroedAtPrimes& z) {
            std::string out = "zeroed[";
            for (std::size_t i = 0; i < z.primes.size(); ++i) {
              if (i) out += ",";
              out += std::to_string(z.primes[i]);
            }
            return out + "]";
          },
          [](const family::CeilingPushforward& pf) {
            std::ostringstream out;
            out << "pushforward[n=" << (pf.density ? pf.density->n : 0)
                << ",points_per_unit=" << (pf.density ? pf.density->points_per_unit : 0) << "]";
            return out.str();
          },
      },
      spec.kind);
}

}  // namespace eklab
