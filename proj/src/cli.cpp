#include "eklab/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "eklab/compensated_sum.hpp"
#include "eklab/constraints.hpp"
#include "eklab/csv.hpp"
#include "eklab/error.hpp"
#include "eklab/family_spec.hpp"
#include "eklab/limit_studies.hpp"
#include "eklab/moments.hpp"
#include "eklab/prime_core.hpp"
#include "eklab/sieve_cache.hpp"
#include "eklab/truncated_pmf.hpp"
#include "json.hpp"

#ifndef EKLAB_VERSION
#define EKLAB_VERSION "0.0.0"
#endif

namespace eklab {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"sieve",   "pmf",    "check",  "moments",
                                            "cdf",     "limits", "control"};

std::string fmt_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, const std::string& why) {
  throw UsageError("invalid value '" + std::string(value) + "' for key '" + std::string(key) +
                   "': " + why);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    bad_value(key, text, "expected a nonnegative integer");
  }
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v)) {
    bad_value(key, text, "expected a finite real number");
  }
  return v;
}

unsigned parse_unsigned(std::string_view key, std::string_view text) {
  const std::uint64_t v = parse_u64(key, text);
  if (v > 1'000'000) bad_value(key, text, "too large");
  return static_cast<unsigned>(v);
}

bool parse_bool(std::string_view key, std::string_view text) {
  const auto t = trim(text);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  bad_value(key, text, "expected true or false");
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  if (trim(text).empty()) return parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <class T>
std::string join(const std::vector<T>& values, auto&& fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += fmt(values[i]);
  }
  return out;
}

void check_choice(std::string_view key, std::string_view value, const std::vector<std::string>& allowed) {
  if (std::find(allowed.begin(), allowed.end(), value) == allowed.end()) {
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
    bad_value(key, value, "expected one of " + list);
  }
}

// ---------------------------------------------------------------------------
// Running

struct Session {
  const RunConfig& config;
  RunManifest manifest;
  fs::path out_dir;
  std::optional<fs::path> cache_dir;
  OmegaBuildOptions omega_options;

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(out_dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    f << content;
    if (!f) throw std::runtime_error("write failed for " + (out_dir / name).string());
    manifest.outputs.push_back(name);
  }

  OmegaTable omega(std::uint64_t limit, std::optional<std::uint64_t> cutoff) {
    if (!cache_dir) return build_omega_table(limit, cutoff, omega_options);
    const fs::path path = omega_cache_path(*cache_dir, limit, cutoff);
    if (fs::exists(path)) {
      OmegaTable table = load_omega_cache(path);
      if (table.limit() != limit || table.cutoff() != cutoff) {
        throw IntegrityError("cache " + path.string() + " holds a different table");
      }
      manifest.caches.push_back({path.string(), sha256_file(path), true});
      return table;
    }
    OmegaTable table = build_omega_table(limit, cutoff, omega_options);
    fs::create_directories(*cache_dir);
    const std::string digest = save_omega_cache(table, path);
    manifest.caches.push_back({path.string(), digest, false});
    return table;
  }

  std::uint64_t require_n() const {
    if (!config.n) throw UsageError("command '" + config.command + "' needs key 'n'");
    return *config.n;
  }

  FamilySpec family() const {
    FamilySpec spec = parse_family(config.family);
    validate(spec);
    return spec;
  }
};

json base_json(const char* kind) {
  json j;
  j["schema"] = "ek-lab/1";
  j["kind"] = kind;
  return j;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void run_sieve(Session& s) {
  const std::uint64_t limit = s.require_n();
  const OmegaTable table = s.omega(limit, s.config.cutoff);
  std::vector<std::uint64_t> histogram(static_cast<std::size_t>(table.max_count()) + 1, 0);
  for (const std::uint8_t c : table.counts()) ++histogram[c];
  std::ostringstream csv;
  csv << "omega,count\n";
  for (std::size_t w = 0; w < histogram.size(); ++w) csv << w << ',' << histogram[w] << '\n';
  s.write("omega_histogram.csv", csv.str());

  json j = base_json("sieve");
  j["limit"] = limit;
  j["cutoff"] = s.config.cutoff ? json(*s.config.cutoff) : json(nullptr);
  j["max_omega"] = table.max_count();
  j["histogram"] = histogram;
  s.write("sieve.json", j.dump(2) + "\n");
  s.manifest.summary = "omega table to " + std::to_string(limit) + ", max count " +
                       std::to_string(table.max_count());
}

void run_pmf(Session& s) {
  const std::uint64_t n = s.require_n();
  const FamilySpec spec = s.family();
  const TruncatedPmf pmf = make_pmf(spec, n);
  std::ostringstream csv;
  csv << "i,pmf,epsilon\n";
  CompensatedSum mass;
  for (std::uint64_t i = 1; i <= n; ++i) {
    const double v = pmf(i);
    mass.add(v);
    csv << i << ',' << format_double(v) << ',' << format_double(pmf.epsilon(i)) << '\n';
  }
  s.write("pmf.csv", csv.str());
  json j = base_json("pmf");
  j["family"] = to_string(spec);
  j["n"] = n;
  j["normalizer"] = pmf.normalizer();
  const double total = mass.value();
  j["total_mass"] = total;
  j["closed_form_multiple_sums"] = pmf.has_closed_form();
  s.write("pmf.json", j.dump(2) + "\n");
  s.manifest.summary = to_string(spec) + " on [" + std::to_string(n) + "], total mass " +
                       format_double(total);
}

void run_check(Session& s) {
  const std::uint64_t n = s.require_n();
  const FamilySpec spec = s.family();
  const TruncatedPmf pmf = make_pmf(spec, n);
  C4Options c4_options;
  c4_options.all_primes = s.config.all_primes;
  const C4Report c4 = check_c4(pmf, s.config.C.value_or(1.0), c4_options);
  const C5Report c5 = check_c5(pmf, s.config.D.value_or(1.0), s.config.max_k);

  std::ostringstream csv;
  write_csv_header(csv);
  write_csv(csv, c4);
  write_csv(csv, c5);
  s.write("check.csv", csv.str());

  json j = json::parse(summary_json(c4, &c5));
  j["family"] = to_string(spec);
  j["C_asserted"] = s.config.C.has_value();
  j["D_asserted"] = s.config.D.has_value();
  s.write("check.json", j.dump(2) + "\n");

  // The diagnostic all-primes scan lists small primes too; only primes above
  // alpha_n belong to the large-prime constraint.
  std::size_t c4_failures = 0;
  for (const auto& e : c4.entries) {
    if (!e.pass && static_cast<double>(e.p) > c4.alpha) ++c4_failures;
  }
  const bool failed = (s.config.C && c4_failures > 0) || (s.config.D && c5.failures() > 0);
  s.manifest.exit_code = failed ? kExitConstraintFailure : kExitOk;
  s.manifest.summary = to_string(spec) + " n=" + std::to_string(n) + ": minimal C " +
                       format_double(c4.minimal_C) + ", minimal D " + format_double(c5.minimal_D) +
                       ", failures " + std::to_string(c4_failures) + "/" +
                       std::to_string(c5.failures());
}

void run_moments(Session& s) {
  std::vector<std::uint64_t> schedule = s.config.schedule;
  if (schedule.empty()) schedule.push_back(s.require_n());
  const FamilySpec spec = s.family();
  const auto tables = moment_gap_study(spec, schedule, s.config.r_max, s.omega_options);
  std::ostringstream csv;
  write_csv(csv, std::span<const MomentTable>(tables));
  s.write("moments.csv", csv.str());

  json j = base_json("moments");
  j["family"] = to_string(spec);
  j["r_max"] = s.config.r_max;
  auto& arr = j["tables"] = json::array();
  for (const auto& t : tables) {
    arr.push_back({{"n", t.n},
                   {"cutoff", t.cutoff},
                   {"alpha", t.alpha},
                   {"b", t.b},
                   {"a2", t.a2},
                   {"b_within_alpha", t.b_within_alpha},
                   {"gaps", std::vector<double>(t.gaps.begin() + 1, t.gaps.end())}});
  }
  s.write("moments.json", j.dump(2) + "\n");
  s.manifest.summary = "moment gaps for " + to_string(spec) + " at " +
                       std::to_string(schedule.size()) + " sizes";
}

void run_cdf(Session& s) {
  const std::uint64_t n = s.require_n();
  const FamilySpec spec = s.family();
  const TruncatedPmf pmf = make_pmf(spec, n);
  const OmegaTable omega = s.omega(n, std::nullopt);
  const Centering centering = s.config.centering == "model" ? Centering::kModel : Centering::kLogLog;
  const StandardizedStudy study = standardized_cdf(pmf, omega, centering);
  const StandardizedStudy other = standardized_cdf(
      pmf, omega, centering == Centering::kModel ? Centering::kLogLog : Centering::kModel);

  std::ostringstream csv;
  write_csv(csv, study);
  s.write("cdf.csv", csv.str());
  std::ostringstream gp;
  write_gnuplot_script(gp, "cdf.csv", to_string(spec) + ", n = " + std::to_string(n));
  s.write("cdf.gp", gp.str());

  const double ratio = mean_ratio(pmf, omega);
  json j = base_json("cdf");
  j["family"] = to_string(spec);
  j["n"] = n;
  j["centering"] = to_string(centering);
  j["center"] = study.center;
  j["scale"] = study.scale;
  j["ks"] = study.ks;
  j["total_mass"] = study.total_mass;
  j["ks_" + to_string(other.centering)] = other.ks;
  j["mean_ratio"] = ratio;
  j["note"] = "convergence in n is at log log n rate; finite-n values show trends only";
  s.write("cdf.json", j.dump(2) + "\n");
  s.manifest.summary = to_string(spec) + " n=" + std::to_string(n) + ": KS " +
                       format_double(study.ks) + ", mean ratio " + format_double(ratio);
}

void run_limits(Session& s) {
  const RunConfig& c = s.config;
  if (c.study == "zeta") {
    if (c.a_schedule.empty()) throw UsageError("study 'zeta' needs key 'a_schedule'");
    SequenceOptions options;
    options.n_cap = c.n_cap;
    options.p = c.p;
    options.max_k = c.max_k;
    options.omega = s.omega_options;
    const SequenceStudy study = zeta_sequence_study(c.a_schedule, options);
    std::ostringstream csv;
    write_csv(csv, study);
    s.write("limits.csv", csv.str());
    s.write("limits.json", summary_json(study) + "\n");
    s.manifest.summary = "zeta sequence over " + std::to_string(study.points.size()) + " points";
  } else if (c.study == "dependence") {
    if (c.s_values.empty()) throw UsageError("study 'dependence' needs key 's_values'");
    std::vector<DependenceGap> gaps;
    for (const double sv : c.s_values) gaps.push_back(log_dependence(sv, c.p, c.q));
    std::ostringstream csv;
    write_csv(csv, std::span<const DependenceGap>(gaps));
    s.write("dependence.csv", csv.str());
    json j = base_json("dependence");
    j["p"] = c.p;
    j["q"] = c.q;
    auto& arr = j["points"] = json::array();
    for (const auto& g : gaps) {
      arr.push_back({{"s", g.s},
                     {"marginal_p", g.marginal_p},
                     {"marginal_q", g.marginal_q},
                     {"joint", g.joint},
                     {"gap", g.gap}});
    }
    s.write("dependence.json", j.dump(2) + "\n");
    s.manifest.summary = "dependence gaps at " + std::to_string(gaps.size()) + " values of s";
  } else {
    if (c.path.empty()) throw UsageError("study 'lz' needs key 'path'");
    const std::uint64_t n = s.require_n();
    const auto points = lz_limit_study(c.path, n, c.p, c.max_k, s.omega_options);
    std::ostringstream csv;
    write_csv(csv, std::span<const LzPoint>(points));
    s.write("lz.csv", csv.str());
    json j = base_json("lz-limit");
    j["n"] = n;
    j["p"] = c.p;
    j["mu_column"] = "truncated mean E_n omega at n";
    auto& arr = j["points"] = json::array();
    for (const auto& pt : points) {
      arr.push_back({{"s", pt.s},
                     {"alpha", pt.alpha},
                     {"eps_sum", pt.eps_sum},
                     {"power_bound", pt.power_bound},
                     {"prime_bound", pt.prime_bound},
                     {"chain_holds", pt.chain_holds},
                     {"minimal_C", finite_or_null(pt.minimal_C)},
                     {"minimal_D", finite_or_null(pt.minimal_D)},
                     {"ks", finite_or_null(pt.ks)},
                     {"truncated_mean", finite_or_null(pt.truncated_mean)},
                     {"mean_ratio", finite_or_null(pt.mean_ratio)}});
    }
    s.write("lz.json", j.dump(2) + "\n");
    s.manifest.summary = "log-zeta path of " + std::to_string(points.size()) + " points at n=" +
                         std::to_string(n);
  }
}

void run_control(Session& s) {
  if (s.config.schedule.empty()) throw UsageError("command 'control' needs key 'schedule'");
  const C6Trend trend =
      check_c6(FamilySpec::zeroed({s.config.p}), s.config.p, s.config.schedule, s.config.tolerance);
  std::ostringstream csv;
  write_csv(csv, trend);
  s.write("control.csv", csv.str());
  json j = json::parse(summary_json(trend));
  j["family"] = to_string(FamilySpec::zeroed({s.config.p}));
  s.write("control.json", j.dump(2) + "\n");
  s.manifest.exit_code =
      trend.verdict == Verdict::kConvergingToZero ? kExitOk : kExitConstraintFailure;
  s.manifest.summary = "zeroed at " + std::to_string(s.config.p) + ": tail " +
                       format_double(trend.values.back()) + ", verdict " + to_string(trend.verdict);
}

std::string flag_name(const std::string& key) {
  std::string f = "--" + key;
  std::replace(f.begin(), f.end(), '_', '-');
  return f;
}

const std::map<std::string, std::vector<std::string>>& command_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = {
      {"sieve", {"n", "cutoff"}},
      {"pmf", {"family", "n"}},
      {"check", {"family", "n", "C", "D", "max_k", "all_primes"}},
      {"moments", {"family", "n", "schedule", "r_max"}},
      {"cdf", {"family", "n", "centering"}},
      {"limits", {"study", "a_schedule", "s_values", "path", "n", "n_cap", "p", "q", "max_k"}},
      {"control", {"p", "schedule", "tolerance"}},
  };
  return keys;
}

}  // namespace

void set_key(RunConfig& c, std::string_view key, std::string_view value) {
  const std::string v(trim(value));
  if (key == "command") {
    if (!v.empty()) check_choice(key, v, kCommands);
    c.command = v;
  } else if (key == "family") {
    try {
      validate(parse_family(v));
    } catch (const std::exception& e) {
      bad_value(key, v, e.what());
    }
    c.family = v;
  } else if (key == "n") {
    c.n = v.empty() ? std::nullopt : std::optional(parse_u64(key, v));
  } else if (key == "schedule") {
    c.schedule.clear();
    for (const auto part : split(v, ',')) c.schedule.push_back(parse_u64(key, part));
  } else if (key == "C") {
    c.C = v.empty() ? std::nullopt : std::optional(parse_real(key, v));
  } else if (key == "D") {
    c.D = v.empty() ? std::nullopt : std::optional(parse_real(key, v));
  } else if (key == "max_k") {
    c.max_k = parse_unsigned(key, v);
  } else if (key == "all_primes") {
    c.all_primes = parse_bool(key, v);
  } else if (key == "r_max") {
    c.r_max = parse_unsigned(key, v);
  } else if (key == "centering") {
    check_choice(key, v, {"loglog", "model"});
    c.centering = v;
  } else if (key == "cutoff") {
    c.cutoff = v.empty() ? std::nullopt : std::optional(parse_u64(key, v));
  } else if (key == "p") {
    c.p = parse_u64(key, v);
  } else if (key == "q") {
    c.q = parse_u64(key, v);
  } else if (key == "tolerance") {
    c.tolerance = parse_real(key, v);
  } else if (key == "study") {
    check_choice(key, v, {"zeta", "dependence", "lz"});
    c.study = v;
  } else if (key == "a_schedule") {
    c.a_schedule.clear();
    for (const auto part : split(v, ',')) c.a_schedule.push_back(parse_real(key, part));
  } else if (key == "s_values") {
    c.s_values.clear();
    for (const auto part : split(v, ',')) c.s_values.push_back(parse_real(key, part));
  } else if (key == "path") {
    c.path.clear();
    for (const auto part : split(v, ',')) {
      const auto colon = part.find(':');
      if (colon == std::string_view::npos) bad_value(key, v, "expected s:alpha pairs");
      c.path.emplace_back(parse_real(key, part.substr(0, colon)),
                          parse_real(key, part.substr(colon + 1)));
    }
  } else if (key == "n_cap") {
    c.n_cap = parse_u64(key, v);
  } else if (key == "out_dir") {
    if (v.empty()) bad_value(key, v, "must not be empty");
    c.out_dir = v;
  } else if (key == "cache_dir") {
    c.cache_dir = v.empty() ? std::nullopt : std::optional(v);
  } else if (key == "threads") {
    c.threads = parse_unsigned(key, v);
  } else {
    throw UsageError("unknown key '" + std::string(key) + "'");
  }
}

std::string to_text(const RunConfig& c) {
  auto u64 = [](std::uint64_t v) { return std::to_string(v); };
  auto opt_u64 = [&](const std::optional<std::uint64_t>& v) { return v ? u64(*v) : std::string(); };
  auto opt_real = [](const std::optional<double>& v) { return v ? fmt_num(*v) : std::string(); };
  std::ostringstream out;
  auto line = [&](const char* key, const std::string& value) { out << key << '=' << value << '\n'; };
  line("command", c.command);
  line("family", c.family);
  line("n", opt_u64(c.n));
  line("schedule", join(c.schedule, u64));
  line("C", opt_real(c.C));
  line("D", opt_real(c.D));
  line("max_k", std::to_string(c.max_k));
  line("all_primes", c.all_primes ? "true" : "false");
  line("r_max", std::to_string(c.r_max));
  line("centering", c.centering);
  line("cutoff", opt_u64(c.cutoff));
  line("p", u64(c.p));
  line("q", u64(c.q));
  line("tolerance", fmt_num(c.tolerance));
  line("study", c.study);
  line("a_schedule", join(c.a_schedule, fmt_num));
  line("s_values", join(c.s_values, fmt_num));
  line("path", join(c.path, [](const std::pair<double, double>& pt) {
         return fmt_num(pt.first) + ":" + fmt_num(pt.second);
       }));
  line("n_cap", u64(c.n_cap));
  line("out_dir", c.out_dir);
  line("cache_dir", c.cache_dir.value_or(""));
  line("threads", std::to_string(c.threads));
  return out.str();
}

RunConfig from_text(std::string_view text) {
  RunConfig c;
  for (const auto raw : split(text, '\n')) {
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("expected key=value, got '" + std::string(line) + "'");
    }
    set_key(c, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return c;
}

RunManifest run(const RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (config.command.empty()) throw UsageError("no command given");
  check_choice("command", config.command, kCommands);

  Session s{config, {}, fs::path(config.out_dir), std::nullopt, {}};
  s.manifest.config_text = to_text(config);
  s.manifest.version = EKLAB_VERSION;
  s.omega_options.threads = config.threads;
  if (config.cache_dir) {
    s.cache_dir = fs::path(*config.cache_dir);
  } else if (const char* env = std::getenv(kCacheDirEnv); env != nullptr && *env != '\0') {
    s.cache_dir = fs::path(env);
  }
  fs::create_directories(s.out_dir);

  if (config.command == "sieve") run_sieve(s);
  else if (config.command == "pmf") run_pmf(s);
  else if (config.command == "check") run_check(s);
  else if (config.command == "moments") run_moments(s);
  else if (config.command == "cdf") run_cdf(s);
  else if (config.command == "limits") run_limits(s);
  else run_control(s);

  s.manifest.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ofstream f(s.out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  f << manifest_json(s.manifest) << '\n';
  if (!f) throw std::runtime_error("cannot write manifest.json");
  return s.manifest;
}

std::string manifest_json(const RunManifest& m) {
  json j = base_json("manifest");
  j["version"] = m.version;
  json config = json::object();
  for (const auto line : split(m.config_text, '\n')) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) continue;
    config[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
  }
  j["config"] = config;
  j["wall_seconds"] = m.wall_seconds;
  auto& caches = j["caches"] = json::array();
  for (const auto& c : m.caches) {
    caches.push_back({{"path", c.path}, {"sha256", c.sha256}, {"reused", c.reused}});
  }
  j["outputs"] = m.outputs;
  j["exit_code"] = m.exit_code;
  return j.dump(2);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Erdos-Kac laboratory: perturbed-uniform PMFs, prime factor counts, limit studies"};
  app.set_version_flag("--version", std::string(EKLAB_VERSION));
  app.require_subcommand(1);

  struct Bound {
    CLI::App* sub;
    std::map<std::string, std::pair<CLI::Option*, std::string>> values;
    std::map<std::string, std::pair<CLI::Option*, bool>> flags;
    CLI::Option* config_file = nullptr;
    std::string config_path;
  };
  std::map<std::string, Bound> bound;
  for (const auto& [name, keys] : command_keys()) {
    Bound& b = bound[name];
    b.sub = app.add_subcommand(name, "run the " + name + " study");
    std::vector<std::string> all = keys;
    all.insert(all.end(), {"out_dir", "cache_dir", "threads"});
    for (const auto& key : all) {
      if (key == "all_primes") {
        auto& slot = b.flags[key];
        slot.first = b.sub->add_flag(flag_name(key), slot.second, "scan every prime up to n");
      } else {
        auto& slot = b.values[key];
        slot.first = b.sub->add_option(flag_name(key), slot.second, "config key " + key);
      }
    }
    b.config_file = b.sub->add_option("--config", b.config_path, "key=value file applied first");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    for (auto& [name, b] : bound) {
      if (!b.sub->parsed()) continue;
      RunConfig config;
      if (b.config_file->count() > 0) {
        std::ifstream f(b.config_path);
        if (!f) throw UsageError("cannot read config file " + b.config_path);
        std::stringstream text;
        text << f.rdbuf();
        config = from_text(text.str());
      }
      config.command = name;
      for (const auto& [key, slot] : b.values) {
        if (slot.first->count() > 0) set_key(config, key, slot.second);
      }
      for (const auto& [key, slot] : b.flags) {
        if (slot.first->count() > 0) config.all_primes = slot.second;
      }
      const RunManifest manifest = run(config);
      out << manifest.summary << '\n';
      return manifest.exit_code;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

}  // namespace eklab
