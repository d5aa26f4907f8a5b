#include "opcorrect/cli/config.hpp"

#include "opcorrect/common/binary_io.hpp"
#include "opcorrect/common/types.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace opcorrect::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

template <class T>
T parse_number(const std::string& key, const std::string& text) {
  if constexpr (std::is_floating_point_v<T>) {
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(value))
      throw InvalidArgument("config key '" + key + "': '" + text + "' is not a finite number");
    return value;
  } else {
    T value{};
    const auto r = std::from_chars(text.data(), text.data() + text.size(), value);
    if (r.ec != std::errc() || r.ptr != text.data() + text.size())
      throw InvalidArgument("config key '" + key + "': '" + text + "' is not an integer");
    return value;
  }
}

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
  bool hashed = true;
};

#define OPC_INT(NAME, EXPR)                                                                                   \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.EXPR = parse_number<int>(NAME, v); },                 \
      [](const RunConfig& c) { return std::to_string(c.EXPR); }}
#define OPC_SEED(NAME, EXPR)                                                                                  \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.EXPR = parse_number<std::uint64_t>(NAME, v); },       \
      [](const RunConfig& c) { return std::to_string(c.EXPR); }}
#define OPC_DOUBLE(NAME, EXPR)                                                                                \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.EXPR = parse_number<double>(NAME, v); },              \
      [](const RunConfig& c) { return fmt_double(c.EXPR); }}
#define OPC_STRING(NAME, EXPR)                                                                                \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.EXPR = v; }, [](const RunConfig& c) { return c.EXPR; }}

const std::vector<Key>& keys() {
  static const std::vector<Key> k = {
      OPC_INT("mesh.nx", mesh.nx),
      OPC_INT("mesh.ny", mesh.ny),
      OPC_DOUBLE("prior.alpha", prior.alpha),
      OPC_DOUBLE("prior.beta", prior.beta),
      Key{"prior.gamma",
          [](RunConfig& c, const std::string& v) {
            if (v == "auto") c.prior.gamma_override.reset();
            else c.prior.gamma_override = parse_number<double>("prior.gamma", v);
          },
          [](const RunConfig& c) {
            return c.prior.gamma_override ? fmt_double(*c.prior.gamma_override) : std::string("auto");
          }},
      OPC_DOUBLE("prior.mean", prior.mean),
      OPC_STRING("truth.formula", truth.formula),
      OPC_INT("observation.grid", observation.grid),
      OPC_DOUBLE("observation.radius", observation.radius),
      OPC_DOUBLE("observation.noise_pct", observation.noise_pct),
      OPC_SEED("observation.seed", observation.seed),
      OPC_INT("surrogate.r_in", surrogate.r_in),
      OPC_INT("surrogate.r_out", surrogate.r_out),
      OPC_INT("surrogate.oversample", surrogate.oversample),
      OPC_INT("surrogate.n_basis_samples", surrogate.n_basis_samples),
      OPC_INT("surrogate.initial_layers", surrogate.initial_layers),
      OPC_INT("surrogate.layers", surrogate.layers),
      OPC_INT("surrogate.layer_rank", surrogate.layer_rank),
      OPC_DOUBLE("surrogate.lr", surrogate.lr),
      OPC_INT("surrogate.batch", surrogate.batch),
      OPC_INT("surrogate.epochs_per_stage", surrogate.epochs_per_stage),
      OPC_INT("surrogate.final_epochs", surrogate.final_epochs),
      OPC_INT("surrogate.n_train", surrogate.n_train),
      OPC_INT("surrogate.n_test", surrogate.n_test),
      OPC_STRING("surrogate.norm", surrogate.norm),
      OPC_SEED("surrogate.seed", surrogate.seed),
      OPC_DOUBLE("mcmc.beta_pcn", mcmc.beta_pcn),
      OPC_INT("mcmc.n_chains", mcmc.n_chains),
      OPC_INT("mcmc.n_steps", mcmc.n_steps),
      OPC_INT("mcmc.thin", mcmc.thin),
      OPC_DOUBLE("mcmc.burn_in_frac", mcmc.burn_in_frac),
      OPC_STRING("mcmc.transform", mcmc.transform),
      OPC_SEED("mcmc.seed", mcmc.seed),
      OPC_INT("bound.n_mc", bound.n_mc),
      OPC_DOUBLE("bound.sigma_scale", bound.sigma_scale),
      OPC_SEED("bound.seed", bound.seed),
      Key{"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
          [](const RunConfig& c) { return c.output_dir.string(); }, false},
      Key{"run.jobs", [](RunConfig& c, const std::string& v) { c.jobs = parse_number<int>("run.jobs", v); },
          [](const RunConfig& c) { return std::to_string(c.jobs); }, false},
  };
  return k;
}

#undef OPC_INT
#undef OPC_SEED
#undef OPC_DOUBLE
#undef OPC_STRING

void check(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw InvalidArgument("config key '" + key + "' " + what);
}

} // namespace

void RunConfig::validate() const {
  check(mesh.nx >= 2 && mesh.ny >= 2, "mesh.nx", "and mesh.ny must be at least 2");
  check(prior.alpha > 0.0, "prior.alpha", "must be positive");
  check(prior.beta > 0.0, "prior.beta", "must be positive");
  check(!prior.gamma_override || *prior.gamma_override >= 0.0, "prior.gamma", "must be nonnegative or auto");
  check(truth.formula == "rosenbrock", "truth.formula", "must be rosenbrock");
  check(observation.grid >= 1, "observation.grid", "must be positive");
  check(observation.radius > 0.0 && observation.radius < 0.5, "observation.radius", "must lie in (0, 0.5)");
  check(observation.noise_pct > 0.0, "observation.noise_pct", "must be positive");
  const auto& s = surrogate;
  check(s.r_in >= 1, "surrogate.r_in", "must be positive");
  check(s.r_out >= 1, "surrogate.r_out", "must be positive");
  check(s.oversample >= 0, "surrogate.oversample", "must be nonnegative");
  check(s.n_basis_samples >= 1, "surrogate.n_basis_samples", "must be positive");
  check(s.initial_layers >= 0, "surrogate.initial_layers", "must be nonnegative");
  check(s.layers >= s.initial_layers, "surrogate.layers", "must be at least surrogate.initial_layers");
  check(s.layer_rank >= 1, "surrogate.layer_rank", "must be positive");
  check(s.lr > 0.0, "surrogate.lr", "must be positive");
  check(s.batch >= 1, "surrogate.batch", "must be positive");
  check(s.epochs_per_stage >= 1, "surrogate.epochs_per_stage", "must be positive");
  check(s.final_epochs >= 0, "surrogate.final_epochs", "must be nonnegative");
  check(s.n_train >= 2, "surrogate.n_train", "must be at least 2");
  check(s.batch <= s.n_train, "surrogate.batch", "must not exceed surrogate.n_train");
  check(s.n_test >= 1, "surrogate.n_test", "must be positive");
  check(s.norm == "l2" || s.norm == "h1", "surrogate.norm", "must be l2 or h1");
  check(mcmc.beta_pcn > 0.0 && mcmc.beta_pcn < 1.0, "mcmc.beta_pcn", "must lie in (0, 1)");
  check(mcmc.n_chains >= 1, "mcmc.n_chains", "must be positive");
  check(mcmc.n_steps >= 1, "mcmc.n_steps", "must be positive");
  check(mcmc.thin >= 1 && mcmc.n_steps % mcmc.thin == 0, "mcmc.thin", "must be positive and divide mcmc.n_steps");
  check(mcmc.burn_in_frac >= 0.0 && mcmc.burn_in_frac < 1.0, "mcmc.burn_in_frac", "must lie in [0, 1)");
  check(mcmc.transform == "exp" || mcmc.transform == "exp_plus_1" || mcmc.transform == "identity",
        "mcmc.transform", "must be exp, exp_plus_1 or identity");
  check(bound.n_mc >= 100, "bound.n_mc", "must be at least 100");
  check(bound.sigma_scale > 0.0, "bound.sigma_scale", "must be positive");
  check(!output_dir.empty(), "output.dir", "must not be empty");
  check(jobs >= 1, "run.jobs", "must be positive");
}

std::string RunConfig::resolved_text() const {
  std::map<std::string, std::string> sorted;
  for (const auto& k : keys()) sorted[k.name] = k.get(*this);
  std::string out;
  for (const auto& [name, value] : sorted) out += name + " = " + value + "\n";
  return out;
}

std::string RunConfig::hash() const {
  std::map<std::string, std::string> sorted;
  for (const auto& k : keys())
    if (k.hashed) sorted[k.name] = k.get(*this);
  std::string text;
  for (const auto& [name, value] : sorted) text += name + "=" + value + "\n";
  return io::fnv1a_hex(text);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (seen.count(key))
      throw InvalidArgument("config line " + std::to_string(lineno) + ": key '" + key + "' repeats line " +
                            std::to_string(seen[key]));
    seen[key] = lineno;
    bool known = false;
    for (const auto& k : keys())
      if (k.name == key) {
        k.set(c, value);
        known = true;
        break;
      }
    if (!known) throw InvalidArgument("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!base_dir.empty() && c.output_dir.is_relative()) c.output_dir = base_dir / c.output_dir;
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.parent_path());
}

void override_seeds(RunConfig& c, std::uint64_t seed) {
  c.observation.seed = seed;
  c.surrogate.seed = seed;
  c.mcmc.seed = seed;
  c.bound.seed = seed;
}

bool apply_seed_environment(RunConfig& c) {
  const char* env = std::getenv("OPCORRECT_SEED");
  if (!env || !*env) return false;
  override_seeds(c, parse_number<std::uint64_t>("OPCORRECT_SEED", env));
  return true;
}

} // namespace opcorrect::cli
