#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace opcorrect::cli {

struct MeshConfig {
  int nx = 32;
  int ny = 32;
};

struct PriorConfig {
  double alpha = 0.08;
  double beta = 2.0;
  std::optional<double> gamma_override;
  double mean = 0.0;
};

struct TruthConfig {
  std::string formula = "rosenbrock";
};

struct ObservationConfig {
  int grid = 10;
  double radius = 0.04;
  double noise_pct = 0.01;
  std::uint64_t seed = 2024;
};

struct SurrogateConfig {
  int r_in = 20;
  int r_out = 20;
  int oversample = 10;
  int n_basis_samples = 64;
  int initial_layers = 2;
  int layers = 10;
  int layer_rank = 10;
  double lr = 1e-3;
  int batch = 32;
  int epochs_per_stage = 100;
  int final_epochs = 100;
  int n_train = 512;
  int n_test = 512;
  std::string norm = "h1";
  std::uint64_t seed = 1;
};

struct McmcConfig {
  double beta_pcn = 0.03;
  int n_chains = 2;
  int n_steps = 20000;
  int thin = 10;
  double burn_in_frac = 0.25;
  std::string transform = "exp";
  std::uint64_t seed = 7;
};

struct BoundConfig {
  int n_mc = 500;
  double sigma_scale = 100.0;
  std::uint64_t seed = 11;
};

/// Flat "key = value" configuration with dotted keys. '#' starts a comment.
struct RunConfig {
  MeshConfig mesh;
  PriorConfig prior;
  TruthConfig truth;
  ObservationConfig observation;
  SurrogateConfig surrogate;
  McmcConfig mcmc;
  BoundConfig bound;
  std::filesystem::path output_dir = "out";
  int jobs = 1;

  /// Throws InvalidArgument naming the first offending key.
  void validate() const;
  /// Every key with its resolved value, sorted, one "key = value" per line.
  std::string resolved_text() const;
  /// FNV-1a of resolved_text() with output.dir and run.jobs excluded.
  std::string hash() const;
};

/// Unknown or repeated keys and malformed values are errors. Relative
/// output.dir values resolve against `base_dir` when given.
RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Overwrites every seed with `seed`.
void override_seeds(RunConfig& config, std::uint64_t seed);
/// Applies OPCORRECT_SEED when set; returns true if it did.
bool apply_seed_environment(RunConfig& config);

} // namespace opcorrect::cli
