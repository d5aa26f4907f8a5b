#pragma once

#include "opcorrect/common/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace opcorrect::cli {

using Json = nlohmann::ordered_json;

std::string version_string();

/// Stage record written as "<stage>.json" next to the artifacts it describes.
/// Inputs and outputs map file names (relative to the run directory) to hashes.
struct Manifest {
  std::string stage;
  std::string config_hash;
  Json seeds = Json::object();
  Json counters = Json::object();
  Json results = Json::object();
  Json inputs = Json::object();
  Json outputs = Json::object();
  double seconds = 0.0;

  Json to_json() const;
  static Manifest from_json(const Json& j);
};

std::filesystem::path manifest_path(const std::filesystem::path& dir, const std::string& stage);
void write_manifest(const std::filesystem::path& dir, const Manifest& m);
std::optional<Manifest> read_manifest(const std::filesystem::path& dir, const std::string& stage);

/// Hashes of the named files; throws naming the first missing one.
Json hash_files(const std::filesystem::path& dir, const std::vector<std::string>& names);

/// True when "<stage>.json" exists, carries `config_hash`, and every listed
/// input and output file still has its recorded hash.
bool up_to_date(const std::filesystem::path& dir, const std::string& stage, const std::string& config_hash);

// SAMPLES v1: "SAMPLES v1 <count> <n_nodes> <role>\n" + count * n_nodes float64.
void write_samples(const std::filesystem::path& path, const std::vector<Vector>& samples, const std::string& role);
std::vector<Vector> read_samples(const std::filesystem::path& path);

// OBSDATA v1: "OBSDATA v1 <n_y> <sigma> <radius>\n" + y_star + clean, float64.
struct ObservedData {
  Vector y_star;
  Vector clean;
  double sigma = 0.0;
  double radius = 0.0;
};
void write_observed_data(const std::filesystem::path& path, const ObservedData& d);
ObservedData read_observed_data(const std::filesystem::path& path);

} // namespace opcorrect::cli
