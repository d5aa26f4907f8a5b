#include "opcorrect/cli/manifest.hpp"

#include "opcorrect/common/binary_io.hpp"

#include <Eigen/Core>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace opcorrect::cli {

namespace fs = std::filesystem;

std::string version_string() {
  return "opcorrect 1.0.0 (Eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION) + ")";
}

Json Manifest::to_json() const {
  Json j;
  j["stage"] = stage;
  j["config_hash"] = config_hash;
  j["version"] = version_string();
  j["rng"] = "mt19937_64(splitmix64(seed,stream))";
  j["seeds"] = seeds;
  j["counters"] = counters;
  j["results"] = results;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["seconds"] = seconds;
  return j;
}

Manifest Manifest::from_json(const Json& j) {
  Manifest m;
  m.stage = j.at("stage").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seeds = j.value("seeds", Json::object());
  m.counters = j.value("counters", Json::object());
  m.results = j.value("results", Json::object());
  m.inputs = j.value("inputs", Json::object());
  m.outputs = j.value("outputs", Json::object());
  m.seconds = j.value("seconds", 0.0);
  return m;
}

fs::path manifest_path(const fs::path& dir, const std::string& stage) { return dir / (stage + ".json"); }

void write_manifest(const fs::path& dir, const Manifest& m) {
  std::ofstream out(manifest_path(dir, m.stage));
  if (!out) throw Error("cannot write manifest for " + m.stage);
  out << std::setw(2) << m.to_json() << '\n';
}

std::optional<Manifest> read_manifest(const fs::path& dir, const std::string& stage) {
  const fs::path p = manifest_path(dir, stage);
  if (!fs::exists(p)) return std::nullopt;
  std::ifstream in(p);
  try {
    return Manifest::from_json(Json::parse(in));
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

Json hash_files(const fs::path& dir, const std::vector<std::string>& names) {
  Json j = Json::object();
  for (const auto& n : names) {
    if (!fs::exists(dir / n)) throw Error("missing artifact " + n);
    j[n] = io::file_hash(dir / n);
  }
  return j;
}

bool up_to_date(const fs::path& dir, const std::string& stage, const std::string& config_hash) {
  const auto m = read_manifest(dir, stage);
  if (!m || m->config_hash != config_hash) return false;
  for (const Json* group : {&m->inputs, &m->outputs})
    for (const auto& [name, hash] : group->items()) {
      if (!fs::exists(dir / name) || io::file_hash(dir / name) != hash.get<std::string>()) return false;
    }
  return true;
}

void write_samples(const fs::path& path, const std::vector<Vector>& samples, const std::string& role) {
  require(!samples.empty(), "write_samples: no samples");
  const Eigen::Index n = samples.front().size();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "SAMPLES v1 " << samples.size() << ' ' << n << ' ' << role << '\n';
  for (const auto& s : samples) {
    require(s.size() == n, "write_samples: samples differ in length");
    io::write_vector(out, s);
  }
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<Vector> read_samples(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::istringstream header(io::read_header_line(in));
  std::string magic, version, role;
  long count = 0, n = 0;
  header >> magic >> version >> count >> n >> role;
  if (!header || magic != "SAMPLES" || version != "v1" || count < 1 || n < 1)
    throw Error(path.string() + " is not a SAMPLES v1 file");
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) out.push_back(io::read_vector(in, n));
  return out;
}

void write_observed_data(const fs::path& path, const ObservedData& d) {
  require(d.y_star.size() == d.clean.size(), "write_observed_data: length mismatch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  std::ostringstream header;
  header << std::setprecision(17) << "OBSDATA v1 " << d.y_star.size() << ' ' << d.sigma << ' ' << d.radius << '\n';
  out << header.str();
  io::write_vector(out, d.y_star);
  io::write_vector(out, d.clean);
}

ObservedData read_observed_data(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::istringstream header(io::read_header_line(in));
  std::string magic, version;
  long n = 0;
  ObservedData d;
  header >> magic >> version >> n >> d.sigma >> d.radius;
  if (!header || magic != "OBSDATA" || version != "v1" || n < 1) throw Error(path.string() + " is not OBSDATA v1");
  d.y_star = io::read_vector(in, n);
  d.clean = io::read_vector(in, n);
  return d;
}

} // namespace opcorrect::cli
