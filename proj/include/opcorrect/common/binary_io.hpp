#pragma once

#include "opcorrect/common/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace opcorrect::io {

// All binary payloads are little-endian IEEE-754 float64 regardless of host.
void write_f64(std::ostream& os, std::span<const double> values);
void read_f64(std::istream& is, std::span<double> out);
std::vector<double> read_f64(std::istream& is, std::size_t count);

inline void write_vector(std::ostream& os, const Vector& v) {
  write_f64(os, std::span<const double>(v.data(), static_cast<std::size_t>(v.size())));
}
Vector read_vector(std::istream& is, Eigen::Index n);
// Column-major.
void write_matrix(std::ostream& os, const Matrix& m);
Matrix read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols);

/// Reads one '\n'-terminated ASCII header line; throws on EOF.
std::string read_header_line(std::istream& is);

/// FNV-1a 64-bit, hex-encoded. Stable across platforms.
std::string fnv1a_hex(std::string_view data);
std::string file_hash(const std::filesystem::path& path);

} // namespace opcorrect::io
