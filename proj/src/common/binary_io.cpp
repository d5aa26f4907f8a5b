#include "opcorrect/common/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace opcorrect::io {

namespace {

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xffULL) << (8 * (7 - i));
    return r;
  }
}

} // namespace

void write_f64(std::ostream& os, std::span<const double> values) {
  std::vector<char> buf(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::uint64_t bits = to_le(std::bit_cast<std::uint64_t>(values[i]));
    std::memcpy(buf.data() + 8 * i, &bits, 8);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error("write failed");
}

void read_f64(std::istream& is, std::span<double> out) {
  std::vector<char> buf(out.size() * 8);
  is.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (is.gcount() != static_cast<std::streamsize>(buf.size()))
    throw Error("truncated float64 payload");
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, buf.data() + 8 * i, 8);
    out[i] = std::bit_cast<double>(to_le(bits));
  }
}

std::vector<double> read_f64(std::istream& is, std::size_t count) {
  std::vector<double> v(count);
  read_f64(is, v);
  return v;
}

Vector read_vector(std::istream& is, Eigen::Index n) {
  Vector v(n);
  read_f64(is, std::span<double>(v.data(), static_cast<std::size_t>(n)));
  return v;
}

void write_matrix(std::ostream& os, const Matrix& m) {
  write_f64(os, std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));
}

Matrix read_matrix(std::istream& is, Eigen::Index rows, Eigen::Index cols) {
  Matrix m(rows, cols);
  read_f64(is, std::span<double>(m.data(), static_cast<std::size_t>(m.size())));
  return m;
}

std::string read_header_line(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw Error("missing header line");
  return line;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char out[17];
  static constexpr char digits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[h & 0xf];
    h >>= 4;
  }
  out[16] = '\0';
  return out;
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(data);
}

} // namespace opcorrect::io
