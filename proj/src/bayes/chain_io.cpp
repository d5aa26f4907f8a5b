#include "opcorrect/bayes/chain_io.hpp"

#include "opcorrect/common/binary_io.hpp"
#include "opcorrect/fem/field.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace opcorrect::bayes {

void write_chain(std::ostream& os, int nx, int ny, const ChainRecord& chain) {
  const std::size_t kept = chain.samples.size();
  require(chain.thin >= 1 && chain.potentials.size() == kept * static_cast<std::size_t>(chain.thin) &&
              chain.accept_flags.size() == chain.potentials.size(),
          "write_chain: step arrays must hold n_kept * thin entries");
  std::ostringstream header;
  header << "CHAIN v1 " << kept << ' ' << chain.thin << ' ' << std::setprecision(17) << chain.beta << ' '
         << chain.seed << '\n';
  os << header.str();
  for (const auto& s : chain.samples) fem::write_fefield(os, nx, ny, {s, fem::FieldRole::parameter});
  io::write_f64(os, chain.potentials);
  os.write(reinterpret_cast<const char*>(chain.accept_flags.data()),
           static_cast<std::streamsize>(chain.accept_flags.size()));
  if (!os) throw Error("write_chain: stream error");
}

void write_chain(const std::filesystem::path& path, int nx, int ny, const ChainRecord& chain) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  write_chain(out, nx, ny, chain);
}

ChainRecord read_chain(std::istream& is) {
  std::istringstream header(io::read_header_line(is));
  std::string magic, version;
  long kept = -1;
  ChainRecord c;
  header >> magic >> version >> kept >> c.thin >> c.beta >> c.seed;
  if (!header || magic != "CHAIN" || version != "v1" || kept < 0 || c.thin < 1)
    throw Error("not a CHAIN v1 record");
  c.samples.reserve(static_cast<std::size_t>(kept));
  for (long i = 0; i < kept; ++i) c.samples.push_back(fem::read_fefield(is).field.values);
  const std::size_t steps = static_cast<std::size_t>(kept) * static_cast<std::size_t>(c.thin);
  c.potentials = io::read_f64(is, steps);
  c.accept_flags.resize(steps);
  is.read(reinterpret_cast<char*>(c.accept_flags.data()), static_cast<std::streamsize>(steps));
  if (!is) throw Error("CHAIN: truncated accept flags");
  return c;
}

ChainRecord read_chain(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_chain(in);
}

void write_chain_metrics(std::ostream& os, const std::vector<ChainRecord>& chains) {
  os << "chain,step,phi,accepted\n" << std::setprecision(17);
  for (std::size_t c = 0; c < chains.size(); ++c) {
    const auto& ch = chains[c];
    for (std::size_t k = 0; k < ch.potentials.size(); ++k)
      os << c << ',' << k << ',' << ch.potentials[k] << ',' << int(ch.accept_flags[k]) << '\n';
  }
}

} // namespace opcorrect::bayes
