#pragma once

#include "opcorrect/bayes/pcn.hpp"

#include <filesystem>
#include <iosfwd>

namespace opcorrect::bayes {

// CHAIN v1: "CHAIN v1 <n_kept> <thin> <beta> <seed>\n", the kept samples as
// FEFIELD v1 records, then n_kept*thin potentials (float64) and accept flags (uint8).
// Counters and per-call Newton counts are not stored.
void write_chain(std::ostream& os, int nx, int ny, const ChainRecord& chain);
void write_chain(const std::filesystem::path& path, int nx, int ny, const ChainRecord& chain);
ChainRecord read_chain(std::istream& is);
ChainRecord read_chain(const std::filesystem::path& path);

/// CSV "chain,step,phi,accepted".
void write_chain_metrics(std::ostream& os, const std::vector<ChainRecord>& chains);

} // namespace opcorrect::bayes
