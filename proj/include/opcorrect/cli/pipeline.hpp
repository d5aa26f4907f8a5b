#pragma once

#include "opcorrect/costing/ledger.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace opcorrect::cli {

/// Cost ledger for one state map assembled from the stage manifests in a run
/// directory. Surrogate maps carry the offline training-data and basis costs.
costing::CostLedger load_ledger(const std::filesystem::path& dir, const std::string& map);

/// Subcommands: gen-truth, gen-data, gen-training, compute-bases, train,
/// eval-accuracy, mcmc --map {model,no,ecno}, posterior-mean,
/// report {speedup,bound}, render. Each takes --config and writes its
/// artifacts plus "<stage>.json" into the configured output directory.
/// Returns the exit status; failures print one "error: ..." line to stderr.
int run_command(int argc, const char* const* argv);
/// args[0] is the program name.
int run_command(const std::vector<std::string>& args);

} // namespace opcorrect::cli
