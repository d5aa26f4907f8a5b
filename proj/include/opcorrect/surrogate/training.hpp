#pragma once

#include "opcorrect/surrogate/adam.hpp"
#include "opcorrect/surrogate/resnet.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace opcorrect::surrogate {

/// Reduced coordinates, one sample per column.
struct TrainingSet {
  Matrix inputs;   // r_in x n
  Matrix outputs;  // r_out x n
  int size() const { return static_cast<int>(inputs.cols()); }
};

struct TrainingOptions {
  int initial_layers = 2;
  int max_layers = 10;
  int layer_rank = 10;
  int epochs = 100;
  int final_epochs = 100;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double heldout_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct TrainingLogEntry {
  int stage = 0;
  int epoch = 0;
  double train_mse = 0.0;
  double heldout_mse = 0.0;
};

struct TrainingResult {
  ResNet net;
  std::vector<TrainingLogEntry> log;
  double best_heldout_mse = 0.0;
  int n_train = 0;
  int n_heldout = 0;
};

/// Grows the network one zero-initialized block at a time. Stage 0 trains all
/// weights of the initial network; each later growth stage trains the new block
/// and the output map; the last stage trains everything end to end. Returns the
/// weights with the lowest held-out loss seen after any epoch.
TrainingResult train_adaptive(const TrainingSet& data, const TrainingOptions& options);

/// Least-squares fit of (W_out, b_out) with everything else fixed.
void fit_output_map(ResNet& net, const Matrix& X, const Matrix& Y);

void write_training_log(std::ostream& os, const std::vector<TrainingLogEntry>& log);

} // namespace opcorrect::surrogate
