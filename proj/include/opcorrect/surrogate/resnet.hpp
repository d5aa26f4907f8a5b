#pragma once

#include "opcorrect/common/rng.hpp"

#include <vector>

namespace opcorrect::surrogate {

double softplus(double x);
double sigmoid(double x);

struct ResNetLayer {
  Matrix U;  // width x rank
  Matrix V;  // rank x width
  Vector b;  // rank
};

/// Low-rank residual network on reduced coordinates:
///   z0 = W_in c + b_in,  z_{k+1} = z_k + U_k softplus(V_k z_k + b_k),
///   out = W_out z_L + b_out.
/// The hidden width equals r_in. Flat parameter order is W_in, b_in, then
/// (U, V, b) per layer, then W_out, b_out; matrices column-major.
class ResNet {
public:
  ResNet() = default;
  /// All weights zero, no layers.
  ResNet(int r_in, int r_out, int layer_rank);

  int r_in() const { return r_in_; }
  int r_out() const { return r_out_; }
  int layer_rank() const { return rank_; }
  int n_layers() const { return static_cast<int>(layers.size()); }
  long n_params() const;

  /// Appends a block with U = 0 (an exact identity), V drawn N(0, 1/width), b = 0.
  void append_layer(RngStream& rng);

  Vector forward(const Vector& coords) const;
  /// Columns are samples.
  Matrix forward_batch(const Matrix& X) const;
  /// Last hidden state z_L for each column.
  Matrix hidden_batch(const Matrix& X) const;

  /// Mean over all output entries of (out - Y)^2; fills the flat gradient when asked.
  double mse(const Matrix& X, const Matrix& Y, Vector* gradient = nullptr) const;

  Vector flatten() const;
  void unflatten(const Vector& params);
  /// Flat index ranges [begin, end) of layer k's (U, V, b) and of the output map.
  std::pair<long, long> layer_range(int k) const;
  std::pair<long, long> output_range() const;

  bool all_finite() const;

  Matrix W_in;
  Vector b_in;
  std::vector<ResNetLayer> layers;
  Matrix W_out;
  Vector b_out;

private:
  int r_in_ = 0;
  int r_out_ = 0;
  int rank_ = 0;
};

} // namespace opcorrect::surrogate
