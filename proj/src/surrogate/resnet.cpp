#include "opcorrect/surrogate/resnet.hpp"

#include <cmath>

namespace opcorrect::surrogate {

double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ResNet::ResNet(int r_in, int r_out, int layer_rank) : r_in_(r_in), r_out_(r_out), rank_(layer_rank) {
  require(r_in >= 1 && r_out >= 1 && layer_rank >= 1, "ResNet: dimensions must be positive");
  W_in = Matrix::Zero(r_in, r_in);
  b_in = Vector::Zero(r_in);
  W_out = Matrix::Zero(r_out, r_in);
  b_out = Vector::Zero(r_out);
}

long ResNet::n_params() const {
  const long w = r_in_;
  return w * w + w + static_cast<long>(layers.size()) * (2 * w * rank_ + rank_) + r_out_ * w + r_out_;
}

void ResNet::append_layer(RngStream& rng) {
  ResNetLayer layer;
  layer.U = Matrix::Zero(r_in_, rank_);
  layer.V.resize(rank_, r_in_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(r_in_));
  for (Eigen::Index j = 0; j < layer.V.cols(); ++j)
    for (Eigen::Index i = 0; i < layer.V.rows(); ++i) layer.V(i, j) = scale * rng.normal();
  layer.b = Vector::Zero(rank_);
  layers.push_back(std::move(layer));
}

Vector ResNet::forward(const Vector& coords) const {
  require(coords.size() == r_in_, "ResNet: input dimension mismatch");
  return forward_batch(coords).col(0);
}

Matrix ResNet::forward_batch(const Matrix& X) const {
  return (W_out * hidden_batch(X)).colwise() + b_out;
}

Matrix ResNet::hidden_batch(const Matrix& X) const {
  require(X.rows() == r_in_, "ResNet: input dimension mismatch");
  Matrix z = (W_in * X).colwise() + b_in;
  for (const auto& L : layers) {
    Matrix a = (L.V * z).colwise() + L.b;
    a = a.unaryExpr([](double v) { return softplus(v); });
    z.noalias() += L.U * a;
  }
  return z;
}

double ResNet::mse(const Matrix& X, const Matrix& Y, Vector* gradient) const {
  require(X.rows() == r_in_ && Y.rows() == r_out_ && X.cols() == Y.cols() && X.cols() > 0,
          "ResNet: batch shape mismatch");
  const double count = static_cast<double>(Y.size());
  std::vector<Matrix> zs{(W_in * X).colwise() + b_in};
  std::vector<Matrix> pre, act;
  for (const auto& L : layers) {
    pre.push_back((L.V * zs.back()).colwise() + L.b);
    act.push_back(pre.back().unaryExpr([](double v) { return softplus(v); }));
    zs.push_back(zs.back() + L.U * act.back());
  }
  const Matrix diff = ((W_out * zs.back()).colwise() + b_out) - Y;
  const double loss = diff.squaredNorm() / count;
  if (!gradient) return loss;

  gradient->resize(n_params());
  const Matrix dout = 2.0 * diff / count;
  Matrix dz = W_out.transpose() * dout;
  const auto [ob, oe] = output_range();
  Eigen::Map<Matrix>(gradient->data() + ob, r_out_, r_in_) = dout * zs.back().transpose();
  Eigen::Map<Vector>(gradient->data() + ob + r_out_ * r_in_, r_out_) = dout.rowwise().sum();
  (void)oe;
  for (int k = n_layers() - 1; k >= 0; --k) {
    const auto& L = layers[k];
    const long base = layer_range(k).first;
    const Matrix dact = L.U.transpose() * dz;
    const Matrix dpre = dact.cwiseProduct(pre[k].unaryExpr([](double v) { return sigmoid(v); }));
    Eigen::Map<Matrix>(gradient->data() + base, r_in_, rank_) = dz * act[k].transpose();
    Eigen::Map<Matrix>(gradient->data() + base + r_in_ * rank_, rank_, r_in_) = dpre * zs[k].transpose();
    Eigen::Map<Vector>(gradient->data() + base + 2 * r_in_ * rank_, rank_) = dpre.rowwise().sum();
    dz += L.V.transpose() * dpre;
  }
  Eigen::Map<Matrix>(gradient->data(), r_in_, r_in_) = dz * X.transpose();
  Eigen::Map<Vector>(gradient->data() + r_in_ * r_in_, r_in_) = dz.rowwise().sum();
  return loss;
}

std::pair<long, long> ResNet::layer_range(int k) const {
  require(k >= 0 && k < n_layers(), "ResNet: layer index out of range");
  const long w = r_in_;
  const long per = 2 * w * rank_ + rank_;
  const long begin = w * w + w + k * per;
  return {begin, begin + per};
}

std::pair<long, long> ResNet::output_range() const {
  const long begin = n_params() - (static_cast<long>(r_out_) * r_in_ + r_out_);
  return {begin, n_params()};
}

Vector ResNet::flatten() const {
  Vector p(n_params());
  long pos = 0;
  auto put = [&](const auto& m) {
    Eigen::Map<Matrix>(p.data() + pos, m.rows(), m.cols()) = m;
    pos += m.size();
  };
  put(W_in);
  put(b_in);
  for (const auto& L : layers) {
    put(L.U);
    put(L.V);
    put(L.b);
  }
  put(W_out);
  put(b_out);
  return p;
}

void ResNet::unflatten(const Vector& p) {
  require(p.size() == n_params(), "ResNet: parameter vector length mismatch");
  long pos = 0;
  auto get = [&](auto& m) {
    m = Eigen::Map<const Matrix>(p.data() + pos, m.rows(), m.cols());
    pos += m.size();
  };
  get(W_in);
  get(b_in);
  for (auto& L : layers) {
    get(L.U);
    get(L.V);
    get(L.b);
  }
  get(W_out);
  get(b_out);
}

bool ResNet::all_finite() const { return flatten().allFinite(); }

} // namespace opcorrect::surrogate
