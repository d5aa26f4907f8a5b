#include "opcorrect/surrogate/training.hpp"

#include "opcorrect/common/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace opcorrect::surrogate {

namespace {

Matrix columns(const Matrix& A, const std::vector<int>& idx, std::size_t begin, std::size_t end) {
  Matrix out(A.rows(), static_cast<Eigen::Index>(end - begin));
  for (std::size_t k = begin; k < end; ++k) out.col(static_cast<Eigen::Index>(k - begin)) = A.col(idx[k]);
  return out;
}

void shuffle(std::vector<int>& v, RngStream& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.next_u64() % i;
    std::swap(v[i - 1], v[j]);
  }
}

} // namespace

void fit_output_map(ResNet& net, const Matrix& X, const Matrix& Y) {
  const Matrix Z = net.hidden_batch(X);
  Matrix A(Z.cols(), Z.rows() + 1);
  A.leftCols(Z.rows()) = Z.transpose();
  A.col(Z.rows()).setOnes();
  const Matrix coef = A.colPivHouseholderQr().solve(Y.transpose());
  net.W_out = coef.topRows(Z.rows()).transpose();
  net.b_out = coef.row(Z.rows()).transpose();
}

TrainingResult train_adaptive(const TrainingSet& data, const TrainingOptions& o) {
  const int n = data.size();
  require(n >= 2, "train_adaptive: need at least two training samples");
  require(data.outputs.cols() == n, "train_adaptive: input/output sample counts differ");
  require(o.batch_size >= 1 && o.batch_size <= n, "train_adaptive: batch size must be in [1, n_train]");
  require(o.initial_layers >= 0 && o.max_layers >= o.initial_layers, "train_adaptive: bad layer budget");
  require(o.epochs >= 0 && o.final_epochs >= 0, "train_adaptive: epochs must be nonnegative");

  RngStream rng(o.seed, 0x7261696eULL);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  const int n_held = std::clamp(static_cast<int>(std::lround(o.heldout_fraction * n)), 1, n - 1);
  std::vector<int> held(order.begin(), order.begin() + n_held);
  std::vector<int> train(order.begin() + n_held, order.end());
  const Matrix Xh = columns(data.inputs, held, 0, held.size());
  const Matrix Yh = columns(data.outputs, held, 0, held.size());
  const Matrix Xt = columns(data.inputs, train, 0, train.size());
  const Matrix Yt = columns(data.outputs, train, 0, train.size());
  const std::size_t batch = std::min<std::size_t>(static_cast<std::size_t>(o.batch_size), train.size());

  TrainingResult res;
  res.n_train = static_cast<int>(train.size());
  res.n_heldout = n_held;
  ResNet net(static_cast<int>(data.inputs.rows()), static_cast<int>(data.outputs.rows()), o.layer_rank);
  net.W_in = Matrix::Identity(net.r_in(), net.r_in());
  for (int k = 0; k < o.initial_layers; ++k) net.append_layer(rng);
  fit_output_map(net, Xt, Yt);

  res.net = net;
  res.best_heldout_mse = net.mse(Xh, Yh);
  AdamOptions adam;
  adam.lr = o.learning_rate;

  auto run_stage = [&](int stage, int epochs, const std::vector<char>* mask) {
    AdamState state;
    std::vector<int> idx(train.size());
    std::iota(idx.begin(), idx.end(), 0);
    Vector params = net.flatten();
    Vector grad;
    for (int epoch = 0; epoch < epochs; ++epoch) {
      shuffle(idx, rng);
      for (std::size_t b = 0; b < idx.size(); b += batch) {
        const std::size_t e = std::min(idx.size(), b + batch);
        const Matrix Xb = columns(Xt, idx, b, e);
        const Matrix Yb = columns(Yt, idx, b, e);
        const double loss = net.mse(Xb, Yb, &grad);
        if (!std::isfinite(loss) || !grad.allFinite())
          throw Error("training diverged at stage " + std::to_string(stage) + " epoch " + std::to_string(epoch));
        adam_step(params, grad, state, adam, mask);
        net.unflatten(params);
      }
      TrainingLogEntry entry{stage, epoch, net.mse(Xt, Yt), net.mse(Xh, Yh)};
      if (!std::isfinite(entry.train_mse) || !std::isfinite(entry.heldout_mse))
        throw Error("training diverged at stage " + std::to_string(stage) + " epoch " + std::to_string(epoch));
      res.log.push_back(entry);
      if (entry.heldout_mse < res.best_heldout_mse) {
        res.best_heldout_mse = entry.heldout_mse;
        res.net = net;
      }
    }
  };

  int stage = 0;
  run_stage(stage++, o.epochs, nullptr);
  while (net.n_layers() < o.max_layers) {
    net.append_layer(rng);
    std::vector<char> mask(static_cast<std::size_t>(net.n_params()), 0);
    const auto [lb, le] = net.layer_range(net.n_layers() - 1);
    const auto [ob, oe] = net.output_range();
    std::fill(mask.begin() + lb, mask.begin() + le, 1);
    std::fill(mask.begin() + ob, mask.begin() + oe, 1);
    run_stage(stage++, o.epochs, &mask);
  }
  run_stage(stage, o.final_epochs, nullptr);
  return res;
}

void write_training_log(std::ostream& os, const std::vector<TrainingLogEntry>& log) {
  os << "stage,epoch,train_mse,heldout_mse\n";
  os.precision(10);
  for (const auto& e : log) os << e.stage << ',' << e.epoch << ',' << e.train_mse << ',' << e.heldout_mse << '\n';
}

} // namespace opcorrect::surrogate
