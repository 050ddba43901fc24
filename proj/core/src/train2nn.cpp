#include "nngplab/train2nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "nngplab/error.hpp"
#include "nngplab/random.hpp"

namespace nngp {
namespace {

Eigen::MatrixXd preactivations(const TwoLayerNet& net, const Eigen::MatrixXd& X) {
  if (X.cols() != net.input_dim()) throw DomainError("input dimension mismatch");
  return X * net.W.transpose();
}

Eigen::MatrixXd activated(const TwoLayerNet& net, Eigen::MatrixXd Z, int order) {
  apply_inplace(net.spec, order, Z.data(), static_cast<std::size_t>(Z.size()));
  return Z;
}

}  // namespace

TwoLayerNet init_standard(int n, int hidden, const ActivationSpec& spec, std::uint64_t seed) {
  if (n < 1 || hidden < 1) throw DomainError("network sizes must be positive");
  const Stream s = Stream(seed).child(tag::init);
  const Stream sw = s.child(1), sb = s.child(2);
  TwoLayerNet net;
  net.spec = spec;
  net.W.resize(hidden, n);
  for (int r = 0; r < hidden; ++r)
    for (int c = 0; c < n; ++c) net.W(r, c) = sw.normal(static_cast<std::uint64_t>(r) * n + c);
  net.b_out.resize(hidden);
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  for (int r = 0; r < hidden; ++r) net.b_out(r) = scale * sb.normal(r);
  return net;
}

TwoLayerNet init_from_rfm(const RfmFit& fit) {
  const auto& shape = fit.map.shape;
  if (shape.L() != 1) throw DomainError("RFM initialization needs a one-hidden-layer feature map");
  TwoLayerNet net;
  net.spec = fit.map.spec;
  net.W.resize(shape.feature_count(), shape.n0);
  for (int i = 0; i < shape.T; ++i) net.W.middleRows(static_cast<Eigen::Index>(i) * shape.nL(), shape.nL()) = fit.map.blocks[i].W[0];
  net.b_out = fit.w;
  return net;
}

Eigen::VectorXd forward_batch(const TwoLayerNet& net, const Eigen::MatrixXd& X) {
  return activated(net, preactivations(net, X), 0) * net.b_out;
}

double forward(const TwoLayerNet& net, const Eigen::VectorXd& x) { return forward_batch(net, Eigen::MatrixXd(x.transpose()))(0); }

double mse(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (y.size() != X.rows() || y.size() == 0) throw DomainError("batch size mismatch");
  return (forward_batch(net, X) - y).squaredNorm() / static_cast<double>(y.size());
}

Gradients grad_mse(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (y.size() != X.rows() || y.size() == 0) throw DomainError("batch must be nonempty and match targets");
  const Eigen::MatrixXd Z = preactivations(net, X);
  const Eigen::MatrixXd A = activated(net, Z, 0);
  const Eigen::VectorXd r = A * net.b_out - y;
  const double B = static_cast<double>(y.size());
  Gradients g;
  g.loss = r.squaredNorm() / B;
  g.db = (2.0 / B) * (A.transpose() * r);
  // dL/dZ = (2/B) r b' .* sigma'(Z)
  Eigen::MatrixXd dZ = activated(net, Z, 1);
  dZ.array() *= ((2.0 / B) * r * net.b_out.transpose()).array();
  g.dW = dZ.transpose() * X;
  return g;
}

AdamState AdamState::for_net(const TwoLayerNet& net, double lr) {
  AdamState s;
  s.mW = Eigen::MatrixXd::Zero(net.W.rows(), net.W.cols());
  s.vW = s.mW;
  s.mb = Eigen::VectorXd::Zero(net.b_out.size());
  s.vb = s.mb;
  s.lr = lr;
  return s;
}

void adam_step(AdamState& s, TwoLayerNet& net, const Gradients& g) {
  if (g.dW.rows() != net.W.rows() || g.dW.cols() != net.W.cols() || g.db.size() != net.b_out.size() ||
      s.mW.rows() != net.W.rows() || s.mW.cols() != net.W.cols() || s.mb.size() != net.b_out.size())
    throw DomainError("Adam state, parameters and gradients differ in shape");
  ++s.step;
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.step));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.step));
  auto update = [&](auto& p, auto& m, auto& v, const auto& grad) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v.array() = s.beta2 * v.array() + (1.0 - s.beta2) * grad.array().square();
    p.array() -= s.lr * (m.array() / c1) / ((v.array() / c2).sqrt() + s.eps);
  };
  update(net.W, s.mW, s.vW, g.dW);
  update(net.b_out, s.mb, s.vb, g.db);
}

std::vector<EpochRecord> train(TwoLayerNet& net, const Dataset& train_set, const Dataset& test_set,
                               const TrainConfig& cfg) {
  train_set.validate();
  test_set.validate();
  if (cfg.epochs < 0 || cfg.batch_size < 1) throw DomainError("epochs must be >= 0 and batch size >= 1");
  AdamState state = AdamState::for_net(net, cfg.lr);
  const Eigen::Index N = train_set.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::vector<EpochRecord> trace;
  trace.push_back({0, mse(net, train_set.inputs, train_set.targets), mse(net, test_set.inputs, test_set.targets)});
  const Stream shuffle = Stream(cfg.seed).child(tag::shuffle);
  Eigen::MatrixXd Xb;
  Eigen::VectorXd yb;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const Stream es = shuffle.child(static_cast<std::uint64_t>(epoch));
    for (Eigen::Index i = N - 1; i > 0; --i)
      std::swap(order[i], order[es.below(static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(i + 1))]);
    for (Eigen::Index start = 0; start < N; start += cfg.batch_size) {
      const Eigen::Index B = std::min<Eigen::Index>(cfg.batch_size, N - start);
      Xb.resize(B, train_set.inputs.cols());
      yb.resize(B);
      for (Eigen::Index j = 0; j < B; ++j) {
        Xb.row(j) = train_set.inputs.row(order[start + j]);
        yb(j) = train_set.targets(order[start + j]);
      }
      adam_step(state, net, grad_mse(net, Xb, yb));
    }
    const double tr = mse(net, train_set.inputs, train_set.targets);
    const double te = mse(net, test_set.inputs, test_set.targets);
    if (!std::isfinite(tr) || !std::isfinite(te)) throw NumericalError("training diverged to non-finite loss");
    trace.push_back({epoch, tr, te});
  }
  return trace;
}

double gradient_check(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double h) {
  const Gradients g = grad_mse(net, X, y);
  TwoLayerNet probe = net;
  double diff2 = 0.0, norm2 = 0.0;
  auto check = [&](double& param, double analytic) {
    const double saved = param;
    param = saved + h;
    const double up = mse(probe, X, y);
    param = saved - h;
    const double down = mse(probe, X, y);
    param = saved;
    const double fd = (up - down) / (2.0 * h);
    diff2 += (fd - analytic) * (fd - analytic);
    norm2 += analytic * analytic;
  };
  for (Eigen::Index i = 0; i < probe.W.size(); ++i) check(probe.W.data()[i], g.dW.data()[i]);
  for (Eigen::Index i = 0; i < probe.b_out.size(); ++i) check(probe.b_out(i), g.db(i));
  return norm2 > 0.0 ? std::sqrt(diff2 / norm2) : std::sqrt(diff2);
}

}  // namespace nngp
