#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "nngplab/activation.hpp"
#include "nngplab/rfm.hpp"

namespace nngp {

struct TwoLayerNet {
  Eigen::MatrixXd W;      // hidden x n
  Eigen::VectorXd b_out;  // hidden
  ActivationSpec spec;

  int hidden() const { return static_cast<int>(W.rows()); }
  int input_dim() const { return static_cast<int>(W.cols()); }
};

// W ~ N(0, 1), b_out ~ N(0, 1/hidden).
TwoLayerNet init_standard(int n, int hidden, const ActivationSpec& spec, std::uint64_t seed);

// Stacks the blocks of a one-layer RfmFit into hidden units.
TwoLayerNet init_from_rfm(const RfmFit& fit);

double forward(const TwoLayerNet& net, const Eigen::VectorXd& x);
Eigen::VectorXd forward_batch(const TwoLayerNet& net, const Eigen::MatrixXd& X);

double mse(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct Gradients {
  Eigen::MatrixXd dW;
  Eigen::VectorXd db;
  double loss = 0.0;
};

// Gradient of (1/B) sum (forward(x) - y)^2 over the rows of X.
Gradients grad_mse(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

struct AdamState {
  Eigen::MatrixXd mW, vW;
  Eigen::VectorXd mb, vb;
  long step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_net(const TwoLayerNet& net, double lr = 0.01);
};

void adam_step(AdamState& state, TwoLayerNet& net, const Gradients& g);

struct TrainConfig {
  int epochs = 60;
  int batch_size = 128;
  double lr = 0.01;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  int epoch = 0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

// Epoch 0 records the initial network; each later row is measured on the
// full train and test sets after that epoch's minibatch sweep.
std::vector<EpochRecord> train(TwoLayerNet& net, const Dataset& train_set, const Dataset& test_set,
                               const TrainConfig& config);

// ||fd - g|| / ||g|| between grad_mse and central differences with step h,
// over all parameters of a (small) net.
double gradient_check(const TwoLayerNet& net, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double h = 1e-5);

}  // namespace nngp
