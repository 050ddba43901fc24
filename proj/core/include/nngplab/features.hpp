#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "nngplab/activation.hpp"

namespace nngp {

struct NetworkShape {
  int n0 = 1;
  std::vector<int> hidden;  // n_1..n_L
  int T = 1;

  int L() const { return static_cast<int>(hidden.size()); }
  int nL() const { return hidden.back(); }
  int feature_count() const { return T * nL(); }
  void validate() const;
};

struct WeightBlock {
  std::vector<Eigen::MatrixXd> W;  // W[h-1] is n_h x n_{h-1}
  std::size_t index = 0;
};

struct FeatureMap {
  NetworkShape shape;
  ActivationSpec spec;
  std::vector<WeightBlock> blocks;
  std::uint64_t seed = 0;
};

// Block `index` of the map seeded by `seed`; only the first `layers` layers
// are drawn when layers > 0.
WeightBlock sample_block(const NetworkShape& shape, std::uint64_t seed, std::size_t index, int layers = 0);

FeatureMap sample_feature_map(const NetworkShape& shape, const ActivationSpec& spec, std::uint64_t seed);

// Concatenated last-layer features of all blocks, length T * n_L.
Eigen::VectorXd features(const FeatureMap& map, const Eigen::VectorXd& x);

// Row s holds features(map, X.row(s)); X is N x n0.
Eigen::MatrixXd feature_matrix(const FeatureMap& map, const Eigen::MatrixXd& X);

// Layer-h activations of one block for the rows of X (N x n_h).
Eigen::MatrixXd block_activations(const WeightBlock& block, const ActivationSpec& spec, const Eigen::MatrixXd& X, int h);

// (1/n_h) sum_i alpha_i(x) alpha_i(y) over block 0 at layer h.
double empirical_kernel(const FeatureMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int h);

struct VarianceProbe {
  double measured_variance = 0.0;
  double mean = 0.0;
  double theorem2_bound = 0.0;
  bool pass() const { return measured_variance <= theorem2_bound; }
};

// 2 |s|^4 sum_{i=1}^h C^{h-i} / n_i.
double variance_bound(const ActivationSpec& spec, const std::vector<int>& hidden, int h);

VarianceProbe variance_probe(const NetworkShape& shape, const ActivationSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, int h, int repetitions, std::uint64_t seed);

struct DeviationRow {
  double mean = 0.0;       // mean of Sigma_emp over repetitions
  double std_error = 0.0;  // standard error of that mean
  double exact = 0.0;      // Sigma^(L) from the kernel recursion
  double gap() const { return mean - exact; }
};

using PointPair = std::pair<Eigen::VectorXd, Eigen::VectorXd>;

// One independent block per repetition, shared by all pairs.
std::vector<DeviationRow> deviation_probe(const NetworkShape& shape, const ActivationSpec& spec,
                                          const std::vector<PointPair>& pairs, int repetitions, std::uint64_t seed);

}  // namespace nngp
