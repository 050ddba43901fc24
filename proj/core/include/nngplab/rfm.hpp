#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nngplab/features.hpp"
#include "nngplab/kernel.hpp"

namespace nngp {

struct Dataset {
  Eigen::MatrixXd inputs;  // N x n0
  Eigen::VectorXd targets;
  std::string provenance = "custom";

  Eigen::Index size() const { return inputs.rows(); }
  void validate() const;
};

struct RfmFit {
  FeatureMap map;
  Eigen::VectorXd w;
  double ridge = 0.0;
  double train_rmse = 0.0;
  bool min_norm_fallback = false;
};

inline constexpr double kDefaultRidge = -1.0;

// Ridge 0 solves plain least squares (minimum norm if rank deficient);
// kDefaultRidge picks 1e-8 * trace(X'X) / cols.
RfmFit fit(const FeatureMap& map, const Dataset& data, double ridge = kDefaultRidge);

// Same, for an already-computed design matrix.
RfmFit fit_design(const FeatureMap& map, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge);

double predict(const RfmFit& fit, const Eigen::VectorXd& x);
Eigen::VectorXd predict_batch(const RfmFit& fit, const Eigen::MatrixXd& X);

double rmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target);

struct KernelComboTarget {
  KernelModel model;
  Eigen::MatrixXd centers;  // m x n0
  Eigen::VectorXd coefficients;
  double rkhs_norm = 0.0;
  bool gram_floored = false;

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& X) const;
};

// f = sum_j a_j K(., x_j) with ||f||_H = sqrt(a' G a).
KernelComboTarget make_kernel_combo_target(const KernelModel& model, const Eigen::MatrixXd& centers,
                                           const Eigen::VectorXd& coefficients);

enum class RateEstimator { monte_carlo, least_squares };

struct RateConfig {
  ActivationSpec spec;
  int n0 = 3;
  std::vector<int> hidden{1};  // n_1..n_L
  std::vector<int> T_values;
  int seeds = 5;
  std::uint64_t seed = 0;
  int centers = 10;
  int n_train = 500;
  int n_test = 5000;
  RateEstimator estimator = RateEstimator::monte_carlo;
  double ridge = kDefaultRidge;
};

struct RateCell {
  int T = 0;
  int seed = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
};

struct RateSummary {
  int T = 0;
  double mean_test_rmse = 0.0;
  double std_test_rmse = 0.0;
};

struct RateResult {
  std::vector<RateCell> cells;
  std::vector<RateSummary> per_T;
  double slope = 0.0;
  double intercept = 0.0;
  double rkhs_norm = 0.0;
  double t1_bound = 0.0;          // ||sigma||_inf ||f||_H
  double exceed_fraction = 0.0;   // cells with test_rmse above t1_bound
};

// Test RMSE of the random-feature model against a kernel-combo target of the
// matching NNGP kernel, for each T and seed. The Monte-Carlo estimator uses
// the weights w = Phi(centers)' a / (T n_L), whose expectation over the
// weight draws reproduces the target when the kernel equals the
// random-feature kernel.
RateResult rate_experiment(const RateConfig& config);

}  // namespace nngp
