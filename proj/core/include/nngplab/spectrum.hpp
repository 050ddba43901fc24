#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "nngplab/activation.hpp"

namespace nngp {

enum class DecayClass { slow_decay, fast_decay, inconclusive };
std::string to_string(DecayClass c);

// Each lambda_k repeated N(n, k) times, sorted decreasing.
std::vector<double> ranked_from_orders(const std::vector<double>& lambdas, int n);

// Decreasing eigenvalues of (1/N) [K_emp(x_i, x_j)] with K_emp built from M
// single-layer random features sigma(w.x), w ~ N(0, I), at N uniform points.
std::vector<double> empirical_spectrum(const ActivationSpec& spec, int n, int N, int M, std::uint64_t seed);

// Decreasing eigenvalues of a symmetric matrix.
std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& A);

struct CutRule {
  enum class Kind { fixed, plateau } kind = Kind::plateau;
  int index = 0;
  static CutRule fixed(int i) { return {Kind::fixed, i}; }
  static CutRule plateau() { return {Kind::plateau, 0}; }
};

struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  int cut = 0;  // ranks 1..cut enter the regression
};

LogLogFit loglog_fit(const std::vector<double>& eigenvalues, CutRule rule);

// Plateau groups of the usable prefix, as [first, last] zero-based ranks.
// A new group starts wherever consecutive log-eigenvalues drop by more than
// log(1.5).
std::vector<std::pair<int, int>> plateau_groups(const std::vector<double>& eigenvalues);

// Negated log-log slopes between centroids of consecutive plateau groups
// inside the first `cut` ranks.
std::vector<double> local_decay_rates(const std::vector<double>& eigenvalues, int cut);

// True when a later local decay rate falls more than `drop` below an earlier
// maximum, i.e. the spectrum gets heavier-tailed deeper in the prefix.
bool flattens(const std::vector<double>& local_rates, double drop = 0.5);

inline double decay_threshold(int n) { return (n + 2.0 / 3.0) / (n - 1.0); }

DecayClass classify_activation(double slope, int n, double margin = 0.15);

struct SpectrumReport {
  std::vector<double> eigenvalues;
  int n = 3;
  int cut_index = 0;
  double slope = 0.0;
  double intercept = 0.0;
  DecayClass class_label = DecayClass::inconclusive;
  std::vector<double> local_rates;
  bool flattening = false;
  std::string warning;
  // Fit over the common window of floor(sqrt(#eigenvalues)) ranks.
  int window = 0;
  double window_slope = 0.0;
  double window_intercept = 0.0;
};

SpectrumReport analyze_spectrum(std::vector<double> eigenvalues, int n, CutRule rule = CutRule::plateau(),
                                double margin = 0.15);

}  // namespace nngp
