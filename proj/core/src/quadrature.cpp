#include "nngplab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <utility>

#include "nngplab/error.hpp"

namespace nngp {
namespace {

// Golub-Welsch for the starting nodes, then Newton on the orthonormal
// recurrence; weights from the Christoffel function.
QuadratureRule build_rule(int n, const std::function<double(int)>& beta, double mu0) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sub(std::max(n - 1, 0));
  for (int k = 1; k < n; ++k) sub(k - 1) = std::sqrt(beta(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("tridiagonal eigensolver failed");

  std::vector<double> sqb(n + 1, 0.0);
  for (int k = 1; k <= n; ++k) sqb[k] = std::sqrt(beta(k));

  auto sweep = [&](double x, double& qn, double& dqn, double& christoffel) {
    double q_prev = 0.0, q = 1.0 / std::sqrt(mu0);
    double d_prev = 0.0, d = 0.0;
    christoffel = q * q;
    for (int k = 0; k < n; ++k) {
      const double q_next = (x * q - (k > 0 ? sqb[k] * q_prev : 0.0)) / sqb[k + 1];
      const double d_next = (q + x * d - (k > 0 ? sqb[k] * d_prev : 0.0)) / sqb[k + 1];
      q_prev = q;
      q = q_next;
      d_prev = d;
      d = d_next;
      if (k + 1 < n) christoffel += q * q;
    }
    qn = q;
    dqn = d;
  };

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double qn, dqn, c;
    for (int it = 0; it < 3; ++it) {
      sweep(x, qn, dqn, c);
      if (dqn == 0.0) break;
      const double step = qn / dqn;
      x -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(x))) break;
    }
    sweep(x, qn, dqn, c);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / c;
  }
  // enforce exact symmetry of the symmetric weights
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

template <class Key, class Make>
std::shared_ptr<const QuadratureRule> cached(std::map<Key, std::shared_ptr<const QuadratureRule>>& cache,
                                             std::mutex& mu, const Key& key, Make make) {
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto rule = std::make_shared<const QuadratureRule>(make());
  cache.emplace(key, rule);
  return rule;
}

}  // namespace

std::shared_ptr<const QuadratureRule> gauss_hermite(int order) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const QuadratureRule>> cache;
  return cached(cache, mu, order, [&] {
    return build_rule(order, [](int k) { return static_cast<double>(k); }, 1.0);
  });
}

std::shared_ptr<const QuadratureRule> gauss_gegenbauer(int order, double alpha) {
  if (order < 1) throw DomainError("quadrature order must be positive");
  if (!(alpha > -1.0)) throw DomainError("Gegenbauer weight exponent must exceed -1");
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const QuadratureRule>> cache;
  return cached(cache, mu, std::make_pair(order, alpha), [&] {
    const double mu0 = std::sqrt(std::numbers::pi) * std::exp(std::lgamma(alpha + 1.0) - std::lgamma(alpha + 1.5));
    auto beta = [alpha](int k) {
      if (k == 1) return 1.0 / (3.0 + 2.0 * alpha);
      const double kk = k;
      return kk * (kk + 2.0 * alpha) / ((2.0 * kk + 2.0 * alpha + 1.0) * (2.0 * kk + 2.0 * alpha - 1.0));
    };
    return build_rule(order, beta, mu0);
  });
}

}  // namespace nngp
