#include "nngplab/sphere.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>
#include <string>

#include "nngplab/error.hpp"
#include "nngplab/quadrature.hpp"
#include "nngplab/random.hpp"

namespace nngp {

double surface_area(int n) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

Eigen::MatrixXd sample_sphere(int n, int count, std::uint64_t seed) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  if (count < 0) throw DomainError("sample count must be nonnegative");
  const Stream s = Stream(seed).child(tag::sphere);
  Eigen::MatrixXd X(count, n);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < n; ++j) X(i, j) = s.normal(static_cast<std::uint64_t>(i) * n + j);
    X.row(i) /= X.row(i).norm();
  }
  return X;
}

std::vector<double> gegenbauer_all(int n, int kmax, double t) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  if (kmax < 0) throw DomainError("order k must be nonnegative");
  if (std::abs(t) > 1.0 + 1e-12) throw DomainError("Gegenbauer argument outside [-1, 1]");
  std::vector<double> P(kmax + 1);
  P[0] = 1.0;
  if (kmax >= 1) P[1] = t;
  for (int k = 1; k < kmax; ++k)
    P[k + 1] = ((2.0 * k + n - 2) * t * P[k] - k * P[k - 1]) / (k + n - 2.0);
  return P;
}

double gegenbauer(int n, int k, double t) { return gegenbauer_all(n, k, t).back(); }

GegenbauerBasis make_gegenbauer_basis(int n, int kmax) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  GegenbauerBasis b;
  b.n = n;
  b.kmax = kmax;
  b.coefficients.assign(kmax + 1, {});
  b.coefficients[0] = {1.0};
  if (kmax >= 1) b.coefficients[1] = {0.0, 1.0};
  for (int k = 1; k < kmax; ++k) {
    std::vector<double> next(k + 2, 0.0);
    const double a = (2.0 * k + n - 2) / (k + n - 2.0);
    const double c = k / (k + n - 2.0);
    for (int j = 0; j <= k; ++j) next[j + 1] += a * b.coefficients[k][j];
    for (int j = 0; j < k; ++j) next[j] -= c * b.coefficients[k - 1][j];
    b.coefficients[k + 1] = std::move(next);
  }
  return b;
}

double GegenbauerBasis::operator()(int k, double t) const {
  if (k < 0 || k > kmax) throw DomainError("order k outside the basis range");
  const auto& c = coefficients[k];
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::uint64_t harmonic_dim(int n, int k) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  if (k < 0) throw DomainError("order k must be nonnegative");
  if (k == 0) return 1;
  // binomial(k+n-3, k-1), built so each partial product is itself a binomial
  unsigned __int128 binom = 1;
  const int top = k + n - 3;
  const int r = k - 1;
  for (int i = 1; i <= r; ++i) binom = binom * (top - r + i) / i;
  return static_cast<std::uint64_t>(binom * (2 * k + n - 2) / k);
}

double HarmonicTarget::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != n) throw DomainError("input dimension mismatch");
  return evaluate(x.transpose())(0);
}

Eigen::VectorXd HarmonicTarget::evaluate(const Eigen::MatrixXd& X) const {
  if (X.cols() != n) throw DomainError("input dimension mismatch");
  const Eigen::MatrixXd inner = X * centers.transpose();
  Eigen::VectorXd out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < centers.rows(); ++j)
      acc += coefficients(j) * gegenbauer(n, k, std::clamp(inner(i, j), -1.0, 1.0));
    out(i) = acc;
  }
  return out;
}

HarmonicTarget make_harmonic_target(int n, int k, int m, std::uint64_t seed) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  if (k < 0) throw DomainError("order k must be nonnegative");
  const auto dim = harmonic_dim(n, k);
  if (m <= 0) m = static_cast<int>(2 * dim);
  HarmonicTarget y;
  y.n = n;
  y.k = k;
  y.seed = seed;
  const Stream root(seed);
  y.centers = sample_sphere(n, m, root.child(tag::harmonic).key());
  const Stream cs = root.child(tag::coefficients);
  y.coefficients.resize(m);
  for (int j = 0; j < m; ++j) y.coefficients(j) = cs.normal(j);

  const double scale = surface_area(n) / static_cast<double>(dim);
  const Eigen::MatrixXd inner = y.centers * y.centers.transpose();
  Eigen::MatrixXd G(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) G(i, j) = G(j, i) = scale * gegenbauer(n, k, std::clamp(inner(i, j), -1.0, 1.0));

  double q = y.coefficients.dot(G * y.coefficients);
  if (!(q > 1e-12 * G.trace() * y.coefficients.squaredNorm())) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const double floor = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0);
    Eigen::VectorXd proj = es.eigenvectors().transpose() * y.coefficients;
    for (int i = 0; i < m; ++i)
      if (es.eigenvalues()(i) <= floor) {
        proj(i) = 0.0;
        ++y.floored_modes;
      }
    y.coefficients = es.eigenvectors() * proj;
    q = y.coefficients.dot(G * y.coefficients);
    if (!(q > 0.0)) throw NumericalError("harmonic Gram is numerically zero");
  }
  y.coefficients /= std::sqrt(q);
  y.l2_norm_certificate = y.coefficients.dot(G * y.coefficients);
  return y;
}

double funk_hecke(const std::function<double(double)>& f, int n, int k, int quad_order) {
  if (n < 2) throw DomainError("sphere dimension n must be at least 2");
  if (k < 0) throw DomainError("order k must be nonnegative");
  if (quad_order <= 0) quad_order = default_funk_hecke_order(k);
  if (quad_order < k + 10)
    throw DomainError("quadrature order " + std::to_string(quad_order) + " under-resolves order k=" + std::to_string(k));
  const auto rule = gauss_gegenbauer(quad_order, 0.5 * (n - 3));
  const double prefactor = std::exp(std::lgamma(0.5 * n) - std::lgamma(0.5 * (n - 1))) / std::sqrt(std::numbers::pi);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule->nodes.size(); ++i) {
    const double t = rule->nodes[i];
    acc += rule->weights[i] * f(t) * gegenbauer(n, k, t);
  }
  return prefactor * acc;
}

double mercer_sum(const std::vector<double>& lambdas, int n, double t) {
  if (lambdas.empty()) return 0.0;
  const auto P = gegenbauer_all(n, static_cast<int>(lambdas.size()) - 1, t);
  double acc = 0.0;
  for (std::size_t k = 0; k < lambdas.size(); ++k)
    acc += lambdas[k] * static_cast<double>(harmonic_dim(n, static_cast<int>(k))) * P[k];
  return acc;
}

double barron_lower_bound(int n, int k) {
  if (k < 2) throw DomainError("Barron lower bound needs k >= 2");
  const double dim = static_cast<double>(harmonic_dim(n, k));
  return std::pow(static_cast<double>(k), 0.5 * n + 1.0 / 3.0) / std::sqrt(std::log(dim));
}

}  // namespace nngp
