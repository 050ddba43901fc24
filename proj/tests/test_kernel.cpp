#include <gtest/gtest.h>

#include <Eigen/QR>
#include <cmath>
#include <numbers>
#include <random>

#include "nngplab/error.hpp"
#include "nngplab/kernel.hpp"

using namespace nngp;

namespace {

Cov2 random_psd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.0), v(-1.0, 1.0);
  Cov2 c{u(rng), 0.0, u(rng)};
  const double lim = std::min(3.0, std::sqrt(c.sxx * c.syy));
  c.sxy = lim * v(rng);
  return c;
}

Eigen::VectorXd unit(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = nd(rng);
  return x / x.norm();
}

Eigen::MatrixXd rotation(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n * n; ++i) A.data()[i] = nd(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(A).householderQ();
}

// One-layer relu NNGP on the unit sphere (arc-cosine kernel of degree 1).
double arccos1(double t) { return (std::sqrt(1.0 - t * t) + (std::numbers::pi - std::acos(t)) * t) / (2.0 * std::numbers::pi); }

}  // namespace

TEST(Kernel, ClosedFormsAgreeWithQuadrature) {
  std::mt19937_64 rng(42);
  for (auto spec : {make_activation(ActivationKind::cos, 1.0), make_activation(ActivationKind::sin, 1.0)}) {
    double worst = 0;
    for (int i = 0; i < 1000; ++i) {
      const Cov2 c = random_psd(rng);
      worst = std::max(worst, std::abs(sigma_bar_quadrature(spec, c, 40) - *sigma_bar_closed(spec, c)));
    }
    EXPECT_LE(worst, 1e-8) << spec.name();
  }
}

// e^{-u^2/2} narrows against the Hermite weight as the variance grows: order 40 holds 1e-8
// while the trace stays below 3, the whole box needs order 80.
TEST(Kernel, GaussianQuadratureAccuracyEnvelope) {
  const auto g = make_activation(ActivationKind::gaussian);
  std::mt19937_64 rng(42);
  double worst40 = 0, worst80 = 0;
  for (int i = 0; i < 1000; ++i) {
    const Cov2 c = random_psd(rng);
    const double exact = *sigma_bar_closed(g, c);
    if (c.sxx + c.syy <= 3.0) worst40 = std::max(worst40, std::abs(sigma_bar_quadrature(g, c, 40) - exact));
    worst80 = std::max(worst80, std::abs(sigma_bar_quadrature(g, c, 80) - exact));
  }
  EXPECT_LE(worst40, 1e-8);
  EXPECT_LE(worst80, 1e-8);
}

TEST(Kernel, SigmaBarExamples) {
  const auto cos1 = make_activation(ActivationKind::cos, 1.0);
  EXPECT_NEAR(sigma_bar(cos1, {1, 0, 1}), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(sigma_bar_quadrature(cos1, {1, 0, 1}), std::exp(-1.0), 1e-12);
  EXPECT_NEAR(sigma_bar(make_activation(ActivationKind::gaussian), {1, 1, 1}), 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(sigma_bar_quadrature(make_activation(ActivationKind::gaussian), {1, 1, 1}), 1.0 / std::sqrt(3.0), 1e-12);
  for (auto kind : {ActivationKind::tanh, ActivationKind::sigmoid, ActivationKind::cos, ActivationKind::relu}) {
    const auto s = make_activation(kind);
    EXPECT_DOUBLE_EQ(sigma_bar_quadrature(s, {0, 0, 0}), eval(s, 0, 0.0) * eval(s, 0, 0.0)) << s.name();
  }
  // one coordinate degenerate: sigmoid(0) E[sigmoid(Z)] = 1/4
  EXPECT_NEAR(sigma_bar_quadrature(make_activation(ActivationKind::sigmoid), {0, 0, 2}), 0.25, 1e-14);
}

TEST(Kernel, RejectsNonPsd) {
  EXPECT_THROW(sigma_bar(make_activation(ActivationKind::gaussian), {1, 2, 1}), NumericalError);
  EXPECT_THROW(sigma_bar(make_activation(ActivationKind::tanh), {-1, 0, 1}), NumericalError);
  EXPECT_NO_THROW(sigma_bar(make_activation(ActivationKind::tanh), {1, 1 + 1e-12, 1}));
  EXPECT_THROW(sigma_bar_quadrature(make_activation(ActivationKind::tanh), {1, 0, 1}, 1), DomainError);
}

TEST(Kernel, ReluQuadratureTracksArcCosine) {
  const auto relu = make_activation(ActivationKind::relu);
  const auto model = KernelModel::recursion(relu, 1);
  for (double t = -0.95; t <= 0.951; t += 0.05) EXPECT_NEAR(model.profile(t), arccos1(t), 1e-10) << t;
  EXPECT_NEAR(model.profile(1.0), 0.5, 1e-12);
}

TEST(Kernel, StepQuadratureMatchesOrthantProbability) {
  const auto step = make_activation(ActivationKind::step);
  for (double rho : {-0.9, -0.3, 0.0, 0.4, 0.9, 0.99}) {
    const Cov2 c{2.0, rho * std::sqrt(2.0 * 0.5), 0.5};
    // the conditional orthant edge sharpens as rho -> 1
    const double tol = std::abs(rho) > 0.95 ? 1e-7 : 1e-10;
    EXPECT_NEAR(sigma_bar_quadrature(step, c, 40), (M_PI - std::acos(rho)) / (2.0 * M_PI), tol) << rho;
  }
}

TEST(Kernel, DepthZeroIsInnerProduct) {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd x = unit(rng, 4) * 2.0, y = unit(rng, 4);
  EXPECT_DOUBLE_EQ(nngp_eval(KernelModel::recursion(make_activation(ActivationKind::tanh), 0), x, y), x.dot(y));
}

TEST(Kernel, ClosedCosOnOrthogonalUnitVectors) {
  Eigen::VectorXd x = Eigen::VectorXd::Unit(3, 0), y = Eigen::VectorXd::Unit(3, 1);
  EXPECT_NEAR(nngp_eval(KernelModel::closed_cos(1.0), x, y), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(nngp_eval(KernelModel::recursion(make_activation(ActivationKind::cos), 1), x, y), std::exp(-1.0), 1e-15);
}

TEST(Kernel, TwoLayerGaussianMatchesNestedClosedForm) {
  // f(c | dx, dy) = 1 / sqrt((1+dx)(1+dy) - c^2), composed twice in long double
  auto layer = [](long double dx, long double c, long double dy) {
    return 1.0L / std::sqrt((1.0L + dx) * (1.0L + dy) - c * c);
  };
  const auto model = KernelModel::recursion(make_activation(ActivationKind::gaussian), 2);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 6; ++i) {
    const Eigen::VectorXd x = unit(rng, 3);
    const Eigen::VectorXd y = i == 0 ? x : Eigen::VectorXd(unit(rng, 3) * (0.5 + 0.3 * i));
    const long double xx = x.squaredNorm(), yy = y.squaredNorm(), xy = x.dot(y);
    const long double dx = layer(xx, xx, xx), dy = layer(yy, yy, yy), c = layer(xx, xy, yy);
    const long double expect = layer(dx, c, dy);
    EXPECT_NEAR(nngp_eval(model, x, y), static_cast<double>(expect), 1e-14);
  }
  const Eigen::VectorXd e = Eigen::VectorXd::Unit(3, 2);
  EXPECT_NEAR(nngp_eval(model, e, e), 1.0 / std::sqrt(1.0 + 2.0 / std::sqrt(3.0)), 1e-15);
}

TEST(Kernel, ZonalReductionUnderRotations) {
  std::mt19937_64 rng(9);
  const KernelModel closed = KernelModel::closed_gaussian();
  const KernelModel quad = KernelModel::recursion(make_activation(ActivationKind::tanh), 2);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = unit(rng, 5), y = unit(rng, 5);
    const Eigen::MatrixXd Q = rotation(rng, 5);
    const double c0 = nngp_eval(closed, x, y), c1 = nngp_eval(closed, Q * x, Q * y);
    EXPECT_LE(std::abs(c1 - c0), 1e-10 * std::abs(c0));
    const double q0 = nngp_eval(quad, x, y), q1 = nngp_eval(quad, Q * x, Q * y);
    EXPECT_LE(std::abs(q1 - q0), 1e-7 * std::max(std::abs(q0), 1e-3));
    EXPECT_NEAR(q0, quad.profile(x.dot(y)), 1e-12);
  }
}

TEST(Kernel, SymmetricEvaluation) {
  std::mt19937_64 rng(13);
  for (const auto& model : {KernelModel::recursion(make_activation(ActivationKind::erf), 3),
                            KernelModel::closed_sin(1.3), KernelModel::recursion(make_activation(ActivationKind::relu), 2)}) {
    for (int i = 0; i < 10; ++i) {
      const Eigen::VectorXd x = unit(rng, 3) * 1.4, y = unit(rng, 3);
      EXPECT_NEAR(nngp_eval(model, x, y), nngp_eval(model, y, x), 1e-12);
    }
  }
}

TEST(Kernel, QuadratureConvergesMonotonically) {
  for (auto kind : {ActivationKind::tanh, ActivationKind::erf, ActivationKind::sigmoid}) {
    const auto s = make_activation(kind);
    const Cov2 c{1.3, 0.7, 0.9};
    const double ref = sigma_bar_quadrature(s, c, 100);
    double prev = INFINITY;
    for (int order : {2, 4, 8, 16, 32}) {
      const double err = std::abs(sigma_bar_quadrature(s, c, order) - ref);
      EXPECT_TRUE(err < prev || err < 1e-14) << s.name() << " order " << order;
      prev = err;
    }
  }
}

TEST(Kernel, GramIsSymmetricAndPsd) {
  std::mt19937_64 rng(17);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < 25; ++i) pts.push_back(unit(rng, 3));
  for (const auto& model : {KernelModel::recursion(make_activation(ActivationKind::tanh), 2),
                            KernelModel::closed_cos(1.0), KernelModel::recursion(make_activation(ActivationKind::relu), 3)}) {
    const Eigen::MatrixXd G = gram(model, pts);
    EXPECT_EQ((G - G.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8 * G.trace());
    EXPECT_NEAR(G(3, 7), nngp_eval(model, pts[3], pts[7]), 1e-14);
  }
}

TEST(Kernel, GramExamples) {
  const Eigen::VectorXd p = Eigen::VectorXd::Unit(3, 0);
  const Eigen::MatrixXd g1 = gram(KernelModel::closed_gaussian(), {p});
  ASSERT_EQ(g1.rows(), 1);
  EXPECT_NEAR(g1(0, 0), 1.0 / std::sqrt(3.0), 1e-15);

  const Eigen::MatrixXd g2 = gram(KernelModel::closed_cos(1.0), {p, Eigen::VectorXd::Unit(3, 1)});
  EXPECT_NEAR(g2(0, 0), std::exp(-1.0) * std::cosh(1.0), 1e-15);
  EXPECT_NEAR(g2(1, 1), std::exp(-1.0) * std::cosh(1.0), 1e-15);
  EXPECT_NEAR(g2(0, 1), std::exp(-1.0), 1e-15);

  const Eigen::MatrixXd g3 = gram(KernelModel::recursion(make_activation(ActivationKind::erf), 2), {p, p});
  EXPECT_EQ(g3(0, 0), g3(0, 1));
  EXPECT_EQ(g3(1, 0), g3(1, 1));
  EXPECT_EQ(g3(0, 0), g3(1, 1));
  EXPECT_THROW(gram(KernelModel::closed_gaussian(), {}), DomainError);
  EXPECT_THROW(nngp_eval(KernelModel::closed_gaussian(), p, Eigen::VectorXd::Ones(2)), DomainError);
}

TEST(Kernel, DeviationBound) {
  const auto g = make_activation(ActivationKind::gaussian);
  EXPECT_EQ(deviation_bound(g, {}, 1), 0.0);
  EXPECT_NEAR(deviation_bound(g, {100}, 2), 0.1875, 1e-12);
  const double b = deviation_bound(g, {50, 80}, 3);
  EXPECT_NEAR(deviation_bound(g, {100, 160}, 3), 0.5 * b, 1e-12 * b);
  EXPECT_THROW(deviation_bound(make_activation(ActivationKind::relu), {10}, 2), DomainError);
  EXPECT_THROW(deviation_bound(g, {10}, 3), DomainError);
}
