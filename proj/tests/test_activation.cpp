#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "nngplab/activation.hpp"
#include "nngplab/error.hpp"

using namespace nngp;

namespace {

// Brute-force sup over a grid, independent of the library's table.
double grid_max(const ActivationSpec& s, int order, double lo, double hi, double step) {
  double best = 0.0;
  for (double x = lo; x <= hi; x += step) best = std::max(best, std::abs(eval(s, order, x)));
  return best;
}

const ActivationKind kSmooth[] = {ActivationKind::gaussian, ActivationKind::cos, ActivationKind::sin,
                                  ActivationKind::erf,      ActivationKind::tanh, ActivationKind::sigmoid};

}  // namespace

TEST(Activation, ValuesAtZero) {
  EXPECT_DOUBLE_EQ(eval(make_activation(ActivationKind::gaussian), 0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval(make_activation(ActivationKind::cos), 0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(eval(make_activation(ActivationKind::sin), 0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval(make_activation(ActivationKind::relu), 0, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(eval(make_activation(ActivationKind::cos, 1.0), 2, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(eval(make_activation(ActivationKind::clipped_relu), 0, 2.0), 1.0);
}

TEST(Activation, ClippedReluIsDifferenceOfRelus) {
  const auto relu = make_activation(ActivationKind::relu);
  const auto clip = make_activation(ActivationKind::clipped_relu);
  for (double x = -3.0; x <= 3.0; x += 0.01)
    EXPECT_DOUBLE_EQ(eval(clip, 0, x), eval(relu, 0, x) - eval(relu, 0, x - 1.0));
}

TEST(Activation, ReluDerivativeConventionAndLimits) {
  const auto relu = make_activation(ActivationKind::relu);
  EXPECT_EQ(eval(relu, 1, 0.0), 0.0);
  EXPECT_EQ(eval(relu, 1, 1e-300), 1.0);
  EXPECT_THROW(eval(relu, 2, 0.5), DomainError);
  EXPECT_THROW(eval(make_activation(ActivationKind::step), 1, 0.5), DomainError);
  EXPECT_THROW(eval(make_activation(ActivationKind::gaussian), 5, 0.0), DomainError);
}

TEST(Activation, BoundedBySupNorm) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0.0, 5.0);
  for (auto kind : {ActivationKind::gaussian, ActivationKind::cos, ActivationKind::sin, ActivationKind::erf,
                    ActivationKind::tanh, ActivationKind::sigmoid, ActivationKind::clipped_relu, ActivationKind::step}) {
    const auto s = make_activation(kind, 1.7);
    for (int i = 0; i < 100000; ++i) ASSERT_LE(std::abs(eval(s, 0, nd(rng))), s.sup_norms[0] + 1e-12) << s.name();
  }
}

TEST(Activation, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ud(-4.0, 4.0);
  const double h = 1e-5;
  for (auto kind : kSmooth) {
    const auto s = make_activation(kind, 1.3);
    for (int j = 1; j <= 4; ++j)
      for (int i = 0; i < 100; ++i) {
        const double x = ud(rng);
        const double fd = (eval(s, j - 1, x + h) - eval(s, j - 1, x - h)) / (2 * h);
        const double d = eval(s, j, x);
        ASSERT_LE(std::abs(fd - d), 1e-6 * std::max(1.0, std::abs(d))) << s.name() << " order " << j << " x " << x;
      }
  }
}

TEST(Activation, SupNormsAgreeWithGridSearch) {
  for (auto kind : kSmooth) {
    const auto s = make_activation(kind, 1.0);
    for (int j = 0; j <= 4; ++j)
      EXPECT_NEAR(s.sup_norms[j], grid_max(s, j, -25.0, 25.0, 2e-4), 1e-6) << s.name() << " order " << j;
  }
  const auto g = make_activation(ActivationKind::gaussian);
  EXPECT_NEAR(g.sup_norms[4], 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(g.sup_norms[1], std::exp(-0.5));
}

TEST(Activation, BoundConstants) {
  const auto g = bound_constants(make_activation(ActivationKind::gaussian));
  EXPECT_DOUBLE_EQ(g.c2, 2.5);
  EXPECT_DOUBLE_EQ(g.c_var, 4.0);  // 4 max(1*1, e^-1)^2
  EXPECT_NEAR(g.c1, std::sqrt(3.0), 1e-12);
  const auto c = bound_constants(make_activation(ActivationKind::cos, 1.0));
  EXPECT_DOUBLE_EQ(c.c_var, 4.0);
  EXPECT_GE(c.c2, 2.5);
  EXPECT_THROW(bound_constants(make_activation(ActivationKind::relu)), DomainError);
  EXPECT_THROW(bound_constants(make_activation(ActivationKind::step)), DomainError);
}

TEST(Activation, BoundConstantsFormulas) {
  const auto s = make_activation(ActivationKind::cos, 2.0);
  const auto b = bound_constants(s);
  // norms a^j = 1, 2, 4, 8, 16
  EXPECT_DOUBLE_EQ(b.c_var, 4.0 * 16.0);
  EXPECT_DOUBLE_EQ(b.c2, 8.0);
  EXPECT_DOUBLE_EQ(b.c1, std::sqrt(16.0));
  for (auto kind : kSmooth) EXPECT_GE(bound_constants(make_activation(kind)).c2, 2.5);
}

TEST(Activation, FrequencyScaling) {
  const auto a1 = make_activation(ActivationKind::cos, 1.5);
  const auto a2 = make_activation(ActivationKind::cos, 3.0);
  EXPECT_DOUBLE_EQ(a2.sup_norms[1], 2.0 * a1.sup_norms[1]);
  EXPECT_EQ(bound_constants(a1).c2, bound_constants(make_activation(ActivationKind::cos, 1.5)).c2);
}

TEST(Activation, Parsing) {
  EXPECT_EQ(parse_activation("gaussian").kind, ActivationKind::gaussian);
  EXPECT_EQ(parse_activation("clipped_relu").kind, ActivationKind::clipped_relu);
  const auto c = parse_activation("cos:a=1.5");
  EXPECT_EQ(c.kind, ActivationKind::cos);
  EXPECT_DOUBLE_EQ(c.a, 1.5);
  EXPECT_EQ(parse_activation(c.name()).a, 1.5);
  EXPECT_THROW(parse_activation("cos:b=1"), DomainError);
  EXPECT_THROW(parse_activation("cos:a=x"), DomainError);
  EXPECT_THROW(parse_activation("relu:a=1"), DomainError);
  EXPECT_THROW(parse_activation("swish"), DomainError);
  EXPECT_THROW(parse_activation("cos:a=-1"), DomainError);
}

TEST(Activation, InplaceMatchesPointwise) {
  for (auto kind : {ActivationKind::relu, ActivationKind::gaussian, ActivationKind::cos, ActivationKind::tanh}) {
    const auto s = make_activation(kind, 0.7);
    std::vector<double> xs;
    for (double x = -3; x <= 3; x += 0.37) xs.push_back(x);
    auto ys = xs;
    apply_inplace(s, 0, ys.data(), ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_DOUBLE_EQ(ys[i], eval(s, 0, xs[i]));
    ys = xs;
    apply_inplace(s, 1, ys.data(), ys.size());
    for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_DOUBLE_EQ(ys[i], eval(s, 1, xs[i]));
  }
}
