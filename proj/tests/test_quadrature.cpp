#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nngplab/quadrature.hpp"

using namespace nngp;

TEST(Quadrature, HermiteMomentsOfStandardNormal) {
  for (int order : {5, 20, 40, 100}) {
    const auto r = gauss_hermite(order);
    double m0 = 0, m2 = 0, m4 = 0, m1 = 0;
    for (std::size_t i = 0; i < r->nodes.size(); ++i) {
      const double x = r->nodes[i], w = r->weights[i];
      m0 += w;
      m1 += w * x;
      m2 += w * x * x;
      m4 += w * x * x * x * x;
    }
    EXPECT_NEAR(m0, 1.0, 1e-13);
    EXPECT_NEAR(m1, 0.0, 1e-13);
    EXPECT_NEAR(m2, 1.0, 1e-12);
    EXPECT_NEAR(m4, 3.0, 1e-11);
  }
}

TEST(Quadrature, HermiteIntegratesCharacteristicFunction) {
  // E[cos(tZ)] = exp(-t^2/2)
  const auto r = gauss_hermite(40);
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    double acc = 0;
    for (std::size_t i = 0; i < r->nodes.size(); ++i) acc += r->weights[i] * std::cos(t * r->nodes[i]);
    EXPECT_NEAR(acc, std::exp(-0.5 * t * t), 1e-13);
  }
}

TEST(Quadrature, GegenbauerWeightIntegrals) {
  // integral (1-t^2)^alpha t^2 dt = sqrt(pi) Gamma(alpha+1) / (2 Gamma(alpha+5/2))
  for (double alpha : {-0.5, 0.0, 0.5, 1.0, 2.5}) {
    const auto r = gauss_gegenbauer(30, alpha);
    double m0 = 0, m2 = 0;
    for (std::size_t i = 0; i < r->nodes.size(); ++i) {
      m0 += r->weights[i];
      m2 += r->weights[i] * r->nodes[i] * r->nodes[i];
    }
    const double e0 = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 1) / std::tgamma(alpha + 1.5);
    const double e2 = std::sqrt(std::numbers::pi) * std::tgamma(alpha + 1) / (2 * std::tgamma(alpha + 2.5));
    EXPECT_NEAR(m0, e0, 1e-13 * e0);
    EXPECT_NEAR(m2, e2, 1e-13 * e0);
  }
}

TEST(Quadrature, NodesAreSymmetricAndSorted) {
  const auto r = gauss_gegenbauer(41, 0.0);
  for (std::size_t i = 0; i < r->nodes.size(); ++i) {
    EXPECT_EQ(r->nodes[i], -r->nodes[r->nodes.size() - 1 - i]);
    EXPECT_EQ(r->weights[i], r->weights[r->nodes.size() - 1 - i]);
    if (i) EXPECT_LT(r->nodes[i - 1], r->nodes[i]);
  }
}
