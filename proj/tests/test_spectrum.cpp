#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "nngplab/error.hpp"
#include "nngplab/features.hpp"
#include "nngplab/kernel.hpp"
#include "nngplab/sphere.hpp"
#include "nngplab/spectrum.hpp"

using namespace nngp;

namespace {

double cos_profile(double t) { return std::exp(-1.0) * std::cosh(t); }

std::vector<double> plateaus(const std::vector<double>& values, const std::vector<int>& widths) {
  std::vector<double> out;
  for (std::size_t g = 0; g < values.size(); ++g) out.insert(out.end(), widths[g], values[g]);
  return out;
}

}  // namespace

TEST(Spectrum, RankedFromOrdersExamples) {
  EXPECT_EQ(ranked_from_orders({1.0, 0.1}, 3), (std::vector<double>{1.0, 0.1, 0.1, 0.1}));
  EXPECT_EQ(ranked_from_orders({0.1, 1.0}, 3), (std::vector<double>{1.0, 1.0, 1.0, 0.1}));
  const auto flat = ranked_from_orders({0.5, 0.5, 0.5, 0.5}, 4);
  EXPECT_EQ(flat.size(), 1u + 4u + 9u + 16u);
  for (double v : flat) EXPECT_EQ(v, 0.5);
  const auto clipped = ranked_from_orders({1.0, -1e-13}, 3);
  EXPECT_EQ(clipped.back(), 0.0);
  EXPECT_THROW(ranked_from_orders({1.0, -1e-6}, 3), DomainError);
}

TEST(Spectrum, RankedLengthIsTotalMultiplicity) {
  for (int n : {3, 4, 5}) {
    const std::vector<double> lambdas(9, 0.25);
    std::uint64_t total = 0;
    for (int k = 0; k < 9; ++k) total += harmonic_dim(n, k);
    EXPECT_EQ(ranked_from_orders(lambdas, n).size(), total);
  }
}

TEST(Spectrum, CosSpectrumPlateausOnEvenOrders) {
  std::vector<double> lambdas;
  for (int k = 0; k <= 8; ++k) lambdas.push_back(funk_hecke(cos_profile, 3, k));
  const auto ranked = ranked_from_orders(lambdas, 3);
  EXPECT_EQ(ranked[0], lambdas[0]);
  for (int i = 1; i <= 5; ++i) EXPECT_EQ(ranked[i], lambdas[2]);
  for (int i = 6; i <= 14; ++i) EXPECT_EQ(ranked[i], lambdas[4]);
  EXPECT_EQ(ranked[15], lambdas[6]);
  EXPECT_LE(std::abs(ranked.back()), 1e-12);  // odd orders vanish
}

TEST(Spectrum, PowerLawSlopeIsExact) {
  std::vector<double> ev;
  for (int i = 1; i <= 400; ++i) ev.push_back(1.0 / (double(i) * i));
  for (int cut : {5, 50, 400}) {
    const auto fit = loglog_fit(ev, CutRule::fixed(cut));
    EXPECT_NEAR(fit.slope, -2.0, 1e-10);
    EXPECT_NEAR(fit.intercept, 0.0, 1e-10);
    EXPECT_EQ(fit.cut, cut);
  }
}

TEST(Spectrum, ExponentialDecaySteepensWithPrefix) {
  std::vector<double> ev;
  for (int i = 1; i <= 40; ++i) ev.push_back(std::pow(2.0, -i));
  double prev = 0.0;
  // OLS over ranks 1..10 gives -2.72; from 12 on the slope is below -3
  for (int cut = 12; cut <= 40; cut += 4) {
    const double slope = loglog_fit(ev, CutRule::fixed(cut)).slope;
    EXPECT_LT(slope, -3.0) << cut;
    EXPECT_LT(slope, prev) << cut;
    prev = slope;
  }
}

TEST(Spectrum, FitRejectsBadInput) {
  EXPECT_THROW(loglog_fit({1, 0.5, 0.25, 0.1}, CutRule::plateau()), DomainError);
  EXPECT_THROW(loglog_fit({1, 0.5, 0.25, 0.1, 1e-20, 0}, CutRule::plateau()), DomainError);
  EXPECT_THROW(loglog_fit({1, 2, 0.25, 0.1, 0.05, 0.01}, CutRule::plateau()), DomainError);
}

TEST(Spectrum, ClassifierExamples) {
  EXPECT_NEAR(decay_threshold(3), 11.0 / 6.0, 1e-15);
  EXPECT_EQ(classify_activation(-1.5, 3), DecayClass::slow_decay);
  EXPECT_EQ(classify_activation(-5.0, 3), DecayClass::fast_decay);
  EXPECT_EQ(classify_activation(-1.83, 3), DecayClass::inconclusive);
  EXPECT_EQ(classify_activation(-1.83, 3, 0.0), DecayClass::slow_decay);
  EXPECT_EQ(to_string(DecayClass::fast_decay), "fast_decay");
  EXPECT_EQ(to_string(DecayClass::slow_decay), "slow_decay");
  EXPECT_EQ(to_string(DecayClass::inconclusive), "inconclusive");
}

TEST(Spectrum, PlateauGroupsAndLocalRates) {
  const auto ev = plateaus({1, 1e-3, 1e-6, 3e-7, 1e-7, 3e-8}, {1, 3, 5, 7, 9, 11});
  const auto groups = plateau_groups(ev);
  ASSERT_EQ(groups.size(), 6u);
  EXPECT_EQ(groups[1], (std::pair<int, int>{1, 3}));
  EXPECT_EQ(groups[5], (std::pair<int, int>{25, 35}));
  const auto rates = local_decay_rates(ev, 36);
  ASSERT_EQ(rates.size(), 5u);
  const double c0 = 0.0, c1 = (std::log(2.0) + std::log(3.0) + std::log(4.0)) / 3.0;
  EXPECT_NEAR(rates[0], std::log(1e3) / (c1 - c0), 1e-12);
  EXPECT_TRUE(flattens(rates));
  EXPECT_FALSE(flattens({2.0, 3.0, 2.7}));
  EXPECT_TRUE(flattens({2.0, 3.0, 2.4}));
}

TEST(Spectrum, FlatteningTurnsFastIntoInconclusive) {
  const auto flat = analyze_spectrum(plateaus({1, 1e-3, 1e-6, 3e-7, 1e-7, 3e-8}, {1, 3, 5, 7, 9, 11}), 3);
  EXPECT_TRUE(flat.flattening);
  EXPECT_EQ(flat.class_label, DecayClass::inconclusive);
  EXPECT_FALSE(flat.warning.empty());

  const auto steep = analyze_spectrum(plateaus({1, 1e-3, 1e-6, 1e-9, 1e-12}, {1, 3, 5, 7, 9}), 3);
  EXPECT_FALSE(steep.flattening);
  EXPECT_EQ(steep.class_label, DecayClass::fast_decay);
  EXPECT_TRUE(steep.warning.empty());
  EXPECT_EQ(steep.window, 5);
}

TEST(Spectrum, CosRankedSlopeBeatsThreshold) {
  std::vector<double> lambdas;
  for (int k = 0; k <= 16; ++k) lambdas.push_back(funk_hecke(cos_profile, 3, k));
  const auto report = analyze_spectrum(ranked_from_orders(lambdas, 3), 3);
  EXPECT_GT(std::abs(report.slope), 11.0 / 6.0);
  EXPECT_EQ(report.class_label, DecayClass::fast_decay);
}

TEST(Spectrum, GaussianEvenRatiosDecayGeometrically) {
  auto f = [](double t) { return 1.0 / std::sqrt(4.0 - t * t); };
  for (int k = 3; k <= 8; ++k) EXPECT_LE(funk_hecke(f, 3, 2 * k + 2) / funk_hecke(f, 3, 2 * k), 0.3) << k;
}

TEST(Spectrum, DuplicatingPointsKeepsNonzeroEigenvalues) {
  const auto map = sample_feature_map({3, {200}, 1}, make_activation(ActivationKind::cos), 3);
  const Eigen::MatrixXd X = sample_sphere(3, 60, 4);
  Eigen::MatrixXd X2(120, 3);
  X2 << X, X;
  const Eigen::MatrixXd F = feature_matrix(map, X), F2 = feature_matrix(map, X2);
  const auto a = symmetric_eigenvalues(F * F.transpose() / (200.0 * 60));
  const auto b = symmetric_eigenvalues(F2 * F2.transpose() / (200.0 * 120));
  for (int i = 0; i < 60; ++i) EXPECT_NEAR(a[i], b[i], 1e-8);
  for (int i = 60; i < 120; ++i) EXPECT_NEAR(b[i], 0.0, 1e-8);
}

TEST(Spectrum, EmpiricalSpectrumOfCos) {
  const int N = 1500, M = 1500;
  const auto ev = empirical_spectrum(make_activation(ActivationKind::cos), 3, N, M, 7);
  ASSERT_EQ(ev.size(), static_cast<std::size_t>(N));
  const double trace = std::accumulate(ev.begin(), ev.end(), 0.0);
  EXPECT_GE(ev.back(), -1e-8 * trace);
  for (std::size_t i = 1; i < ev.size(); ++i) ASSERT_GE(ev[i - 1], ev[i]);
  // mu_1 isolated, mu_2..mu_6 one plateau of multiplicity 5; the spread inside the
  // plateau is sampling noise (about 9% at N = 4000 even with the exact kernel)
  EXPECT_GT(ev[0], 10.0 * ev[1]);
  EXPECT_LE(ev[1] / ev[5], 1.35);
  EXPECT_GT(ev[5], 10.0 * ev[6]);
  // integral-operator eigenvalues under the probability measure
  EXPECT_NEAR(ev[0], funk_hecke(cos_profile, 3, 0), 0.05 * ev[0]);
  EXPECT_NEAR(ev[3], funk_hecke(cos_profile, 3, 2), 0.1 * ev[3]);
}

TEST(Spectrum, ExactKernelGramIsWithinFeatureNoise) {
  const int N = 800, M = 2000;
  const auto ev = empirical_spectrum(make_activation(ActivationKind::cos), 3, N, M, 9);
  // empirical_spectrum draws its points from the same seed
  const Eigen::MatrixXd X = sample_sphere(3, N, 9);
  Eigen::MatrixXd G(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) G(i, j) = cos_profile(X.row(i).dot(X.row(j))) / N;
  const auto exact = symmetric_eigenvalues(G);
  for (int i = 0; i < 10; ++i) EXPECT_LE(std::abs(ev[i] - exact[i]), 3.0 / std::sqrt(M)) << i;
}

TEST(Spectrum, EmpiricalSpectrumSizeLimits) {
  const auto cos1 = make_activation(ActivationKind::cos);
  EXPECT_THROW(empirical_spectrum(cos1, 3, 8, 100, 1), DomainError);
  EXPECT_THROW(empirical_spectrum(cos1, 3, 100, 8, 1), DomainError);
  EXPECT_THROW(empirical_spectrum(cos1, 3, 30000, 100, 1), DomainError);
  EXPECT_EQ(empirical_spectrum(cos1, 3, 40, 40, 2), empirical_spectrum(cos1, 3, 40, 40, 2));
}
