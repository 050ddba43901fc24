#include <benchmark/benchmark.h>

#include <cmath>

#include "nngplab/features.hpp"
#include "nngplab/kernel.hpp"
#include "nngplab/spectrum.hpp"
#include "nngplab/sphere.hpp"
#include "nngplab/train2nn.hpp"

using namespace nngp;

namespace {

void BM_SigmaBarQuadrature(benchmark::State& state) {
  const auto spec = make_activation(static_cast<ActivationKind>(state.range(1)));
  const int order = static_cast<int>(state.range(0));
  const Cov2 c{1.3, 0.4, 0.9};
  for (auto _ : state) benchmark::DoNotOptimize(sigma_bar_quadrature(spec, c, order));
  state.SetLabel(spec.name());
}
BENCHMARK(BM_SigmaBarQuadrature)
    ->ArgsProduct({{20, 40, 80},
                   {static_cast<long>(ActivationKind::gaussian), static_cast<long>(ActivationKind::relu),
                    static_cast<long>(ActivationKind::tanh)}});

void BM_GramRecursion(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const KernelModel model = KernelModel::recursion(make_activation(ActivationKind::tanh), 3);
  const Eigen::MatrixXd X = sample_sphere(3, N, 1);
  std::vector<Eigen::VectorXd> pts;
  for (int i = 0; i < N; ++i) pts.push_back(X.row(i).transpose());
  for (auto _ : state) benchmark::DoNotOptimize(gram(model, pts));
}
BENCHMARK(BM_GramRecursion)->RangeMultiplier(2)->Range(16, 128)->Unit(benchmark::kMillisecond);

void BM_FeatureMatrix(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  const auto map = sample_feature_map({3, {64, 64}, T}, make_activation(ActivationKind::gaussian), 2);
  const Eigen::MatrixXd X = sample_sphere(3, 500, 3);
  for (auto _ : state) benchmark::DoNotOptimize(feature_matrix(map, X));
  state.SetItemsProcessed(state.iterations() * 500 * T);
}
BENCHMARK(BM_FeatureMatrix)->RangeMultiplier(4)->Range(4, 64)->Unit(benchmark::kMillisecond);

void BM_FunkHecke(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  auto f = [](double t) { return std::exp(-1.0) * std::cosh(t); };
  for (auto _ : state) benchmark::DoNotOptimize(funk_hecke(f, 3, k));
}
BENCHMARK(BM_FunkHecke)->Arg(2)->Arg(10)->Arg(30);

void BM_EmpiricalSpectrum(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto spec = make_activation(ActivationKind::cos);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_spectrum(spec, 3, N, N, 4));
}
BENCHMARK(BM_EmpiricalSpectrum)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GradMse(benchmark::State& state) {
  const int hidden = static_cast<int>(state.range(0));
  const TwoLayerNet net = init_standard(3, hidden, make_activation(ActivationKind::gaussian), 5);
  const Eigen::MatrixXd X = sample_sphere(3, 128, 6);
  const Eigen::VectorXd y = X.col(0);
  for (auto _ : state) benchmark::DoNotOptimize(grad_mse(net, X, y));
  state.SetItemsProcessed(state.iterations() * 128);
}
BENCHMARK(BM_GradMse)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
