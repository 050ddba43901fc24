#include "nngplab/features.hpp"

#include <cmath>
#include <string>

#include "nngplab/error.hpp"
#include "nngplab/kernel.hpp"
#include "nngplab/parallel.hpp"
#include "nngplab/random.hpp"

namespace nngp {

void NetworkShape::validate() const {
  if (n0 < 1) throw DomainError("input dimension must be positive");
  if (hidden.empty()) throw DomainError("network needs at least one hidden layer");
  for (int w : hidden)
    if (w < 1) throw DomainError("layer widths must be positive");
  if (T < 1) throw DomainError("block count T must be positive");
}

WeightBlock sample_block(const NetworkShape& shape, std::uint64_t seed, std::size_t index, int layers) {
  const int depth = layers > 0 ? std::min(layers, shape.L()) : shape.L();
  WeightBlock block;
  block.index = index;
  block.W.reserve(depth);
  const Stream base = Stream(seed).child({tag::weights, index});
  int fan_in = shape.n0;
  for (int h = 1; h <= depth; ++h) {
    const int rows = shape.hidden[h - 1];
    const Stream s = base.child(static_cast<std::uint64_t>(h));
    const double scale = h == 1 ? 1.0 : 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd W(rows, fan_in);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < fan_in; ++c)
        W(r, c) = scale * s.normal(static_cast<std::uint64_t>(r) * fan_in + c);
    block.W.push_back(std::move(W));
    fan_in = rows;
  }
  return block;
}

FeatureMap sample_feature_map(const NetworkShape& shape, const ActivationSpec& spec, std::uint64_t seed) {
  shape.validate();
  FeatureMap map;
  map.shape = shape;
  map.spec = spec;
  map.seed = seed;
  map.blocks.resize(shape.T);
  parallel_for(shape.T, [&](std::size_t i) { map.blocks[i] = sample_block(shape, seed, i); });
  return map;
}

Eigen::MatrixXd block_activations(const WeightBlock& block, const ActivationSpec& spec, const Eigen::MatrixXd& X,
                                  int h) {
  if (h < 1 || h > static_cast<int>(block.W.size())) throw DomainError("layer index out of range");
  if (X.cols() != block.W.front().cols()) throw DomainError("input dimension mismatch");
  Eigen::MatrixXd A = X * block.W[0].transpose();
  apply_inplace(spec, 0, A.data(), static_cast<std::size_t>(A.size()));
  for (int l = 1; l < h; ++l) {
    Eigen::MatrixXd next = A * block.W[l].transpose();
    apply_inplace(spec, 0, next.data(), static_cast<std::size_t>(next.size()));
    A = std::move(next);
  }
  return A;
}

Eigen::MatrixXd feature_matrix(const FeatureMap& map, const Eigen::MatrixXd& X) {
  if (X.cols() != map.shape.n0) throw DomainError("input dimension mismatch");
  const int nL = map.shape.nL();
  Eigen::MatrixXd F(X.rows(), static_cast<Eigen::Index>(map.shape.T) * nL);
  parallel_for(map.blocks.size(), [&](std::size_t i) {
    F.middleCols(static_cast<Eigen::Index>(i) * nL, nL) = block_activations(map.blocks[i], map.spec, X, map.shape.L());
  });
  return F;
}

Eigen::VectorXd features(const FeatureMap& map, const Eigen::VectorXd& x) {
  if (x.size() != map.shape.n0) throw DomainError("input dimension mismatch");
  return feature_matrix(map, x.transpose()).row(0).transpose();
}

double empirical_kernel(const FeatureMap& map, const Eigen::VectorXd& x, const Eigen::VectorXd& y, int h) {
  if (h < 1 || h > map.shape.L()) throw DomainError("layer index out of range");
  if (x.size() != map.shape.n0 || y.size() != map.shape.n0) throw DomainError("input dimension mismatch");
  Eigen::MatrixXd X(2, map.shape.n0);
  X.row(0) = x.transpose();
  X.row(1) = y.transpose();
  const Eigen::MatrixXd A = block_activations(map.blocks.front(), map.spec, X, h);
  return A.row(0).dot(A.row(1)) / static_cast<double>(A.cols());
}

double variance_bound(const ActivationSpec& spec, const std::vector<int>& hidden, int h) {
  if (!spec.bounded(2)) throw DomainError("unbounded derivative; variance bound undefined for " + spec.name());
  if (h < 1 || h > static_cast<int>(hidden.size())) throw DomainError("layer index out of range");
  const auto& s = spec.sup_norms;
  const double inner = std::max(s[2] * s[0], s[1] * s[1]);
  const double C = 4.0 * inner * inner;
  double sum = 0.0;
  for (int i = 1; i <= h; ++i) sum += std::pow(C, h - i) / hidden[i - 1];
  return 2.0 * s[0] * s[0] * s[0] * s[0] * sum;
}

VarianceProbe variance_probe(const NetworkShape& shape, const ActivationSpec& spec, const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y, int h, int repetitions, std::uint64_t seed) {
  shape.validate();
  if (repetitions < 100) throw DomainError("variance probe needs at least 100 repetitions");
  VarianceProbe out;
  out.theorem2_bound = variance_bound(spec, shape.hidden, h);
  if (x.size() != shape.n0 || y.size() != shape.n0) throw DomainError("input dimension mismatch");

  Eigen::MatrixXd X(2, shape.n0);
  X.row(0) = x.transpose();
  X.row(1) = y.transpose();
  const std::uint64_t probe_seed = Stream(seed).child(tag::probe).key();
  std::vector<double> values(repetitions);
  parallel_for(values.size(), [&](std::size_t r) {
    const WeightBlock block = sample_block(shape, probe_seed, r, h);
    const Eigen::MatrixXd A = block_activations(block, spec, X, h);
    values[r] = A.row(0).dot(A.row(1)) / static_cast<double>(A.cols());
  });
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= repetitions;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  out.mean = mean;
  out.measured_variance = ss / (repetitions - 1);
  return out;
}

std::vector<DeviationRow> deviation_probe(const NetworkShape& shape, const ActivationSpec& spec,
                                          const std::vector<PointPair>& pairs, int repetitions, std::uint64_t seed) {
  shape.validate();
  if (!spec.bounded(4)) throw DomainError("unbounded derivative; deviation probe undefined for " + spec.name());
  if (repetitions < 2) throw DomainError("deviation probe needs at least 2 repetitions");
  if (pairs.empty()) throw DomainError("deviation probe needs at least one point pair");
  const int P = static_cast<int>(pairs.size());
  Eigen::MatrixXd X(2 * P, shape.n0);
  for (int p = 0; p < P; ++p) {
    if (pairs[p].first.size() != shape.n0 || pairs[p].second.size() != shape.n0)
      throw DomainError("input dimension mismatch");
    X.row(2 * p) = pairs[p].first.transpose();
    X.row(2 * p + 1) = pairs[p].second.transpose();
  }
  const int L = shape.L();
  const std::uint64_t probe_seed = Stream(seed).child(tag::probe).key();
  Eigen::MatrixXd values(repetitions, P);
  parallel_for(repetitions, [&](std::size_t r) {
    const WeightBlock block = sample_block(shape, probe_seed, r);
    const Eigen::MatrixXd A = block_activations(block, spec, X, L);
    for (int p = 0; p < P; ++p)
      values(static_cast<Eigen::Index>(r), p) = A.row(2 * p).dot(A.row(2 * p + 1)) / static_cast<double>(A.cols());
  });

  const KernelModel model = KernelModel::recursion(spec, L);
  std::vector<DeviationRow> rows(P);
  for (int p = 0; p < P; ++p) {
    double mean = 0.0;
    for (int r = 0; r < repetitions; ++r) mean += values(r, p);
    mean /= repetitions;
    double ss = 0.0;
    for (int r = 0; r < repetitions; ++r) ss += (values(r, p) - mean) * (values(r, p) - mean);
    rows[p].mean = mean;
    rows[p].std_error = std::sqrt(ss / (repetitions - 1) / repetitions);
    rows[p].exact = nngp_eval(model, pairs[p].first, pairs[p].second);
  }
  return rows;
}

}  // namespace nngp
