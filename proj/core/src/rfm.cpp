#include "nngplab/rfm.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>

#include "nngplab/error.hpp"
#include "nngplab/parallel.hpp"
#include "nngplab/random.hpp"
#include "nngplab/sphere.hpp"

namespace nngp {

void Dataset::validate() const {
  if (inputs.rows() < 1) throw DomainError("dataset must contain at least one sample");
  if (targets.size() != inputs.rows()) throw DomainError("dataset inputs and targets differ in length");
  if (!inputs.allFinite() || !targets.allFinite()) throw DomainError("dataset contains non-finite values");
}

double rmse(const Eigen::VectorXd& prediction, const Eigen::VectorXd& target) {
  if (prediction.size() != target.size() || target.size() == 0) throw DomainError("rmse length mismatch");
  return std::sqrt((prediction - target).squaredNorm() / static_cast<double>(target.size()));
}

RfmFit fit_design(const FeatureMap& map, const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double ridge) {
  if (!X.allFinite()) throw NumericalError("design matrix contains non-finite values");
  const Eigen::Index N = X.rows(), c = X.cols();
  if (ridge < 0.0) ridge = 1e-8 * X.squaredNorm() / static_cast<double>(c);

  RfmFit out;
  out.map = map;
  out.ridge = ridge;
  if (ridge > 0.0) {
    const double s = std::sqrt(ridge);
    if (N >= c) {
      // min ||[X; s I] w - [y; 0]||
      Eigen::MatrixXd A(N + c, c);
      A.topRows(N) = X;
      A.bottomRows(c) = s * Eigen::MatrixXd::Identity(c, c);
      Eigen::VectorXd b = Eigen::VectorXd::Zero(N + c);
      b.head(N) = y;
      out.w = Eigen::HouseholderQR<Eigen::MatrixXd>(A).solve(b);
    } else {
      // w = X' alpha with (X X' + ridge I) alpha = y = R'R alpha
      Eigen::MatrixXd A(c + N, N);
      A.topRows(c) = X.transpose();
      A.bottomRows(N) = s * Eigen::MatrixXd::Identity(N, N);
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
      const auto R = qr.matrixQR().topRows(N).triangularView<Eigen::Upper>();
      Eigen::VectorXd alpha = R.transpose().solve(y);
      R.solveInPlace(alpha);
      out.w = X.transpose() * alpha;
    }
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (N >= c && qr.rank() == c) {
      out.w = qr.solve(y);
    } else {
      out.w = Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd>(X).solve(y);
      out.min_norm_fallback = true;
    }
  }
  if (!out.w.allFinite()) throw NumericalError("least-squares solve produced non-finite weights");
  out.train_rmse = rmse(X * out.w, y);
  return out;
}

RfmFit fit(const FeatureMap& map, const Dataset& data, double ridge) {
  data.validate();
  if (data.inputs.cols() != map.shape.n0) throw DomainError("dataset dimension does not match the feature map");
  return fit_design(map, feature_matrix(map, data.inputs), data.targets, ridge);
}

double predict(const RfmFit& fit, const Eigen::VectorXd& x) { return features(fit.map, x).dot(fit.w); }

Eigen::VectorXd predict_batch(const RfmFit& fit, const Eigen::MatrixXd& X) { return feature_matrix(fit.map, X) * fit.w; }

double KernelComboTarget::operator()(const Eigen::VectorXd& x) const {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < centers.rows(); ++j)
    acc += coefficients(j) * nngp_eval(model, centers.row(j).transpose(), x);
  return acc;
}

Eigen::VectorXd KernelComboTarget::evaluate(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd out(X.rows());
  parallel_for(static_cast<std::size_t>(X.rows()), [&](std::size_t i) {
    out(static_cast<Eigen::Index>(i)) = (*this)(X.row(static_cast<Eigen::Index>(i)).transpose());
  });
  return out;
}

KernelComboTarget make_kernel_combo_target(const KernelModel& model, const Eigen::MatrixXd& centers,
                                           const Eigen::VectorXd& coefficients) {
  if (centers.rows() != coefficients.size()) throw DomainError("one coefficient per center is required");
  if (centers.rows() == 0) throw DomainError("kernel-combo target needs at least one center");
  KernelComboTarget t{model, centers, coefficients, 0.0, false};
  std::vector<Eigen::VectorXd> pts;
  for (Eigen::Index j = 0; j < centers.rows(); ++j) pts.push_back(centers.row(j).transpose());
  Eigen::MatrixXd G = gram(model, pts);
  double q = coefficients.dot(G * coefficients);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  const double tol = 1e-10 * std::max(G.trace(), 1e-300);
  if (es.eigenvalues().minCoeff() < -tol) {
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0);
    const Eigen::VectorXd p = es.eigenvectors().transpose() * coefficients;
    q = p.dot(lam.cwiseProduct(p));
    t.gram_floored = true;
  }
  t.rkhs_norm = std::sqrt(std::max(q, 0.0));
  return t;
}

RateResult rate_experiment(const RateConfig& cfg) {
  if (cfg.T_values.size() < 2) throw DomainError("rate experiment needs at least two T values");
  const auto [tmin, tmax] = std::minmax_element(cfg.T_values.begin(), cfg.T_values.end());
  if (*tmin < 1) throw DomainError("T values must be positive");
  if (*tmax < 8 * *tmin) throw DomainError("T values must span at least a factor of 8");
  if (cfg.seeds < 1) throw DomainError("rate experiment needs at least one seed");
  if (cfg.centers < 1 || cfg.n_train < 1 || cfg.n_test < 1) throw DomainError("sizes must be positive");

  const Stream root(cfg.seed);
  const int L = static_cast<int>(cfg.hidden.size());
  const KernelModel model = KernelModel::recursion(cfg.spec, L);
  const Eigen::MatrixXd centers = sample_sphere(cfg.n0, cfg.centers, root.child({tag::dataset, 0}).key());
  Eigen::VectorXd a(cfg.centers);
  const Stream as = root.child(tag::coefficients);
  for (int j = 0; j < cfg.centers; ++j) a(j) = as.normal(j);
  const KernelComboTarget target = make_kernel_combo_target(model, centers, a);

  Dataset train{sample_sphere(cfg.n0, cfg.n_train, root.child({tag::dataset, 1}).key()), {}, "kernel_combo"};
  train.targets = target.evaluate(train.inputs);
  const Eigen::MatrixXd test_x = sample_sphere(cfg.n0, cfg.n_test, root.child({tag::dataset, 2}).key());
  const Eigen::VectorXd test_y = target.evaluate(test_x);

  RateResult out;
  out.rkhs_norm = target.rkhs_norm;
  out.t1_bound = cfg.spec.sup_norms[0] * target.rkhs_norm;
  const std::size_t nT = cfg.T_values.size();
  out.cells.resize(nT * cfg.seeds);
  for (std::size_t ti = 0; ti < nT; ++ti)
    for (int s = 0; s < cfg.seeds; ++s) out.cells[ti * cfg.seeds + s] = {cfg.T_values[ti], s, 0.0, 0.0};

  parallel_for(out.cells.size(), [&](std::size_t idx) {
    RateCell& cell = out.cells[idx];
    NetworkShape shape{cfg.n0, cfg.hidden, cell.T};
    const std::uint64_t map_seed = root.child({tag::weights, static_cast<std::uint64_t>(cell.T),
                                               static_cast<std::uint64_t>(cell.seed)}).key();
    const FeatureMap map = sample_feature_map(shape, cfg.spec, map_seed);
    Eigen::VectorXd w;
    const Eigen::MatrixXd Xtrain = feature_matrix(map, train.inputs);
    if (cfg.estimator == RateEstimator::monte_carlo) {
      w = feature_matrix(map, centers).transpose() * a / static_cast<double>(shape.feature_count());
    } else {
      w = fit_design(map, Xtrain, train.targets, cfg.ridge).w;
    }
    cell.train_rmse = rmse(Xtrain * w, train.targets);
    cell.test_rmse = rmse(feature_matrix(map, test_x) * w, test_y);
  });

  int exceed = 0;
  for (const auto& c : out.cells) exceed += c.test_rmse > out.t1_bound;
  out.exceed_fraction = static_cast<double>(exceed) / static_cast<double>(out.cells.size());

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t ti = 0; ti < nT; ++ti) {
    RateSummary r;
    r.T = cfg.T_values[ti];
    double m = 0, ss = 0;
    for (int s = 0; s < cfg.seeds; ++s) m += out.cells[ti * cfg.seeds + s].test_rmse;
    m /= cfg.seeds;
    for (int s = 0; s < cfg.seeds; ++s) ss += std::pow(out.cells[ti * cfg.seeds + s].test_rmse - m, 2);
    r.mean_test_rmse = m;
    r.std_test_rmse = cfg.seeds > 1 ? std::sqrt(ss / (cfg.seeds - 1)) : 0.0;
    out.per_T.push_back(r);
    const double x = std::log(static_cast<double>(r.T)), y = std::log(m);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(nT);
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

}  // namespace nngp
