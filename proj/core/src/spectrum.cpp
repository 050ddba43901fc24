#include "nngplab/spectrum.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>

#include "nngplab/error.hpp"
#include "nngplab/features.hpp"
#include "nngplab/sphere.hpp"

namespace nngp {
namespace {

constexpr double kUsableFloor = 1e-14;

int usable_count(const std::vector<double>& ev) {
  int m = 0;
  while (m < static_cast<int>(ev.size()) && ev[m] > kUsableFloor) ++m;
  return m;
}

LogLogFit ols(const std::vector<double>& ev, int first, int last) {
  const int m = last - first + 1;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = first; i <= last; ++i) {
    const double x = std::log(i + 1.0), y = std::log(ev[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  LogLogFit f;
  const double denom = m * sxx - sx * sx;
  f.slope = denom > 0 ? (m * sxy - sx * sy) / denom : 0.0;
  f.intercept = (sy - f.slope * sx) / m;
  f.cut = last + 1;
  return f;
}

}  // namespace

std::string to_string(DecayClass c) {
  switch (c) {
    case DecayClass::slow_decay: return "slow_decay";
    case DecayClass::fast_decay: return "fast_decay";
    case DecayClass::inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<double> ranked_from_orders(const std::vector<double>& lambdas, int n) {
  std::vector<double> out;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    double l = lambdas[k];
    if (l < -1e-12) throw DomainError("eigenvalue of order " + std::to_string(k) + " is negative");
    l = std::max(l, 0.0);
    out.insert(out.end(), harmonic_dim(n, static_cast<int>(k)), l);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<double> empirical_spectrum(const ActivationSpec& spec, int n, int N, int M, std::uint64_t seed) {
  if (N < 16 || M < 16) throw DomainError("empirical spectrum needs N, M >= 16");
  if (N > 20000 || M > 20000) throw DomainError("empirical spectrum is limited to N, M <= 20000");
  const Eigen::MatrixXd X = sample_sphere(n, N, seed);
  NetworkShape shape{n, {M}, 1};
  const FeatureMap map = sample_feature_map(shape, spec, seed);
  const Eigen::MatrixXd Phi = feature_matrix(map, X);
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N, N);
  K.selfadjointView<Eigen::Lower>().rankUpdate(Phi, 1.0 / (static_cast<double>(M) * N));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.compute(K, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("symmetric eigensolver failed");
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + N);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

std::vector<std::pair<int, int>> plateau_groups(const std::vector<double>& ev) {
  const int m = usable_count(ev);
  std::vector<std::pair<int, int>> groups;
  if (m == 0) return groups;
  const double brk = std::log(1.5);
  int start = 0;
  for (int i = 0; i + 1 < m; ++i)
    if (std::log(ev[i]) - std::log(ev[i + 1]) > brk) {
      groups.emplace_back(start, i);
      start = i + 1;
    }
  groups.emplace_back(start, m - 1);
  return groups;
}

LogLogFit loglog_fit(const std::vector<double>& ev, CutRule rule) {
  for (std::size_t i = 1; i < ev.size(); ++i)
    if (ev[i] > ev[i - 1]) throw DomainError("eigenvalues must be sorted in decreasing order");
  const int m = usable_count(ev);
  if (m < 5) throw DomainError("log-log fit needs at least 5 eigenvalues above 1e-14");
  int cut = 0;
  if (rule.kind == CutRule::Kind::fixed) {
    cut = std::min(rule.index, m);
  } else {
    // Accept plateaus while their internal log-log slope is shallower than -1.
    for (const auto& [a, b] : plateau_groups(ev)) {
      if (b > a && ols(ev, a, b).slope <= -1.0) break;
      cut = b + 1;
    }
  }
  cut = std::max(cut, 5);
  return ols(ev, 0, cut - 1);
}

std::vector<double> local_decay_rates(const std::vector<double>& ev, int cut) {
  std::vector<std::pair<double, double>> centroids;
  for (const auto& [a, b] : plateau_groups(ev)) {
    if (a >= cut) break;
    const int last = std::min(b, cut - 1);
    double lx = 0, ly = 0;
    for (int i = a; i <= last; ++i) {
      lx += std::log(i + 1.0);
      ly += std::log(ev[i]);
    }
    const int cnt = last - a + 1;
    centroids.emplace_back(lx / cnt, ly / cnt);
  }
  std::vector<double> rates;
  for (std::size_t j = 0; j + 1 < centroids.size(); ++j)
    rates.push_back(-(centroids[j + 1].second - centroids[j].second) /
                    (centroids[j + 1].first - centroids[j].first));
  return rates;
}

bool flattens(const std::vector<double>& rates, double drop) {
  double best = -INFINITY;
  for (double r : rates) {
    if (r < best - drop) return true;
    best = std::max(best, r);
  }
  return false;
}

DecayClass classify_activation(double slope, int n, double margin) {
  const double thr = decay_threshold(n);
  const double s = std::abs(slope);
  if (s < thr - margin) return DecayClass::slow_decay;
  if (s > thr + margin) return DecayClass::fast_decay;
  return DecayClass::inconclusive;
}

SpectrumReport analyze_spectrum(std::vector<double> eigenvalues, int n, CutRule rule, double margin) {
  SpectrumReport r;
  r.n = n;
  r.eigenvalues = std::move(eigenvalues);
  const LogLogFit fit = loglog_fit(r.eigenvalues, rule);
  r.cut_index = fit.cut;
  r.slope = fit.slope;
  r.intercept = fit.intercept;
  r.local_rates = local_decay_rates(r.eigenvalues, fit.cut);
  r.flattening = flattens(r.local_rates);
  r.class_label = classify_activation(fit.slope, n, margin);
  if (r.class_label == DecayClass::fast_decay && r.flattening) {
    r.class_label = DecayClass::inconclusive;
    r.warning = "rank truncation: local decay rate flattens inside the fitted prefix";
  }
  r.window = static_cast<int>(std::floor(std::sqrt(static_cast<double>(r.eigenvalues.size()))));
  const LogLogFit wf = loglog_fit(r.eigenvalues, CutRule::fixed(r.window));
  r.window_slope = wf.slope;
  r.window_intercept = wf.intercept;
  return r;
}

}  // namespace nngp
