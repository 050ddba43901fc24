#include "nngplab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>
#include <string>

#include "nngplab/error.hpp"
#include "nngplab/parallel.hpp"
#include "nngplab/quadrature.hpp"

namespace nngp {
namespace {

constexpr double kVarFloor = 1e-12;

void check_psd(const Cov2& c) {
  const double mean = 0.5 * (c.sxx + c.syy);
  const double half_gap = std::hypot(0.5 * (c.sxx - c.syy), c.sxy);
  if (!std::isfinite(mean) || !std::isfinite(half_gap)) throw NumericalError("non-finite covariance");
  if (mean - half_gap < -1e-8) throw NumericalError("non-PSD covariance");
}

double gauss_closed(const Cov2& c) {
  const double det = (1.0 + c.sxx) * (1.0 + c.syy) - c.sxy * c.sxy;
  return 1.0 / std::sqrt(det);
}

// e^{-a^2 (sxx+syy)/2} cosh(a^2 sxy), written as two decaying exponentials
double trig_closed(double a, const Cov2& c, double sign) {
  const double a2 = a * a;
  const double s = c.sxx + c.syy;
  return 0.5 * (std::exp(-0.5 * a2 * (s - 2.0 * c.sxy)) + sign * std::exp(-0.5 * a2 * (s + 2.0 * c.sxy)));
}

// Points where the activation or its first derivative jumps.
std::vector<double> kinks(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::clipped_relu: return {0.0, 1.0};
    default: return {0.0};
  }
}

constexpr double kTruncation = 12.0;

// Breakpoints of [-Z, Z] at which a piecewise Gauss-Legendre rule restarts.
std::vector<double> pieces(std::vector<double> cuts) {
  cuts.push_back(-kTruncation);
  cuts.push_back(kTruncation);
  std::erase_if(cuts, [](double x) { return !(x >= -kTruncation && x <= kTruncation); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Integral of f(z) phi(z) over the real line, restarting the rule at each cut.
template <class F>
double piecewise_gauss(const QuadratureRule& leg, const std::vector<double>& cuts, F&& f) {
  static const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double mid = 0.5 * (cuts[p] + cuts[p + 1]), half = 0.5 * (cuts[p + 1] - cuts[p]);
    if (half <= 0.0) continue;
    double part = 0.0;
    for (std::size_t i = 0; i < leg.nodes.size(); ++i) {
      const double z = mid + half * leg.nodes[i];
      part += leg.weights[i] * std::exp(-0.5 * z * z) * f(z);
    }
    acc += half * part;
  }
  return acc * inv_sqrt_2pi;
}

// Gauss-Hermite converges slowly across a kink, so piecewise-linear activations use a
// conditional split u = su z1, v | z1 with Gauss-Legendre pieces broken at every kink.
double kinked_quadrature(const ActivationSpec& spec, double sxx, double sxy, double syy, int order) {
  auto s = [&](double x) { return eval(spec, 0, x); };
  const auto leg = gauss_gegenbauer(order, 0.0);
  const auto ks = kinks(spec.kind);
  auto scaled_cuts = [&](double shift, double scale) {
    std::vector<double> cuts;
    for (double k : ks) cuts.push_back((k - shift) / scale);
    return pieces(std::move(cuts));
  };

  if (sxx <= kVarFloor) {
    const double sd = std::sqrt(syy);
    return s(0.0) * piecewise_gauss(*leg, scaled_cuts(0.0, sd), [&](double z) { return s(sd * z); });
  }
  const double su = std::sqrt(sxx), sv = std::sqrt(syy);
  const double rho = std::clamp(sxy / (su * sv), -1.0, 1.0);
  const auto outer = scaled_cuts(0.0, su);
  if (std::abs(rho) > 1.0 - 1e-9) {
    const double sign = rho > 0.0 ? 1.0 : -1.0;
    auto cuts = outer;
    for (double k : ks) cuts.push_back(k / (sign * sv));
    return piecewise_gauss(*leg, pieces(std::move(cuts)),
                           [&](double z) { return s(su * z) * s(sign * sv * z); });
  }
  const double tail = sv * std::sqrt(1.0 - rho * rho);
  return piecewise_gauss(*leg, outer, [&](double z1) {
    const double su_z = s(su * z1);
    if (su_z == 0.0) return 0.0;
    const double base = sv * rho * z1;
    return su_z * piecewise_gauss(*leg, scaled_cuts(base, tail), [&](double z2) { return s(base + tail * z2); });
  });
}

}  // namespace

std::optional<double> sigma_bar_closed(const ActivationSpec& spec, const Cov2& cov) {
  switch (spec.kind) {
    case ActivationKind::gaussian: return gauss_closed(cov);
    case ActivationKind::cos: return trig_closed(spec.a, cov, 1.0);
    case ActivationKind::sin: return trig_closed(spec.a, cov, -1.0);
    default: return std::nullopt;
  }
}

double sigma_bar_quadrature(const ActivationSpec& spec, const Cov2& cov, int quad_order) {
  if (quad_order < 2) throw DomainError("quadrature order must be at least 2");
  check_psd(cov);
  // sigma(u) sigma(v) is symmetric, so a canonical order makes the rule exactly symmetric too
  const bool swap = cov.sxx > cov.syy;
  const double sxx = std::max(swap ? cov.syy : cov.sxx, 0.0);
  const double syy = std::max(swap ? cov.sxx : cov.syy, 0.0);
  auto s = [&](double x) { return eval(spec, 0, x); };
  if (sxx <= kVarFloor && syy <= kVarFloor) return s(0.0) * s(0.0);
  if (!is_smooth(spec.kind)) return kinked_quadrature(spec, sxx, cov.sxy, syy, quad_order);

  const auto rule = gauss_hermite(quad_order);
  const auto& z = rule->nodes;
  const auto& w = rule->weights;
  const std::size_t m = z.size();

  if (sxx <= kVarFloor) {
    const double sd = std::sqrt(syy);
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += w[i] * s(sd * z[i]);
    return s(0.0) * acc;
  }

  const double su = std::sqrt(sxx), sv = std::sqrt(syy);
  const double rho = std::clamp(cov.sxy / (su * sv), -1.0, 1.0);
  if (std::abs(rho) > 1.0 - 1e-9) {
    const double sign = rho > 0.0 ? 1.0 : -1.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < m; ++i) acc += w[i] * s(su * z[i]) * s(sign * sv * z[i]);
    return acc;
  }

  const double tail = std::sqrt(1.0 - rho * rho);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double base = sv * rho * z[i];
    double inner = 0.0;
    for (std::size_t j = 0; j < m; ++j) inner += w[j] * s(base + sv * tail * z[j]);
    acc += w[i] * s(su * z[i]) * inner;
  }
  return acc;
}

double sigma_bar(const ActivationSpec& spec, const Cov2& cov, int quad_order) {
  if (auto closed = sigma_bar_closed(spec, cov)) {
    check_psd(cov);
    return *closed;
  }
  return sigma_bar_quadrature(spec, cov, quad_order);
}

KernelModel KernelModel::recursion(const ActivationSpec& spec, int depth, int quad_order) {
  if (depth < 0) throw DomainError("depth must be nonnegative");
  if (quad_order < 2) throw DomainError("quadrature order must be at least 2");
  KernelModel m;
  m.kind_ = KernelKind::recursion;
  m.spec_ = spec;
  m.depth_ = depth;
  m.quad_order_ = quad_order;
  return m;
}

KernelModel KernelModel::closed_gaussian() {
  KernelModel m;
  m.kind_ = KernelKind::closed_gaussian;
  m.spec_ = make_activation(ActivationKind::gaussian);
  return m;
}

KernelModel KernelModel::closed_cos(double a) {
  KernelModel m;
  m.kind_ = KernelKind::closed_cos;
  m.spec_ = make_activation(ActivationKind::cos, a);
  m.a_ = a;
  return m;
}

KernelModel KernelModel::closed_sin(double a) {
  KernelModel m;
  m.kind_ = KernelKind::closed_sin;
  m.spec_ = make_activation(ActivationKind::sin, a);
  m.a_ = a;
  return m;
}

KernelModel KernelModel::zonal(std::function<double(double)> f) {
  if (!f) throw DomainError("zonal profile must be callable");
  KernelModel m;
  m.kind_ = KernelKind::zonal_profile;
  m.f_ = std::move(f);
  return m;
}

std::vector<double> KernelModel::diagonal_chain(double xx) const {
  std::vector<double> chain{xx};
  chain.reserve(depth_ + 1);
  for (int h = 0; h < depth_; ++h) {
    const double s = chain.back();
    chain.push_back(sigma_bar(spec_, {s, s, s}, quad_order_));
  }
  return chain;
}

double KernelModel::off_diagonal(const std::vector<double>& dx, const std::vector<double>& dy, double xy) const {
  for (int h = 0; h < depth_; ++h) xy = sigma_bar(spec_, {dx[h], xy, dy[h]}, quad_order_);
  return xy;
}

double KernelModel::from_inner(const Cov2& inner) const {
  switch (kind_) {
    case KernelKind::closed_gaussian: return gauss_closed(inner);
    case KernelKind::closed_cos: return trig_closed(a_, inner, 1.0);
    case KernelKind::closed_sin: return trig_closed(a_, inner, -1.0);
    case KernelKind::zonal_profile: return f_(inner.sxy);
    case KernelKind::recursion: break;
  }
  return off_diagonal(diagonal_chain(inner.sxx), diagonal_chain(inner.syy), inner.sxy);
}

double nngp_eval(const KernelModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw DomainError("dimension mismatch between kernel arguments");
  if (model.dim() > 0 && x.size() != model.dim())
    throw DomainError("input dimension " + std::to_string(x.size()) + " does not match model dimension " +
                      std::to_string(model.dim()));
  return model.from_inner({x.squaredNorm(), x.dot(y), y.squaredNorm()});
}

Eigen::MatrixXd gram(const KernelModel& model, const std::vector<Eigen::VectorXd>& points) {
  if (points.empty()) throw DomainError("gram requires at least one point");
  const auto n = static_cast<Eigen::Index>(points.size());
  for (const auto& p : points)
    if (p.size() != points.front().size() || (model.dim() > 0 && p.size() != model.dim()))
      throw DomainError("gram points have inconsistent dimension");

  std::vector<std::vector<double>> chains;
  if (model.kind() == KernelKind::recursion) {
    chains.resize(points.size());
    parallel_for(points.size(), [&](std::size_t i) { chains[i] = model.diagonal_chain(points[i].squaredNorm()); });
  }
  Eigen::MatrixXd G(n, n);
  parallel_for(points.size(), [&](std::size_t ui) {
    const auto i = static_cast<Eigen::Index>(ui);
    for (Eigen::Index j = i; j < n; ++j) {
      const double xy = points[ui].dot(points[j]);
      G(i, j) = chains.empty()
                    ? model.from_inner({points[ui].squaredNorm(), xy, points[j].squaredNorm()})
                    : model.off_diagonal(chains[ui], chains[j], xy);
    }
  });
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) G(j, i) = G(i, j);
  return G;
}

double deviation_bound(const ActivationSpec& spec, const std::vector<int>& widths, int L) {
  if (L < 1) throw DomainError("depth must be at least 1");
  if (static_cast<int>(widths.size()) != L - 1) throw DomainError("deviation_bound expects L-1 widths");
  const double m4 = fourth_order_factor(spec);
  const double c2 = bound_constants(spec).c2;
  const double s0 = spec.sup_norms[0];
  double sum = 0.0;
  for (int j = 1; j <= L - 1; ++j) {
    const int nj = widths[j - 1];
    if (nj < 1) throw DomainError("widths must be positive");
    sum += std::pow(c2, 2 * L - 2 * j) * (L - j) / nj;
  }
  return s0 * s0 * s0 * s0 * m4 * sum;
}

}  // namespace nngp
