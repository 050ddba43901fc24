#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "nngplab/activation.hpp"

namespace nngp {

struct Cov2 {
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
};

inline constexpr int kDefaultQuadOrder = 40;

// E[s(u) s(v)] for (u, v) ~ N(0, cov). Uses the closed form when one exists.
double sigma_bar(const ActivationSpec& spec, const Cov2& cov, int quad_order = kDefaultQuadOrder);

// Always the tensor Gauss-Hermite rule, even when a closed form exists.
double sigma_bar_quadrature(const ActivationSpec& spec, const Cov2& cov, int quad_order = kDefaultQuadOrder);

// Closed form for gaussian, cos and sin; nullopt otherwise.
std::optional<double> sigma_bar_closed(const ActivationSpec& spec, const Cov2& cov);

enum class KernelKind { recursion, closed_gaussian, closed_cos, closed_sin, zonal_profile };

class KernelModel {
 public:
  static KernelModel recursion(const ActivationSpec& spec, int depth, int quad_order = kDefaultQuadOrder);
  static KernelModel closed_gaussian();
  static KernelModel closed_cos(double a);
  static KernelModel closed_sin(double a);
  // K(x, y) = f(x.y); meaningful for unit-norm inputs.
  static KernelModel zonal(std::function<double(double)> f);

  KernelModel& with_dim(int n) {
    dim_ = n;
    return *this;
  }

  KernelKind kind() const { return kind_; }
  int depth() const { return depth_; }
  int dim() const { return dim_; }
  const ActivationSpec& activation() const { return spec_; }

  // Evaluates the kernel given layer-0 inner products x.x, x.y, y.y.
  double from_inner(const Cov2& inner) const;

  // Unit-sphere profile f(t) = K(x, y) with x.y = t.
  double profile(double t) const { return from_inner({1.0, t, 1.0}); }

 private:
  friend Eigen::MatrixXd gram(const KernelModel&, const std::vector<Eigen::VectorXd>&);

  // Diagonal chain Sigma^(h)(x, x), h = 0..depth, for the recursion kind.
  std::vector<double> diagonal_chain(double xx) const;
  double off_diagonal(const std::vector<double>& dx, const std::vector<double>& dy, double xy) const;

  KernelKind kind_ = KernelKind::recursion;
  ActivationSpec spec_;
  int depth_ = 1;
  int quad_order_ = kDefaultQuadOrder;
  double a_ = 1.0;
  int dim_ = 0;  // 0 accepts any dimension
  std::function<double(double)> f_;
};

double nngp_eval(const KernelModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

// Symmetric Gram matrix; the upper triangle is computed once and mirrored.
Eigen::MatrixXd gram(const KernelModel& model, const std::vector<Eigen::VectorXd>& points);

// Width sum bounding |E[Sigma_emp] - Sigma^(L)|, universal constant set to 1:
// ||s||^4 m4 sum_j c2^(2L-2j) (L-j) / n_j.
// widths holds n_1..n_{L-1}.
double deviation_bound(const ActivationSpec& spec, const std::vector<int>& widths, int L);

}  // namespace nngp
