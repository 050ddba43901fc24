#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace nngp {

// Surface area of S^{n-1}: 2 pi^{n/2} / Gamma(n/2).
double surface_area(int n);

// Uniform points on S^{n-1}, one per row.
Eigen::MatrixXd sample_sphere(int n, int count, std::uint64_t seed);

// Gegenbauer polynomial for S^{n-1} normalized so P_k(1) = 1.
double gegenbauer(int n, int k, double t);

// P_0(t) .. P_kmax(t) in one recurrence sweep.
std::vector<double> gegenbauer_all(int n, int kmax, double t);

// Monomial coefficients of P_0..P_kmax; coefficients[k][j] multiplies t^j.
struct GegenbauerBasis {
  int n = 3;
  int kmax = 0;
  std::vector<std::vector<double>> coefficients;

  double operator()(int k, double t) const;
};

GegenbauerBasis make_gegenbauer_basis(int n, int kmax);

// Dimension N(n, k) of degree-k spherical harmonics in n variables.
std::uint64_t harmonic_dim(int n, int k);

struct HarmonicTarget {
  int n = 3;
  int k = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd centers;       // m x n, unit rows
  Eigen::VectorXd coefficients;  // m
  double l2_norm_certificate = 0.0;  // c' G c, surface measure
  int floored_modes = 0;             // Gram eigenvalues projected out

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd evaluate(const Eigen::MatrixXd& X) const;  // one point per row
};

// Unit L2(S^{n-1}, surface measure) random degree-k harmonic in the span of
// P_k(. u_j). m = 0 selects 2 N(n, k) centers.
HarmonicTarget make_harmonic_target(int n, int k, int m, std::uint64_t seed);

// Eigenvalue of the zonal kernel f(x.y) on degree-k harmonics, under the
// uniform probability measure on the sphere.
double funk_hecke(const std::function<double(double)>& f, int n, int k, int quad_order = 0);

inline int default_funk_hecke_order(int k) { return std::max(2 * k + 20, 64); }

// sum_k lambda_k N(n,k) P_k(t): the truncated Mercer series of a zonal
// kernel whose probability-measure eigenvalues are lambdas[k].
double mercer_sum(const std::vector<double>& lambdas, int n, double t);

// k^{n/2 + 1/3} / sqrt(log N(n, k)), up to an n-dependent constant.
double barron_lower_bound(int n, int k);

}  // namespace nngp
