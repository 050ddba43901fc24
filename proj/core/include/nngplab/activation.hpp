#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>

namespace nngp {

enum class ActivationKind { relu, clipped_relu, gaussian, cos, sin, erf, tanh, sigmoid, step };

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct ActivationSpec {
  ActivationKind kind = ActivationKind::relu;
  double a = 1.0;  // frequency for cos/sin, ignored otherwise
  std::array<double, 5> sup_norms{};  // kUnbounded where the derivative is not bounded

  bool bounded(int max_order) const;
  std::string name() const;
};

ActivationSpec make_activation(ActivationKind kind, double a = 1.0);

// Parses "relu", "gaussian", "cos:a=1.5", "sin:a=2".
ActivationSpec parse_activation(std::string_view text);

// Highest derivative order with a pointwise formula.
int max_order(ActivationKind kind);

// Throws DomainError for an unsupported (kind, order) pair.
double eval(const ActivationSpec& spec, int order, double x);

// Elementwise in-place evaluation of derivative `order` over a buffer.
void apply_inplace(const ActivationSpec& spec, int order, double* data, std::size_t count);

// Smooth activations have no kinks; relu-family and step do.
bool is_smooth(ActivationKind kind);

struct BoundConstants {
  double c_var = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

BoundConstants bound_constants(const ActivationSpec& spec);

// max(|s''''||s|, |s'''||s'|, |s''|^2) shared by C1 and the deviation bound.
double fourth_order_factor(const ActivationSpec& spec);

}  // namespace nngp
