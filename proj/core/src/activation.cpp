#include "nngplab/activation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <mutex>
#include <numbers>

#include "nngplab/error.hpp"

namespace nngp {
namespace {

double gaussian_d(int order, double x) {
  const double g = std::exp(-0.5 * x * x);
  const double x2 = x * x;
  switch (order) {
    case 0: return g;
    case 1: return -x * g;
    case 2: return (x2 - 1.0) * g;
    case 3: return (3.0 * x - x2 * x) * g;
    default: return (x2 * x2 - 6.0 * x2 + 3.0) * g;
  }
}

double erf_d(int order, double x) {
  if (order == 0) return std::erf(x);
  const double e = 2.0 / std::sqrt(std::numbers::pi) * std::exp(-x * x);
  switch (order) {
    case 1: return e;
    case 2: return -2.0 * x * e;
    case 3: return (4.0 * x * x - 2.0) * e;
    default: return (12.0 * x - 8.0 * x * x * x) * e;
  }
}

double tanh_d(int order, double x) {
  const double t = std::tanh(x);
  const double d1 = 1.0 - t * t;
  switch (order) {
    case 0: return t;
    case 1: return d1;
    case 2: return -2.0 * t * d1;
    case 3: return (6.0 * t * t - 2.0) * d1;
    default: return (16.0 * t - 24.0 * t * t * t) * d1;
  }
}

double sigmoid_d(int order, double x) {
  const double s = 1.0 / (1.0 + std::exp(-x));
  const double d1 = s * (1.0 - s);
  const double u = 1.0 - 2.0 * s;
  switch (order) {
    case 0: return s;
    case 1: return d1;
    case 2: return d1 * u;
    case 3: return d1 * u * u - 2.0 * d1 * d1;
    default: {
      const double d2 = d1 * u;
      const double d3 = d2 * u - 2.0 * d1 * d1;
      return d3 * u - 6.0 * d1 * d2;
    }
  }
}

double raw_eval(ActivationKind kind, double a, int order, double x) {
  switch (kind) {
    case ActivationKind::relu:
      if (order == 0) return x > 0.0 ? x : 0.0;
      return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::clipped_relu:
      if (order == 0) return std::clamp(x, 0.0, 1.0);
      return (x > 0.0 && x < 1.0) ? 1.0 : 0.0;
    case ActivationKind::step:
      return x > 0.0 ? 1.0 : 0.0;
    case ActivationKind::gaussian:
      return gaussian_d(order, x);
    case ActivationKind::cos:
    case ActivationKind::sin: {
      // d^j/dx^j f(ax) = a^j f(ax + j pi/2)
      const double phase = a * x + order * (std::numbers::pi / 2.0);
      const double scale = std::pow(a, order);
      return scale * (kind == ActivationKind::cos ? std::cos(phase) : std::sin(phase));
    }
    case ActivationKind::erf:
      return erf_d(order, x);
    case ActivationKind::tanh:
      return tanh_d(order, x);
    case ActivationKind::sigmoid:
      return sigmoid_d(order, x);
  }
  return 0.0;
}

double grid_sup(ActivationKind kind, int order) {
  double best = 0.0;
  constexpr int kSteps = 400000;
  for (int i = 0; i <= kSteps; ++i) {
    const double x = -20.0 + 40.0 * i / kSteps;
    best = std::max(best, std::abs(raw_eval(kind, 1.0, order, x)));
  }
  return best;
}

std::array<double, 5> grid_norms(ActivationKind kind) {
  static std::mutex mu;
  static std::array<std::array<double, 5>, 9> cache;
  static std::array<bool, 9> ready{};
  const auto idx = static_cast<std::size_t>(kind);
  std::lock_guard lock(mu);
  if (!ready[idx]) {
    for (int j = 0; j < 5; ++j) cache[idx][j] = grid_sup(kind, j);
    // erf, tanh and sigmoid approach 1 only in the limit, which a finite grid misses
    cache[idx][0] = 1.0;
    ready[idx] = true;
  }
  return cache[idx];
}

}  // namespace

int max_order(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::relu:
    case ActivationKind::clipped_relu: return 1;
    case ActivationKind::step: return 0;
    default: return 4;
  }
}

bool is_smooth(ActivationKind kind) { return max_order(kind) == 4; }

bool ActivationSpec::bounded(int max_order) const {
  for (int j = 0; j <= max_order; ++j)
    if (!std::isfinite(sup_norms[j])) return false;
  return true;
}

std::string ActivationSpec::name() const {
  switch (kind) {
    case ActivationKind::relu: return "relu";
    case ActivationKind::clipped_relu: return "clipped_relu";
    case ActivationKind::gaussian: return "gaussian";
    case ActivationKind::erf: return "erf";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::step: return "step";
    case ActivationKind::cos:
    case ActivationKind::sin: {
      char buf[64];
      auto [p, ec] = std::to_chars(buf, buf + sizeof buf, a);
      (void)ec;
      return std::string(kind == ActivationKind::cos ? "cos:a=" : "sin:a=") + std::string(buf, p);
    }
  }
  return "?";
}

ActivationSpec make_activation(ActivationKind kind, double a) {
  ActivationSpec s;
  s.kind = kind;
  s.a = a;
  switch (kind) {
    case ActivationKind::relu:
      s.sup_norms = {kUnbounded, 1.0, kUnbounded, kUnbounded, kUnbounded};
      break;
    case ActivationKind::clipped_relu:
      s.sup_norms = {1.0, 1.0, kUnbounded, kUnbounded, kUnbounded};
      break;
    case ActivationKind::step:
      s.sup_norms = {1.0, kUnbounded, kUnbounded, kUnbounded, kUnbounded};
      break;
    case ActivationKind::gaussian: {
      auto g = grid_norms(kind);
      s.sup_norms = {1.0, std::exp(-0.5), 1.0, g[3], g[4]};
      break;
    }
    case ActivationKind::cos:
    case ActivationKind::sin:
      if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("frequency a must be positive and finite");
      for (int j = 0; j < 5; ++j) s.sup_norms[j] = std::pow(a, j);
      break;
    default:
      s.sup_norms = grid_norms(kind);
      break;
  }
  return s;
}

ActivationSpec parse_activation(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  double a = 1.0;
  bool has_param = false;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    if (rest.substr(0, 2) != "a=") throw DomainError("malformed activation parameter in '" + std::string(text) + "'");
    rest.remove_prefix(2);
    auto [p, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), a);
    if (ec != std::errc() || p != rest.data() + rest.size())
      throw DomainError("malformed activation parameter in '" + std::string(text) + "'");
    has_param = true;
  }
  static const std::pair<std::string_view, ActivationKind> names[] = {
      {"relu", ActivationKind::relu},       {"clipped_relu", ActivationKind::clipped_relu},
      {"gaussian", ActivationKind::gaussian}, {"cos", ActivationKind::cos},
      {"sin", ActivationKind::sin},         {"erf", ActivationKind::erf},
      {"tanh", ActivationKind::tanh},       {"sigmoid", ActivationKind::sigmoid},
      {"step", ActivationKind::step}};
  for (const auto& [n, kind] : names) {
    if (n != head) continue;
    if (has_param && kind != ActivationKind::cos && kind != ActivationKind::sin)
      throw DomainError("activation '" + std::string(head) + "' takes no parameters");
    return make_activation(kind, a);
  }
  throw DomainError("unknown activation '" + std::string(text) + "'");
}

double eval(const ActivationSpec& spec, int order, double x) {
  if (order < 0 || order > 4) throw DomainError("derivative order must be in 0..4");
  if (order > max_order(spec.kind))
    throw DomainError("derivative of order " + std::to_string(order) + " is not defined for " + spec.name());
  return raw_eval(spec.kind, spec.a, order, x);
}

void apply_inplace(const ActivationSpec& spec, int order, double* data, std::size_t count) {
  if (order < 0 || order > max_order(spec.kind))
    throw DomainError("derivative of order " + std::to_string(order) + " is not defined for " + spec.name());
  switch (spec.kind) {
    case ActivationKind::relu:
      if (order == 0)
        for (std::size_t i = 0; i < count; ++i) data[i] = data[i] > 0.0 ? data[i] : 0.0;
      else
        for (std::size_t i = 0; i < count; ++i) data[i] = data[i] > 0.0 ? 1.0 : 0.0;
      return;
    case ActivationKind::gaussian:
      if (order == 0) {
        for (std::size_t i = 0; i < count; ++i) data[i] = std::exp(-0.5 * data[i] * data[i]);
        return;
      }
      break;
    case ActivationKind::cos:
      if (order == 0) {
        for (std::size_t i = 0; i < count; ++i) data[i] = std::cos(spec.a * data[i]);
        return;
      }
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < count; ++i) data[i] = raw_eval(spec.kind, spec.a, order, data[i]);
}

double fourth_order_factor(const ActivationSpec& spec) {
  if (!spec.bounded(4)) throw DomainError("unbounded derivative; bound constants undefined for " + spec.name());
  const auto& s = spec.sup_norms;
  return std::max({s[4] * s[0], s[3] * s[1], s[2] * s[2]});
}

BoundConstants bound_constants(const ActivationSpec& spec) {
  const double m4 = fourth_order_factor(spec);
  const auto& s = spec.sup_norms;
  BoundConstants b;
  const double inner = std::max(s[2] * s[0], s[1] * s[1]);
  b.c_var = 4.0 * inner * inner;
  b.c1 = s[0] * s[0] * std::sqrt(m4);
  b.c2 = std::max({2.0 * s[2] * s[0], 2.0 * s[1] * s[1], 2.5});
  return b;
}

}  // namespace nngp
