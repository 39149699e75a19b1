#pragma once

#include <cmath>
#include <string>

#include "alexot/error.hpp"
#include "alexot/spaces.hpp"

namespace alexot {

enum class CostKind { Quadratic, Power };

/// c(x, y) = h(d(x, y)) with h strictly convex and nondecreasing.
///   Quadratic  h(t) = t^2 / 2
///   Power      h(t) = t^p / p, p > 1
struct CostSpec {
  CostKind kind = CostKind::Quadratic;
  double p = 2.0;

  static CostSpec quadratic() { return {CostKind::Quadratic, 2.0}; }
  static CostSpec power(double p) { return {CostKind::Power, p}; }

  void validate() const {
    if (kind == CostKind::Power && !(p > 1.0 && std::isfinite(p)))
      fail(ErrorKind::Validation, "power cost needs p > 1");
  }

  double exponent() const { return kind == CostKind::Quadratic ? 2.0 : p; }

  double h(double t) const {
    if (kind == CostKind::Quadratic) return 0.5 * t * t;
    return std::pow(t, p) / p;
  }

  double h_prime(double t) const {
    if (kind == CostKind::Quadratic) return t;
    return std::pow(t, p - 1.0);
  }

  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

inline std::string describe(const CostSpec& cost) {
  return cost.kind == CostKind::Quadratic ? "quadratic" : "power(p=" + std::to_string(cost.p) + ")";
}

inline double cost(const CostSpec& spec, const SpaceDescriptor& space, const Point& x, const Point& y) {
  return spec.h(distance(space, x, y));
}

/// Inverse of the right derivative of h; h' is continuous here so (h')_+ = h'.
inline double h_prime_plus_inverse(const CostSpec& spec, double s) {
  if (s < 0.0) fail(ErrorKind::Domain, "h'^-1 needs s >= 0");
  if (spec.kind == CostKind::Quadratic || s == 0.0) return s;
  return std::pow(s, 1.0 / (spec.p - 1.0));
}

}  // namespace alexot
