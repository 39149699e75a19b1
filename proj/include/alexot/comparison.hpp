#pragma once

// Triangle comparison against the constant-curvature model surface S^2_k.
//
// Model-space trigonometry is written in half-angle form,
//   k = 0:  d^2           = (a - b)^2 + 4ab sin^2(A/2)
//   k > 0:  sin^2(d/2)    = sin^2((a-b)/2)  + sin a sin b sin^2(A/2)
//   k < 0:  sinh^2(d/2)   = sinh^2((a-b)/2) + sinh a sinh b sin^2(A/2)
// (sides scaled by sqrt|k|), which keeps full relative precision for thin
// and nearly degenerate triangles where the law of cosines cancels.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "alexot/error.hpp"
#include "alexot/random.hpp"
#include "alexot/spaces.hpp"

namespace alexot {

namespace detail {

/// sin^2(A/2) for the model triangle with sides a, b enclosing angle A and
/// opposite side c. Unclamped; outside [0, 1] when no such triangle exists.
inline double half_angle_sin2(double k, double a, double b, double c) {
  if (a == 0.0 || b == 0.0) return 0.0;
  if (k == 0.0) return (c - a + b) * (c + a - b) / (4.0 * a * b);
  const double s = std::sqrt(std::abs(k));
  if (k > 0.0) {
    const double den = std::sin(a * s) * std::sin(b * s);
    if (den <= 0.0) return 0.0;
    return std::sin(0.5 * s * (c - a + b)) * std::sin(0.5 * s * (c + a - b)) / den;
  }
  return std::sinh(0.5 * s * (c - a + b)) * std::sinh(0.5 * s * (c + a - b)) / (std::sinh(a * s) * std::sinh(b * s));
}

/// Model distance between the ends of sides a, b enclosing an angle with
/// sin^2(angle/2) = s2.
inline double model_distance_half(double k, double a, double b, double s2) {
  s2 = std::clamp(s2, 0.0, 1.0);
  if (k == 0.0) return std::sqrt((a - b) * (a - b) + 4.0 * a * b * s2);
  const double s = std::sqrt(std::abs(k));
  if (k > 0.0) {
    const double h0 = std::sin(0.5 * s * (a - b));
    const double h = h0 * h0 + std::sin(a * s) * std::sin(b * s) * s2;
    return 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0))) / s;
  }
  const double h0 = std::sinh(0.5 * s * (a - b));
  const double h = h0 * h0 + std::sinh(a * s) * std::sinh(b * s) * s2;
  return 2.0 * std::asinh(std::sqrt(std::max(h, 0.0))) / s;
}

}  // namespace detail

/// Distance in S^2_k between points at distances a and b from a common
/// vertex, separated there by `angle`.
inline double model_distance(double k, double a, double b, double angle) {
  if (!(a >= 0.0) || !(b >= 0.0)) fail(ErrorKind::Domain, "model sides must be nonnegative");
  if (!(angle >= -1e-12 && angle <= kPi + 1e-12)) fail(ErrorKind::Domain, "model angle must lie in [0, pi]");
  if (k > 0.0) {
    const double diam = kPi / std::sqrt(k);
    if (a > diam * (1.0 + 1e-12) || b > diam * (1.0 + 1e-12)) fail(ErrorKind::Domain, "side exceeds the model diameter");
  }
  const double s = std::sin(0.5 * std::clamp(angle, 0.0, kPi));
  return detail::model_distance_half(k, a, b, s * s);
}

struct ComparisonAngle {
  double angle = 0.0;
  bool degenerate = false;  // triangle flat within tolerance; angle clamped to 0 or pi
};

/// Angle at the vertex of the model triangle with sides a, b meeting there
/// and c opposite.
inline ComparisonAngle comparison_angle_from_sides(double k, double a, double b, double c, double tol = kDefaultTol) {
  if (a <= 0.0 || b <= 0.0) fail(ErrorKind::DegenerateInput, "comparison angle needs sides of positive length");
  if (k > 0.0) {
    const double diam = kPi / std::sqrt(k);
    if (std::max({a, b, c}) > diam * (1.0 + 1e-12) || a + b + c > 2.0 * diam * (1.0 + 1e-12))
      fail(ErrorKind::Domain, "no comparison triangle in the model sphere");
  }
  const double raw = detail::half_angle_sin2(k, a, b, c);
  ComparisonAngle out;
  out.degenerate = raw <= tol || raw >= 1.0 - tol;
  const double s2 = std::clamp(raw, 0.0, 1.0);
  out.angle = 2.0 * std::asin(std::sqrt(s2));
  return out;
}

inline ComparisonAngle comparison_angle(const SpaceDescriptor& space, const Point& vertex, const Point& x,
                                        const Point& y, double k, double tol = kDefaultTol) {
  return comparison_angle_from_sides(k, distance(space, vertex, x), distance(space, vertex, y), distance(space, x, y),
                                     tol);
}

struct ComparisonWitness {
  Point p;
  Point start;
  Point end;
  double t = 0.0;  // fraction of the geodesic, in [0, 1]
};

struct ComparisonReport {
  std::size_t samples = 0;
  std::size_t evaluations = 0;
  std::size_t skipped = 0;
  double min_slack = std::numeric_limits<double>::infinity();
  double mean_slack = 0.0;
  std::optional<ComparisonWitness> witness;

  bool certified(double tol) const { return min_slack >= -tol; }
};

/// Slack d(p, gamma(t)) - delta_k(pbar, gammabar(t)) for the geodesic x -> y at
/// fraction t; nullopt when no comparison triangle exists in S^2_k.
inline std::optional<double> comparison_slack(const SpaceDescriptor& space, double k, const Point& p,
                                              const Geodesic& g, double t) {
  const double a = distance(space, p, g.start);
  const double b = distance(space, p, g.end);
  const double len = g.length;
  if (k > 0.0) {
    const double diam = kPi / std::sqrt(k);
    if (std::max({a, b, len}) > diam * (1.0 + 1e-12) || a + b + len > 2.0 * diam * (1.0 + 1e-12)) return std::nullopt;
  }
  const double s2 = detail::half_angle_sin2(k, a, len, b);
  const double model = detail::model_distance_half(k, a, t * len, s2);
  return distance(space, p, point_on(space, g, t * len)) - model;
}

/// Samples (p, x, y) from `region` and evaluates the comparison slack along
/// the geodesic x -> y at t = 0.1, ..., 0.9 and one random t. Each sample
/// draws from its own seed derived from `seed`.
inline ComparisonReport check_triangle_comparison(const SpaceDescriptor& space, double k, std::size_t n_samples,
                                                  std::uint64_t seed, const std::optional<Region>& region = {}) {
  space.validate();
  const Region reg = region.value_or(default_region(space));
  ComparisonReport report;
  double total = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    Rng rng(derive_seed(seed, s));
    const Point p = sample_point(space, reg, rng);
    const Point x = sample_point(space, reg, rng);
    const Point y = sample_point(space, reg, rng);
    const double t_random = rng.uniform();
    ++report.samples;
    if (distance(space, x, y) == 0.0) {
      ++report.skipped;
      continue;
    }
    const Geodesic g = geodesic_between(space, x, y);
    for (int step = 1; step <= 10; ++step) {
      const double t = step < 10 ? 0.1 * step : t_random;
      const auto slack = comparison_slack(space, k, p, g, t);
      if (!slack) {
        ++report.skipped;
        break;
      }
      ++report.evaluations;
      total += *slack;
      if (*slack < report.min_slack) {
        report.min_slack = *slack;
        report.witness = ComparisonWitness{p, x, y, t};
      }
    }
  }
  if (report.evaluations > 0) report.mean_slack = total / static_cast<double>(report.evaluations);
  return report;
}

namespace detail {

inline double angle_between(const Vec2& u, const Vec2& v) {
  const double cross = u[0] * v[1] - u[1] * v[0];
  const double dot = u[0] * v[0] + u[1] * v[1];
  return std::atan2(std::abs(cross), dot);
}

}  // namespace detail

/// Smallest angle at x between `direction` and a minimal geodesic from x to a.
inline double min_angle_to(const SpaceDescriptor& space, const TangentVector& direction, const Point& a,
                           double tol = kDefaultTol) {
  const Point& x = direction.base;
  const LogResult lr = log_map(space, x, a, tol);
  double best = detail::angle_between(direction.components, lr.vector.components);
  if (!lr.unique) {
    if (space.kind == SpaceKind::Sphere) return 0.0;  // every direction at x reaches the antipode
    if (space.kind == SpaceKind::Cone) {
      // the other development of the tie, on the negative side
      const double delta = detail::angular_offset(x.phi(), a.phi(), space.total_angle);
      const double other = delta > 0.0 ? delta - space.total_angle : delta + space.total_angle;
      const Vec2 v{a.r() * std::cos(other) - x.r(), a.r() * std::sin(other)};
      best = std::min(best, detail::angle_between(direction.components, v));
    }
  }
  return best;
}

struct FirstVariationRow {
  double t = 0.0;
  double measured = 0.0;
  double predicted = 0.0;
  double error = 0.0;
};

/// d(a, gamma(t)) against d(a, gamma(0)) - t cos(angle_min) for a unit-speed
/// geodesic gamma; error / t should vanish as t -> 0.
inline std::vector<FirstVariationRow> check_first_variation(const SpaceDescriptor& space, const Point& a,
                                                            const Geodesic& g, std::span<const double> t_values) {
  require_regular(space, g.start);
  const double d0 = distance(space, a, g.start);
  if (d0 == 0.0) fail(ErrorKind::DegenerateInput, "first variation needs a != gamma(0)");
  const double slope = std::cos(min_angle_to(space, g.direction, a));
  std::vector<FirstVariationRow> rows;
  for (double t : t_values) {
    FirstVariationRow row;
    row.t = t;
    row.measured = distance(space, a, point_on(space, g, t));
    row.predicted = d0 - t * slope;
    row.error = row.measured - row.predicted;
    rows.push_back(row);
  }
  return rows;
}

/// The default t ladder for first-variation checks.
inline std::vector<double> default_first_variation_ts() { return {1e-1, 1e-2, 1e-3, 1e-4}; }

struct FirstVariationCase {
  Point a;
  Geodesic geodesic;
  double bound_t = 0.0;      // leading-order constant from the coarse step
  double ratio_fine = 0.0;   // |error| / t at the fine step
  double allowed_fine = 0.0; // 10 x the leading-order bound at the fine step, plus the rounding floor
  bool passed = false;
};

struct FirstVariationSummary {
  std::size_t configurations = 0;
  std::size_t failures = 0;
  double worst_margin = -std::numeric_limits<double>::infinity();  // max ratio_fine / allowed_fine
  std::vector<FirstVariationCase> cases;

  bool passed() const { return failures == 0; }
};

/// Region used for first-variation configurations: away from the cone apex so
/// every short geodesic stays in the regular part.
inline Region first_variation_region(const SpaceDescriptor& space) {
  if (space.kind == SpaceKind::Cone) return AnnulusRegion{0.5, 1.5, 0.0, std::nullopt};
  return default_region(space);
}

/// Ratio test on seeded (a, gamma) configurations. The error of the first
/// variation formula is O(t^2) along smooth pieces, so with C = |e(t0)| / t0^2
/// the fine step must satisfy |e(t1)| / t1 <= 10 C t1 + floor.
inline FirstVariationSummary check_first_variation_ratio(const SpaceDescriptor& space, std::size_t n_configs,
                                                         std::uint64_t seed, double t_coarse = 1e-2,
                                                         double t_fine = 1e-4, double floor = 1e-10) {
  space.validate();
  const Region reg = first_variation_region(space);
  FirstVariationSummary summary;
  for (std::size_t s = 0; s < n_configs; ++s) {
    Rng rng(derive_seed(seed, s));
    const Point x = sample_point(space, reg, rng);
    const Point a = sample_point(space, reg, rng);
    const double heading = rng.uniform(0.0, kTwoPi);
    if (distance(space, a, x) < 1e-3 || !is_regular(space, x)) continue;
    Geodesic g;
    g.start = x;
    g.direction = TangentVector::make(x, {std::cos(heading), std::sin(heading)});
    g.length = 1.0;
    g.end = exp_map(space, g.direction);
    const std::array<double, 2> ts{t_coarse, t_fine};
    const auto rows = check_first_variation(space, a, g, ts);
    FirstVariationCase c;
    c.a = a;
    c.geodesic = g;
    c.bound_t = std::abs(rows[0].error) / (t_coarse * t_coarse);
    c.ratio_fine = std::abs(rows[1].error) / t_fine;
    c.allowed_fine = 10.0 * c.bound_t * t_fine + floor;
    c.passed = c.ratio_fine <= c.allowed_fine;
    ++summary.configurations;
    if (!c.passed) ++summary.failures;
    summary.worst_margin = std::max(summary.worst_margin, c.ratio_fine / c.allowed_fine);
    summary.cases.push_back(c);
  }
  return summary;
}

/// Strainer test: for pairs (x_i, y_i), every comparison angle x_i p y_i
/// exceeds pi - eps and every cross angle (x_i p x_j, x_i p y_j, y_i p y_j,
/// i != j) exceeds pi/2 - 10 eps. Inequalities are strict.
inline bool is_strained(const SpaceDescriptor& space, const Point& p,
                        std::span<const std::pair<Point, Point>> strainer, double epsilon) {
  const double k = space.curvature_lower_bound();
  for (const auto& [x, y] : strainer)
    if (distance(space, p, x) == 0.0 || distance(space, p, y) == 0.0)
      fail(ErrorKind::DegenerateInput, "strainer points must differ from p");
  const auto angle = [&](const Point& u, const Point& v) { return comparison_angle(space, p, u, v, k).angle; };
  for (std::size_t i = 0; i < strainer.size(); ++i) {
    const auto& [xi, yi] = strainer[i];
    if (!(angle(xi, yi) > kPi - epsilon)) return false;
    for (std::size_t j = 0; j < strainer.size(); ++j) {
      if (i == j) continue;
      const auto& [xj, yj] = strainer[j];
      const double bound = 0.5 * kPi - 10.0 * epsilon;
      if (!(angle(xi, xj) > bound) || !(angle(xi, yj) > bound) || !(angle(yi, yj) > bound)) return false;
    }
  }
  return true;
}

}  // namespace alexot
