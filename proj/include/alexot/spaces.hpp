#pragma once

// Exact geodesic geometry of the three model surfaces: the Euclidean plane,
// the round sphere of curvature k, and the Euclidean cone of total angle theta.
//
// Point encodings:
//   Plane   (x, y)
//   Sphere  unit 3-vector (x, y, z); distances are scaled by 1/sqrt(k)
//   Cone    (r, phi), r >= 0, phi in [0, theta); the apex is exactly (0, 0)
//
// Tangent frames (components of a TangentVector are taken in these):
//   Plane   global axes
//   Cone    (radial, angular) at r > 0; at the apex of a flat cone (theta = 2*pi)
//           the global axes of the unrolled plane, phi = 0 along the first axis
//   Sphere  (e_theta, e_phi) in polar coordinates about (0, 0, 1); at the north
//           pole e1 = (1,0,0), e2 = (0,1,0); at the south pole e1 = (-1,0,0),
//           e2 = (0,1,0). Every frame is right-handed with outward normal.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "alexot/error.hpp"
#include "alexot/random.hpp"

namespace alexot {

using Vec2 = std::array<double, 2>;
using Vec3 = std::array<double, 3>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultTol = 1e-9;

enum class SpaceKind { Plane, Sphere, Cone };

struct SpaceDescriptor {
  SpaceKind kind = SpaceKind::Plane;
  double curvature = 0.0;    // Sphere only
  double total_angle = 0.0;  // Cone only

  static SpaceDescriptor plane() { return {SpaceKind::Plane, 0.0, 0.0}; }
  static SpaceDescriptor sphere(double k) { return {SpaceKind::Sphere, k, 0.0}; }
  static SpaceDescriptor cone(double theta) { return {SpaceKind::Cone, 0.0, theta}; }

  void validate() const {
    if (kind == SpaceKind::Sphere && !(curvature > 0.0 && std::isfinite(curvature)))
      fail(ErrorKind::Validation, "sphere requires curvature > 0");
    if (kind == SpaceKind::Cone && !(total_angle > 0.0 && std::isfinite(total_angle)))
      fail(ErrorKind::Validation, "cone requires total_angle > 0");
  }

  /// Radius 1/sqrt(k) of the sphere; 1 for the other spaces.
  double sphere_radius() const { return kind == SpaceKind::Sphere ? 1.0 / std::sqrt(curvature) : 1.0; }

  /// A cone of total angle 2*pi is the plane written in polar coordinates.
  bool is_flat_cone() const {
    return kind == SpaceKind::Cone && std::abs(total_angle - kTwoPi) <= 1e-12 * kTwoPi;
  }

  /// Curvature lower bound used for comparison geometry and strainers.
  double curvature_lower_bound() const { return kind == SpaceKind::Sphere ? curvature : 0.0; }

  /// Number of coordinates in the point encoding.
  int point_dimension() const { return kind == SpaceKind::Sphere ? 3 : 2; }

  friend bool operator==(const SpaceDescriptor&, const SpaceDescriptor&) = default;
};

inline std::string describe(const SpaceDescriptor& space) {
  switch (space.kind) {
    case SpaceKind::Plane: return "plane";
    case SpaceKind::Sphere: return "sphere(k=" + std::to_string(space.curvature) + ")";
    case SpaceKind::Cone: return "cone(theta=" + std::to_string(space.total_angle) + ")";
  }
  return "?";
}

struct Point {
  Vec3 coords{0.0, 0.0, 0.0};

  static Point planar(double x, double y) { return {{x, y, 0.0}}; }
  static Point on_sphere(double x, double y, double z) { return {{x, y, z}}; }
  static Point polar(double r, double phi) { return {{r, phi, 0.0}}; }

  double operator[](std::size_t i) const { return coords[i]; }
  double r() const { return coords[0]; }
  double phi() const { return coords[1]; }

  friend bool operator==(const Point&, const Point&) = default;
};

struct TangentVector {
  Point base;
  Vec2 components{0.0, 0.0};
  double norm = 0.0;

  static TangentVector make(const Point& base, Vec2 components) {
    return {base, components, std::hypot(components[0], components[1])};
  }

  TangentVector scaled(double s) const { return make(base, {s * components[0], s * components[1]}); }
  TangentVector operator-() const { return scaled(-1.0); }
};

/// Unit-speed geodesic from `start` to `end`. On the cone a geodesic may run
/// through the apex; it then travels radially inward for start.r() and leaves
/// along the ray at `exit_angle`. At an apex start, `direction` is nominal.
struct Geodesic {
  Point start;
  Point end;
  TangentVector direction;
  double length = 0.0;
  bool passes_through_apex = false;
  double exit_angle = 0.0;
  bool unique = true;
};

struct LogResult {
  TangentVector vector;
  bool unique = true;
  bool through_apex = false;
};

namespace detail {

inline double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double norm3(const Vec3& a) { return std::sqrt(dot3(a, a)); }

inline Vec3 normalized3(const Vec3& a) {
  const double n = norm3(a);
  return {a[0] / n, a[1] / n, a[2] / n};
}

/// Canonical angle in [0, theta).
inline double wrap_angle(double phi, double theta) {
  double w = std::fmod(phi, theta);
  if (w < 0.0) w += theta;
  if (w >= theta) w = 0.0;
  return w;
}

/// Signed angular offset from `from` to `to` on a cone of total angle theta,
/// reduced to (-theta/2, theta/2].
inline double angular_offset(double from, double to, double theta) {
  double d = std::fmod(to - from, theta);
  if (d > 0.5 * theta) d -= theta;
  if (d <= -0.5 * theta) d += theta;
  return d;
}

inline Point cone_point(double r, double phi, double theta) {
  if (r <= 0.0) return Point::polar(0.0, 0.0);
  return Point::polar(r, wrap_angle(phi, theta));
}

inline bool is_apex(const Point& p) { return p.r() == 0.0; }

/// Orthonormal frame (e1, e2) at a unit vector p, per the header convention.
inline std::array<Vec3, 2> sphere_frame(const Vec3& p) {
  const double rho = std::hypot(p[0], p[1]);
  if (rho < 1e-12) {
    if (p[2] > 0.0) return {Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}};
    return {Vec3{-1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}};
  }
  const double c = p[0] / rho;
  const double s = p[1] / rho;
  return {Vec3{p[2] * c, p[2] * s, -rho}, Vec3{-s, c, 0.0}};
}

/// Angle between unit vectors, accurate at both ends of [0, pi].
inline double sphere_angle(const Vec3& x, const Vec3& y) { return std::atan2(norm3(cross3(x, y)), dot3(x, y)); }

}  // namespace detail

inline void validate_point(const SpaceDescriptor& space, const Point& p) {
  for (double c : p.coords)
    if (!std::isfinite(c)) fail(ErrorKind::Validation, "non-finite coordinate");
  switch (space.kind) {
    case SpaceKind::Plane: return;
    case SpaceKind::Sphere:
      if (std::abs(detail::norm3(p.coords) - 1.0) > 1e-12)
        fail(ErrorKind::Validation, "sphere point is not a unit vector");
      return;
    case SpaceKind::Cone:
      if (p.r() < 0.0) fail(ErrorKind::Validation, "negative cone radius");
      if (p.phi() < 0.0 || p.phi() >= space.total_angle)
        fail(ErrorKind::Validation, "cone angle outside [0, total_angle)");
      if (p.r() == 0.0 && p.phi() != 0.0) fail(ErrorKind::Validation, "apex must be encoded as (0, 0)");
      return;
  }
}

/// Builds a valid point from raw coordinates: sphere vectors are checked for
/// unit norm, cone angles wrapped, and the apex canonicalized.
inline Point make_point(const SpaceDescriptor& space, const std::vector<double>& coords) {
  if (static_cast<int>(coords.size()) != space.point_dimension())
    fail(ErrorKind::Validation, "expected " + std::to_string(space.point_dimension()) + " coordinates for " +
                                    describe(space));
  switch (space.kind) {
    case SpaceKind::Plane: return Point::planar(coords[0], coords[1]);
    case SpaceKind::Sphere: {
      Vec3 v{coords[0], coords[1], coords[2]};
      if (std::abs(detail::norm3(v) - 1.0) > 1e-12) fail(ErrorKind::Validation, "sphere point is not a unit vector");
      return {v};
    }
    case SpaceKind::Cone:
      if (coords[0] < 0.0) fail(ErrorKind::Validation, "negative cone radius");
      return detail::cone_point(coords[0], coords[1], space.total_angle);
  }
  return {};
}

inline double distance(const SpaceDescriptor& space, const Point& x, const Point& y) {
  switch (space.kind) {
    case SpaceKind::Plane: return std::hypot(x[0] - y[0], x[1] - y[1]);
    case SpaceKind::Sphere: return space.sphere_radius() * detail::sphere_angle(x.coords, y.coords);
    case SpaceKind::Cone: {
      const double r1 = x.r();
      const double r2 = y.r();
      if (r1 == 0.0 || r2 == 0.0) return r1 + r2;
      const double gap = std::abs(detail::angular_offset(x.phi(), y.phi(), space.total_angle));
      if (gap >= kPi) return r1 + r2;
      // sqrt(r1^2 + r2^2 - 2 r1 r2 cos gap) without cancellation at small gaps
      const double s = std::sin(0.5 * gap);
      return std::sqrt((r1 - r2) * (r1 - r2) + 4.0 * r1 * r2 * s * s);
    }
  }
  return 0.0;
}

/// Regular points have a Euclidean tangent cone; only the apex of a cone with
/// total angle other than 2*pi is singular.
inline bool is_regular(const SpaceDescriptor& space, const Point& x) {
  if (space.kind != SpaceKind::Cone) return true;
  return !detail::is_apex(x) || space.is_flat_cone();
}

inline void require_regular(const SpaceDescriptor& space, const Point& x) {
  if (!is_regular(space, x)) fail(ErrorKind::SingularPoint, "tangent data is undefined at the cone apex");
}

inline bool geodesic_is_unique(const SpaceDescriptor& space, const Point& x, const Point& y, double tol = kDefaultTol) {
  switch (space.kind) {
    case SpaceKind::Plane: return true;
    case SpaceKind::Sphere: {
      const Vec3 s{x[0] + y[0], x[1] + y[1], x[2] + y[2]};
      return detail::norm3(s) > tol;
    }
    case SpaceKind::Cone: {
      if (detail::is_apex(x) || detail::is_apex(y)) return true;
      const double theta = space.total_angle;
      // Past 2*pi the far side is reached through the apex, which is unique.
      if (theta >= kTwoPi - 1e-12) return true;
      const double gap = std::abs(detail::angular_offset(x.phi(), y.phi(), theta));
      return std::abs(gap - 0.5 * theta) > tol;
    }
  }
  return true;
}

inline Point exp_map(const SpaceDescriptor& space, const TangentVector& v) {
  const Point& x = v.base;
  const double a = v.components[0];
  const double b = v.components[1];
  switch (space.kind) {
    case SpaceKind::Plane: return Point::planar(x[0] + a, x[1] + b);
    case SpaceKind::Sphere: {
      if (v.norm == 0.0) return x;
      const auto [e1, e2] = detail::sphere_frame(x.coords);
      const double angle = v.norm * std::sqrt(space.curvature);
      const double c = std::cos(angle);
      const double s = std::sin(angle);
      Vec3 out{};
      for (int i = 0; i < 3; ++i) out[i] = c * x.coords[i] + s * (a * e1[i] + b * e2[i]) / v.norm;
      return {detail::normalized3(out)};
    }
    case SpaceKind::Cone: {
      require_regular(space, x);
      const double theta = space.total_angle;
      if (detail::is_apex(x)) return detail::cone_point(v.norm, std::atan2(b, a), theta);
      // Straight line in the development, base at (r, 0). A line avoiding the
      // origin sweeps less than pi, so atan2 gives its continuous polar angle.
      const double qx = x.r() + a;
      const double qy = b;
      if (qy == 0.0) {
        if (qx == 0.0) return Point::polar(0.0, 0.0);
        if (qx < 0.0) return detail::cone_point(-qx, x.phi() + kPi, theta);
        return detail::cone_point(qx, x.phi(), theta);
      }
      return detail::cone_point(std::hypot(qx, qy), x.phi() + std::atan2(qy, qx), theta);
    }
  }
  return x;
}

/// Initial velocity of a minimal geodesic from x to y scaled to its length.
/// Where minimal geodesics are not unique the one with the smallest initial
/// angle coordinate in [0, 2*pi) is chosen and `unique` is cleared. On a cone
/// with total angle above 2*pi, far pairs are joined through the apex; the
/// returned vector then points at the apex and `through_apex` is set.
inline LogResult log_map(const SpaceDescriptor& space, const Point& x, const Point& y, double tol = kDefaultTol) {
  require_regular(space, x);
  if (x == y) return {TangentVector::make(x, {0.0, 0.0}), true, false};
  switch (space.kind) {
    case SpaceKind::Plane: return {TangentVector::make(x, {y[0] - x[0], y[1] - x[1]}), true, false};
    case SpaceKind::Sphere: {
      const auto [e1, e2] = detail::sphere_frame(x.coords);
      const double len = distance(space, x, y);
      if (!geodesic_is_unique(space, x, y, tol)) return {TangentVector::make(x, {len, 0.0}), false, false};
      const double c = detail::dot3(x.coords, y.coords);
      Vec3 w{y[0] - c * x[0], y[1] - c * x[1], y[2] - c * x[2]};
      const double wn = detail::norm3(w);
      if (wn == 0.0) return {TangentVector::make(x, {0.0, 0.0}), true, false};
      return {TangentVector::make(x, {len * detail::dot3(w, e1) / wn, len * detail::dot3(w, e2) / wn}), true, false};
    }
    case SpaceKind::Cone: {
      const double theta = space.total_angle;
      if (detail::is_apex(x)) {
        // flat cone only (require_regular): the unrolled plane
        return {TangentVector::make(x, {y.r() * std::cos(y.phi()), y.r() * std::sin(y.phi())}), true, false};
      }
      const bool unique = geodesic_is_unique(space, x, y, tol);
      double delta = detail::angular_offset(x.phi(), y.phi(), theta);
      if (!unique && delta < 0.0) delta += theta;
      if (detail::is_apex(y)) return {TangentVector::make(x, {-x.r(), 0.0}), true, false};
      if (std::abs(delta) >= kPi)
        return {TangentVector::make(x, {-(x.r() + y.r()), 0.0}), unique, true};
      return {TangentVector::make(x, {y.r() * std::cos(delta) - x.r(), y.r() * std::sin(delta)}), unique, false};
    }
  }
  return {};
}

inline Geodesic geodesic_between(const SpaceDescriptor& space, const Point& x, const Point& y,
                                 double tol = kDefaultTol) {
  const double len = distance(space, x, y);
  if (len == 0.0) fail(ErrorKind::DegenerateInput, "geodesic endpoints coincide");
  Geodesic g;
  g.start = x;
  g.end = y;
  g.length = len;
  if (space.kind == SpaceKind::Cone) {
    if (detail::is_apex(x)) {
      g.direction = TangentVector::make(x, {1.0, 0.0});
      g.passes_through_apex = true;
      g.exit_angle = y.phi();
      return g;
    }
    if (detail::is_apex(y)) {
      g.direction = TangentVector::make(x, {-1.0, 0.0});
      g.passes_through_apex = true;
      return g;
    }
  }
  const LogResult lr = log_map(space, x, y, tol);
  g.unique = lr.unique;
  g.direction = lr.vector.scaled(1.0 / lr.vector.norm);
  if (lr.through_apex) {
    g.direction = TangentVector::make(x, {-1.0, 0.0});
    g.passes_through_apex = true;
    g.exit_angle = y.phi();
  }
  return g;
}

/// Point at arc length t along a geodesic.
inline Point point_on(const SpaceDescriptor& space, const Geodesic& g, double t) {
  if (space.kind == SpaceKind::Cone && g.passes_through_apex) {
    const double inward = g.start.r();
    if (t < inward) return detail::cone_point(inward - t, g.start.phi(), space.total_angle);
    if (t == inward || g.end.r() == 0.0) return Point::polar(0.0, 0.0);
    return detail::cone_point(t - inward, g.exit_angle, space.total_angle);
  }
  if (t == g.length) return g.end;
  return exp_map(space, g.direction.scaled(t));
}

/// Distance from x to the cut locus of y: points where the minimal geodesic to
/// y stops being unique (and d(., y) stops being differentiable).
inline double distance_to_cut_locus(const SpaceDescriptor& space, const Point& y, const Point& x) {
  switch (space.kind) {
    case SpaceKind::Plane: return std::numeric_limits<double>::infinity();
    case SpaceKind::Sphere: return space.sphere_radius() * (kPi - detail::sphere_angle(x.coords, y.coords));
    case SpaceKind::Cone: {
      const double theta = space.total_angle;
      if (theta >= kTwoPi - 1e-12 || detail::is_apex(y)) return std::numeric_limits<double>::infinity();
      const double beta = std::abs(detail::angular_offset(x.phi(), y.phi() + 0.5 * theta, theta));
      return beta >= 0.5 * kPi ? x.r() : x.r() * std::sin(beta);
    }
  }
  return 0.0;
}

/// Chart at a regular point, centered so that the base maps to the origin
/// and the coordinate axes match the tangent frame at the base.
///   Plane   translation
///   Cone    development of the sector around the base (exact isometry)
///   Sphere  normal coordinates (log/exp at the base)
class LocalChart {
 public:
  LocalChart(SpaceDescriptor space, Point base, double radius) : space_(space), base_(base), radius_(radius) {}

  const Point& base() const { return base_; }
  double radius() const { return radius_; }

  Vec2 forward(const Point& y) const {
    switch (space_.kind) {
      case SpaceKind::Plane: return {y[0] - base_[0], y[1] - base_[1]};
      case SpaceKind::Sphere: return log_map(space_, base_, y).vector.components;
      case SpaceKind::Cone: {
        if (detail::is_apex(base_)) return {y.r() * std::cos(y.phi()), y.r() * std::sin(y.phi())};
        const double d = detail::angular_offset(base_.phi(), y.phi(), space_.total_angle);
        return {y.r() * std::cos(d) - base_.r(), y.r() * std::sin(d)};
      }
    }
    return {};
  }

  Point inverse(const Vec2& u) const { return exp_map(space_, TangentVector::make(base_, u)); }

  /// delta such that chart distances on the chart ball lie within a factor
  /// (1 + delta) of true distances. Zero where the chart is an isometry.
  double distortion_bound() const {
    if (space_.kind != SpaceKind::Sphere) return 0.0;
    const double a = radius_ * std::sqrt(space_.curvature);
    return a / std::sin(a) - 1.0;
  }

 private:
  SpaceDescriptor space_;
  Point base_;
  double radius_;
};

/// Largest admissible chart radius at a regular point (exclusive).
inline double chart_radius_limit(const SpaceDescriptor& space, const Point& x) {
  switch (space.kind) {
    case SpaceKind::Plane: return std::numeric_limits<double>::infinity();
    case SpaceKind::Sphere: return 0.5 * kPi * space.sphere_radius();
    case SpaceKind::Cone:
      if (detail::is_apex(x)) return space.is_flat_cone() ? std::numeric_limits<double>::infinity() : 0.0;
      // the developed ball must miss the apex and must not overlap itself
      return x.r() * std::sin(std::min(0.25 * space.total_angle, 0.5 * kPi));
  }
  return 0.0;
}

inline LocalChart local_chart(const SpaceDescriptor& space, const Point& x, double radius) {
  if (!is_regular(space, x)) fail(ErrorKind::Chart, "no chart at a singular point");
  if (!(radius > 0.0)) fail(ErrorKind::Chart, "chart radius must be positive");
  if (radius >= chart_radius_limit(space, x)) fail(ErrorKind::Chart, "chart radius exceeds the local isometry radius");
  return LocalChart(space, x, radius);
}

// ---------------------------------------------------------------------------
// Sampling regions

struct RectangleRegion {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Cell-centered nx-by-ny lattice in a rectangle (deterministic).
struct GridRegion {
  int nx = 1, ny = 1;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Cone annulus r0 <= r <= r1, phi0 <= phi < phi1; phi1 unset means the full angle.
struct AnnulusRegion {
  double r0 = 0.0, r1 = 1.0;
  double phi0 = 0.0;
  std::optional<double> phi1;
};

/// Sphere band of polar angles (measured from (0,0,1)) in [theta0, theta1].
struct CapRegion {
  double theta0 = 0.0, theta1 = kPi;
};

using Region = std::variant<RectangleRegion, GridRegion, AnnulusRegion, CapRegion>;

/// Region used when a caller does not specify one.
inline Region default_region(const SpaceDescriptor& space) {
  switch (space.kind) {
    case SpaceKind::Plane: return RectangleRegion{-1.0, 1.0, -1.0, 1.0};
    case SpaceKind::Sphere: return CapRegion{0.0, kPi};
    case SpaceKind::Cone: return AnnulusRegion{0.0, 1.0, 0.0, std::nullopt};
  }
  return RectangleRegion{};
}

/// One point uniform for the area measure on a continuous region.
inline Point sample_point(const SpaceDescriptor& space, const Region& region, Rng& rng) {
  auto wrong_space = [&](const char* what) {
    fail(ErrorKind::Validation, std::string(what) + " region is not defined on " + describe(space));
  };
  return std::visit(
      [&](const auto& reg) -> Point {
        using R = std::decay_t<decltype(reg)>;
        if constexpr (std::is_same_v<R, RectangleRegion>) {
          if (space.kind != SpaceKind::Plane) wrong_space("rectangle");
          const double x = rng.uniform(reg.x0, reg.x1);
          const double y = rng.uniform(reg.y0, reg.y1);
          return Point::planar(x, y);
        } else if constexpr (std::is_same_v<R, GridRegion>) {
          fail(ErrorKind::Validation, "grid regions are deterministic; use sample_region");
        } else if constexpr (std::is_same_v<R, AnnulusRegion>) {
          if (space.kind != SpaceKind::Cone) wrong_space("annulus");
          if (reg.r0 < 0.0 || reg.r1 < reg.r0) fail(ErrorKind::Validation, "annulus needs 0 <= r0 <= r1");
          const double phi1 = reg.phi1.value_or(reg.phi0 + space.total_angle);
          const double a = reg.r0 * reg.r0;
          const double b = reg.r1 * reg.r1;
          const double r = std::sqrt(a + (b - a) * rng.uniform());  // density proportional to r
          const double phi = rng.uniform(reg.phi0, phi1);
          return detail::cone_point(r, phi, space.total_angle);
        } else {
          if (space.kind != SpaceKind::Sphere) wrong_space("cap");
          if (reg.theta0 < 0.0 || reg.theta1 > kPi || reg.theta1 < reg.theta0)
            fail(ErrorKind::Validation, "cap needs 0 <= theta0 <= theta1 <= pi");
          const double z = rng.uniform(std::cos(reg.theta1), std::cos(reg.theta0));  // uniform in cos(theta)
          const double phi = rng.uniform(0.0, kTwoPi);
          const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
          return {detail::normalized3({s * std::cos(phi), s * std::sin(phi), z})};
        }
      },
      region);
}

/// n points i.i.d. uniform for the area measure restricted to the region
/// (grid regions are deterministic and require n = nx * ny).
inline std::vector<Point> sample_region(const SpaceDescriptor& space, const Region& region, std::size_t n,
                                        std::uint64_t seed) {
  space.validate();
  std::vector<Point> out;
  if (n == 0) return out;
  out.reserve(n);
  if (const auto* grid = std::get_if<GridRegion>(&region)) {
    if (space.kind != SpaceKind::Plane) fail(ErrorKind::Validation, "grid region is not defined on " + describe(space));
    if (grid->nx <= 0 || grid->ny <= 0 ||
        n != static_cast<std::size_t>(grid->nx) * static_cast<std::size_t>(grid->ny))
      fail(ErrorKind::Validation, "grid region needs n = nx * ny");
    for (int j = 0; j < grid->ny; ++j)
      for (int i = 0; i < grid->nx; ++i)
        out.push_back(Point::planar(grid->x0 + (grid->x1 - grid->x0) * (i + 0.5) / grid->nx,
                                    grid->y0 + (grid->y1 - grid->y0) * (j + 0.5) / grid->ny));
    return out;
  }
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sample_point(space, region, rng));
  return out;
}

/// Largest pairwise distance of a point set (O(n^2)).
inline double diameter(const SpaceDescriptor& space, const std::vector<Point>& pts) {
  double d = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, distance(space, pts[i], pts[j]));
  return d;
}

}  // namespace alexot
