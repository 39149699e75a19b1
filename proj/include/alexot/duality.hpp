#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "alexot/costs.hpp"
#include "alexot/error.hpp"
#include "alexot/spaces.hpp"

namespace alexot {

struct Atom {
  Point point;
  double weight = 0.0;
};

/// Finitely supported probability measure.
struct DiscreteMeasure {
  std::vector<Atom> atoms;

  static DiscreteMeasure uniform(const std::vector<Point>& points) {
    DiscreteMeasure m;
    m.atoms.reserve(points.size());
    for (const auto& p : points) m.atoms.push_back({p, 1.0 / static_cast<double>(points.size())});
    return m;
  }

  static DiscreteMeasure weighted(const std::vector<Point>& points, const std::vector<double>& weights) {
    if (points.size() != weights.size()) fail(ErrorKind::Validation, "points and weights differ in length");
    DiscreteMeasure m;
    for (std::size_t i = 0; i < points.size(); ++i) m.atoms.push_back({points[i], weights[i]});
    return m;
  }

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }

  std::vector<Point> points() const {
    std::vector<Point> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(a.point);
    return out;
  }

  std::vector<double> weights() const {
    std::vector<double> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(a.weight);
    return out;
  }

  void validate(const SpaceDescriptor& space) const {
    if (atoms.empty()) fail(ErrorKind::Validation, "measure has no atoms");
    double total = 0.0;
    for (const auto& a : atoms) {
      validate_point(space, a.point);
      if (!(a.weight > 0.0) || !std::isfinite(a.weight)) fail(ErrorKind::Validation, "atom weight must be positive");
      total += a.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::Validation, "weights do not sum to 1");
    std::vector<Vec3> keys;
    keys.reserve(atoms.size());
    for (const auto& a : atoms) keys.push_back(a.point.coords);
    std::sort(keys.begin(), keys.end());
    if (std::adjacent_find(keys.begin(), keys.end()) != keys.end())
      fail(ErrorKind::Validation, "measure has repeated atoms");
  }
};

/// Dense n-by-m cost table, row = source atom, column = target atom.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  CostMatrix transposed() const {
    CostMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline CostMatrix cost_matrix(const CostSpec& spec, const SpaceDescriptor& space, std::span<const Point> from,
                              std::span<const Point> to) {
  CostMatrix c(from.size(), to.size());
  for (std::size_t i = 0; i < from.size(); ++i)
    for (std::size_t j = 0; j < to.size(); ++j) c(i, j) = cost(spec, space, from[i], to[j]);
  return c;
}

inline CostMatrix cost_matrix(const CostSpec& spec, const SpaceDescriptor& space, const DiscreteMeasure& mu0,
                              const DiscreteMeasure& mu1) {
  const auto a = mu0.points();
  const auto b = mu1.points();
  return cost_matrix(spec, space, a, b);
}

/// Dual variables: phi on source atoms, phi_c on target atoms.
struct PotentialPair {
  std::vector<double> phi;
  std::vector<double> phi_c;

  /// Removes the additive gauge: shifts so that min phi = 0.
  void normalize() {
    if (phi.empty()) return;
    const double shift = *std::min_element(phi.begin(), phi.end());
    for (double& v : phi) v -= shift;
    for (double& v : phi_c) v += shift;
  }
};

/// Result of a finite c-transform. `ties[j]` lists every index attaining the
/// minimum for output j within the tie tolerance, smallest index first.
struct CTransform {
  std::vector<double> values;
  std::vector<std::size_t> argmin;
  std::vector<std::vector<std::size_t>> ties;
};

/// phi^c(j) = min_i c(i, j) - phi(i), an exact minimum over the rows.
inline CTransform c_transform(const CostMatrix& c, std::span<const double> phi, double tie_tol = 1e-9) {
  if (c.rows() == 0) fail(ErrorKind::Domain, "c-transform over an empty set");
  if (phi.size() != c.rows()) fail(ErrorKind::Validation, "potential length does not match cost rows");
  CTransform out;
  out.values.assign(c.cols(), std::numeric_limits<double>::infinity());
  out.argmin.assign(c.cols(), 0);
  out.ties.resize(c.cols());
  for (std::size_t j = 0; j < c.cols(); ++j) {
    for (std::size_t i = 0; i < c.rows(); ++i) {
      const double v = c(i, j) - phi[i];
      if (v < out.values[j]) {
        out.values[j] = v;
        out.argmin[j] = i;
      }
    }
    for (std::size_t i = 0; i < c.rows(); ++i)
      if (c(i, j) - phi[i] <= out.values[j] + tie_tol) out.ties[j].push_back(i);
  }
  return out;
}

/// Transform of a function on the columns back onto the rows:
/// psi^c(i) = min_j c(i, j) - psi(j). The cost is not assumed symmetric.
inline CTransform c_transform_to_rows(const CostMatrix& c, std::span<const double> psi, double tie_tol = 1e-9) {
  return c_transform(c.transposed(), psi, tie_tol);
}

/// Point-set form: values live on `from`, the result on `to`.
inline std::vector<double> c_transform(const CostSpec& spec, const SpaceDescriptor& space,
                                       std::span<const double> values, std::span<const Point> from,
                                       std::span<const Point> to) {
  if (from.empty()) fail(ErrorKind::Domain, "c-transform over an empty set");
  return c_transform(cost_matrix(spec, space, from, to), values).values;
}

struct ConcavityCheck {
  bool concave = false;
  double max_deviation = 0.0;
};

/// phi on A is c-concave (relative to B) when its double transform through B
/// gives phi back.
inline ConcavityCheck is_c_concave(const CostSpec& spec, const SpaceDescriptor& space, std::span<const double> values,
                                   std::span<const Point> on, std::span<const Point> against, double tol) {
  const CostMatrix c = cost_matrix(spec, space, on, against);
  const CTransform once = c_transform(c, values);
  const CTransform twice = c_transform_to_rows(c, once.values);
  ConcavityCheck out;
  for (std::size_t i = 0; i < values.size(); ++i)
    out.max_deviation = std::max(out.max_deviation, std::abs(twice.values[i] - values[i]));
  out.concave = out.max_deviation <= tol;
  return out;
}

inline double dual_objective(const PotentialPair& pair, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  if (pair.phi.size() != mu0.size() || pair.phi_c.size() != mu1.size())
    fail(ErrorKind::Validation, "potential lengths do not match the measures");
  double j = 0.0;
  for (std::size_t i = 0; i < mu0.size(); ++i) j += pair.phi[i] * mu0.atoms[i].weight;
  for (std::size_t k = 0; k < mu1.size(); ++k) j += pair.phi_c[k] * mu1.atoms[k].weight;
  return j;
}

/// Largest violation of phi(i) + phi_c(j) <= c(i, j) (0 when feasible).
inline double max_dual_violation(const CostMatrix& c, const PotentialPair& pair) {
  double worst = 0.0;
  for (std::size_t i = 0; i < c.rows(); ++i)
    for (std::size_t j = 0; j < c.cols(); ++j) worst = std::max(worst, pair.phi[i] + pair.phi_c[j] - c(i, j));
  return worst;
}

}  // namespace alexot
