#pragma once

// Semi-discrete verification of the Monge map x -> exp_x(-grad psi(x)).
//
// psi(x) = min_j c(x, y_j) - phi_c[j] is the c-transform of the target
// potentials, so it is c-concave by construction. Its gradient at a regular,
// non-tie point is taken by central differences in the exact local chart.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "alexot/costs.hpp"
#include "alexot/duality.hpp"
#include "alexot/error.hpp"
#include "alexot/random.hpp"
#include "alexot/solver.hpp"
#include "alexot/spaces.hpp"

namespace alexot {

struct SemiDiscretePotential {
  SpaceDescriptor space;
  CostSpec cost;
  std::vector<Point> targets;
  std::vector<double> phi_c;
};

struct PsiValue {
  double value = 0.0;
  std::size_t argmin = 0;
  bool tie = false;
};

inline PsiValue eval_psi(const SemiDiscretePotential& pot, const Point& x, double tie_tol = 1e-9) {
  if (pot.targets.empty()) fail(ErrorKind::Domain, "potential has no targets");
  PsiValue out;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<double> vals(pot.targets.size());
  for (std::size_t j = 0; j < pot.targets.size(); ++j) {
    vals[j] = cost(pot.cost, pot.space, x, pot.targets[j]) - pot.phi_c[j];
    if (vals[j] < out.value) {
      out.value = vals[j];
      out.argmin = j;
    }
  }
  for (std::size_t j = 0; j < vals.size(); ++j)
    if (j != out.argmin && vals[j] <= out.value + tie_tol) out.tie = true;
  return out;
}

/// Central-difference gradient of psi at x, in the tangent frame at x.
/// Throws NotDifferentiable at singular points, at ties, when the stencil
/// straddles a cell boundary, or when x is within two steps of the cut locus
/// of its target (where psi has a kink).
inline TangentVector grad_psi(const SemiDiscretePotential& pot, const Point& x, double fd_step) {
  if (!(fd_step > 0.0)) fail(ErrorKind::Validation, "fd_step must be positive");
  if (!is_regular(pot.space, x)) fail(ErrorKind::NotDifferentiable, "psi is not differentiable at a singular point");
  const PsiValue center = eval_psi(pot, x);
  if (center.tie) fail(ErrorKind::NotDifferentiable, "psi has a tie at x");
  if (distance_to_cut_locus(pot.space, pot.targets[center.argmin], x) <= 2.0 * fd_step)
    fail(ErrorKind::NotDifferentiable, "x is too close to the cut locus of its target");
  if (2.0 * fd_step >= chart_radius_limit(pot.space, x))
    fail(ErrorKind::NotDifferentiable, "finite-difference stencil does not fit in a chart at x");
  const LocalChart chart = local_chart(pot.space, x, 2.0 * fd_step);
  Vec2 g{};
  for (int axis = 0; axis < 2; ++axis) {
    Vec2 u{};
    u[axis] = fd_step;
    const PsiValue plus = eval_psi(pot, chart.inverse(u));
    u[axis] = -fd_step;
    const PsiValue minus = eval_psi(pot, chart.inverse(u));
    if (plus.argmin != center.argmin || minus.argmin != center.argmin)
      fail(ErrorKind::NotDifferentiable, "finite-difference stencil crosses a cell boundary");
    g[axis] = (plus.value - minus.value) / (2.0 * fd_step);
  }
  return TangentVector::make(x, g);
}

/// Length of the displacement taken by the map: (h')_+^{-1}(|grad psi|).
inline double displacement_length(const CostSpec& cost, double grad_norm) { return h_prime_plus_inverse(cost, grad_norm); }

/// F(x) = exp_x(-((h')^{-1}(|g|) / |g|) g) for g = grad psi(x); F(x) = x when
/// |g| <= zero_tol. For the quadratic cost this is exp_x(-grad psi(x)).
inline Point monge_point(const SemiDiscretePotential& pot, const Point& x, double fd_step, double zero_tol = 1e-10) {
  const TangentVector g = grad_psi(pot, x, fd_step);
  if (g.norm <= zero_tol) return x;
  const double len = displacement_length(pot.cost, g.norm);
  return exp_map(pot.space, g.scaled(-len / g.norm));
}

enum class AtomStatus { Verified, Split, Singular, Tie, Mismatch };

inline const char* to_string(AtomStatus s) {
  switch (s) {
    case AtomStatus::Verified: return "verified";
    case AtomStatus::Split: return "split";
    case AtomStatus::Singular: return "singular";
    case AtomStatus::Tie: return "tie";
    case AtomStatus::Mismatch: return "mismatch";
  }
  return "?";
}

struct AtomRecord {
  std::size_t index = 0;
  Point x;
  std::size_t assigned = 0;  // first support target for split atoms
  AtomStatus status = AtomStatus::Verified;
  double grad_norm = std::numeric_limits<double>::quiet_NaN();
  double distance_to_assigned = std::numeric_limits<double>::quiet_NaN();
  double formula_residual = std::numeric_limits<double>::quiet_NaN();
  double norm_residual = std::numeric_limits<double>::quiet_NaN();
};

/// Which optimal dual pair defines psi.
enum class DualChoice {
  Interior,      // relative interior of the optimal dual face (fewest ties)
  SolverVertex,  // the basis-tree potentials returned by the simplex
};

struct MapOptions {
  double fd_step = 0.0;  // 0: 1e-5 times the diameter of both supports
  double tol = 1e-6;
  double zero_gradient_tol = 1e-10;
  DualChoice dual = DualChoice::Interior;
};

struct MapVerificationReport {
  std::size_t n_atoms = 0;
  std::size_t n_split = 0;
  std::size_t n_verified = 0;
  std::size_t n_skipped_singular = 0;
  std::size_t n_skipped_tie = 0;
  std::size_t n_mismatch = 0;        // assigned target differs from the argmin of psi
  std::size_t n_zero_gradient = 0;   // verified atoms that took the F(x) = x branch
  double max_formula_residual = 0.0; // d(F(x), assigned target)
  double max_norm_residual = 0.0;    // |(h')^{-1}(|grad psi|) - d(x, assigned)|
  double max_equality_residual = 0.0;
  double fd_step = 0.0;
  double tol = 0.0;
  double cost_total = 0.0;
  double gap = 0.0;
  std::vector<AtomRecord> atoms;

  std::size_t skipped() const { return n_skipped_singular + n_skipped_tie; }
  double split_fraction() const { return n_atoms ? static_cast<double>(n_split) / static_cast<double>(n_atoms) : 0.0; }
  bool accounting_exact() const { return n_split + n_verified + skipped() + n_mismatch == n_atoms; }
  bool passed() const {
    return accounting_exact() && n_mismatch == 0 && max_formula_residual <= tol && max_norm_residual <= tol;
  }
};

inline double support_diameter(const SpaceDescriptor& space, const DiscreteMeasure& mu0, const DiscreteMeasure& mu1) {
  std::vector<Point> all = mu0.points();
  const auto b = mu1.points();
  all.insert(all.end(), b.begin(), b.end());
  return diameter(space, all);
}

inline PotentialPair choose_dual(const CostMatrix& c, const Solution& sol, DualChoice choice) {
  return choice == DualChoice::Interior ? interior_dual(c, sol.plan) : sol.potentials;
}

inline MapVerificationReport verify_graph_and_formula(const SpaceDescriptor& space, const CostSpec& cost_spec,
                                                      const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                                      const MapOptions& options = {}) {
  space.validate();
  cost_spec.validate();
  mu0.validate(space);
  mu1.validate(space);
  const CostMatrix c = cost_matrix(cost_spec, space, mu0, mu1);
  const auto w0 = mu0.weights();
  const auto w1 = mu1.weights();
  const Solution sol = solve_exact(c, w0, w1);
  const PotentialPair dual = choose_dual(c, sol, options.dual);

  MapVerificationReport report;
  report.n_atoms = mu0.size();
  report.tol = options.tol;
  report.fd_step = options.fd_step > 0.0 ? options.fd_step : 1e-5 * std::max(support_diameter(space, mu0, mu1), 1e-300);
  report.cost_total = sol.plan.cost_total;
  report.gap = duality_gap(sol.plan, dual, mu0, mu1);

  const SemiDiscretePotential pot{space, cost_spec, mu1.points(), dual.phi_c};
  const auto support = sol.plan.row_support();
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    AtomRecord rec;
    rec.index = i;
    rec.x = mu0.atoms[i].point;
    rec.assigned = support[i].empty() ? 0 : support[i].front();
    if (support[i].size() != 1) {
      rec.status = AtomStatus::Split;
      ++report.n_split;
      report.atoms.push_back(rec);
      continue;
    }
    const Point& y = pot.targets[rec.assigned];
    rec.distance_to_assigned = distance(space, rec.x, y);
    if (!is_regular(space, rec.x)) {
      rec.status = AtomStatus::Singular;
      ++report.n_skipped_singular;
      report.atoms.push_back(rec);
      continue;
    }
    const PsiValue psi = eval_psi(pot, rec.x);
    if (psi.tie) {
      rec.status = AtomStatus::Tie;
      ++report.n_skipped_tie;
      report.atoms.push_back(rec);
      continue;
    }
    if (psi.argmin != rec.assigned) {
      rec.status = AtomStatus::Mismatch;
      ++report.n_mismatch;
      report.atoms.push_back(rec);
      continue;
    }
    report.max_equality_residual =
        std::max(report.max_equality_residual, std::abs(psi.value + pot.phi_c[rec.assigned] - c(i, rec.assigned)));
    try {
      const TangentVector g = grad_psi(pot, rec.x, report.fd_step);
      rec.grad_norm = g.norm;
      Point f = rec.x;
      if (g.norm <= options.zero_gradient_tol) {
        ++report.n_zero_gradient;
      } else {
        f = exp_map(space, g.scaled(-displacement_length(cost_spec, g.norm) / g.norm));
      }
      rec.formula_residual = distance(space, f, y);
      rec.norm_residual = std::abs(displacement_length(cost_spec, g.norm) - rec.distance_to_assigned);
      rec.status = AtomStatus::Verified;
      ++report.n_verified;
      report.max_formula_residual = std::max(report.max_formula_residual, rec.formula_residual);
      report.max_norm_residual = std::max(report.max_norm_residual, rec.norm_residual);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NotDifferentiable) throw;
      rec.status = AtomStatus::Tie;
      ++report.n_skipped_tie;
    }
    report.atoms.push_back(rec);
  }
  return report;
}

struct UniquenessReport {
  std::size_t runs = 0;
  std::size_t n_atoms = 0;
  std::size_t n_flagged = 0;             // split, singular or tie atoms in the baseline
  std::size_t disagreements = 0;         // unflagged atoms whose assignment changed in some run
  std::size_t flagged_disagreements = 0; // flagged atoms whose assignment changed (expected)
  std::vector<std::size_t> disagreeing_atoms;

  bool passed() const { return disagreements == 0; }
};

/// Re-solves the instance under every pivot rule, unperturbed and with
/// `trials` seeded cost perturbations of size `perturbation_scale`, and
/// compares each atom's assignment to the baseline (Bland, unperturbed).
inline UniquenessReport verify_uniqueness(const SpaceDescriptor& space, const CostSpec& cost_spec,
                                          const DiscreteMeasure& mu0, const DiscreteMeasure& mu1,
                                          double perturbation_scale, std::size_t trials, std::uint64_t seed) {
  space.validate();
  cost_spec.validate();
  mu0.validate(space);
  mu1.validate(space);
  if (!(perturbation_scale >= 0.0)) fail(ErrorKind::Validation, "perturbation scale must be nonnegative");
  const CostMatrix c = cost_matrix(cost_spec, space, mu0, mu1);
  const auto w0 = mu0.weights();
  const auto w1 = mu1.weights();
  const std::size_t split = std::numeric_limits<std::size_t>::max();

  const auto assignment = [&](const TransportPlan& plan) {
    std::vector<std::size_t> a(plan.rows, split);
    const auto support = plan.row_support();
    for (std::size_t i = 0; i < plan.rows; ++i)
      if (support[i].size() == 1) a[i] = support[i].front();
    return a;
  };

  const Solution base = solve_exact(c, w0, w1);
  const std::vector<std::size_t> base_assign = assignment(base.plan);
  const SemiDiscretePotential pot{space, cost_spec, mu1.points(), interior_dual(c, base.plan).phi_c};
  std::vector<char> flagged(mu0.size(), 0);
  for (std::size_t i = 0; i < mu0.size(); ++i)
    flagged[i] = base_assign[i] == split || !is_regular(space, mu0.atoms[i].point) || eval_psi(pot, mu0.atoms[i].point).tie;

  UniquenessReport report;
  report.n_atoms = mu0.size();
  report.n_flagged = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
  std::vector<char> disagree(mu0.size(), 0);
  for (PivotRule rule : {PivotRule::Bland, PivotRule::Dantzig, PivotRule::LastCell}) {
    for (std::size_t trial = 0; trial <= trials; ++trial) {
      CostMatrix perturbed = c;
      if (trial > 0) {
        Rng rng(derive_seed(seed, trial));
        for (std::size_t i = 0; i < c.rows(); ++i)
          for (std::size_t j = 0; j < c.cols(); ++j) perturbed(i, j) += perturbation_scale * (2.0 * rng.uniform() - 1.0);
      }
      const Solution run = solve_exact(perturbed, w0, w1, SolveOptions{rule});
      ++report.runs;
      const auto a = assignment(run.plan);
      for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != base_assign[i]) disagree[i] = 1;
    }
  }
  for (std::size_t i = 0; i < disagree.size(); ++i) {
    if (!disagree[i]) continue;
    if (flagged[i]) {
      ++report.flagged_disagreements;
    } else {
      ++report.disagreements;
      report.disagreeing_atoms.push_back(i);
    }
  }
  return report;
}

}  // namespace alexot
