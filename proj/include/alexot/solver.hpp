#pragma once

// Exact discrete Kantorovich solver: a transportation simplex on the bipartite
// source/target graph. The basis is a spanning tree of n + m - 1 cells; dual
// potentials come out of the tree (u_i + v_j = c_ij on basic cells) and the
// entering cell is chosen by reduced cost. Weights are perturbed symbolically
// (supplies + eps, last demand + n*eps) so every basis is nondegenerate and
// no pivot rule can cycle; the eps part is dropped on output.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "alexot/duality.hpp"
#include "alexot/error.hpp"

namespace alexot {

struct PlanEntry {
  std::size_t source = 0;
  std::size_t target = 0;
  double mass = 0.0;
};

struct TransportPlan {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<PlanEntry> entries;  // mass > 0, sorted by (source, target)
  double cost_total = 0.0;

  std::vector<double> row_sums() const {
    std::vector<double> s(rows, 0.0);
    for (const auto& e : entries) s[e.source] += e.mass;
    return s;
  }

  std::vector<double> col_sums() const {
    std::vector<double> s(cols, 0.0);
    for (const auto& e : entries) s[e.target] += e.mass;
    return s;
  }

  /// Targets receiving mass from each source.
  std::vector<std::vector<std::size_t>> row_support() const {
    std::vector<std::vector<std::size_t>> s(rows);
    for (const auto& e : entries) s[e.source].push_back(e.target);
    return s;
  }
};

enum class PivotRule {
  Bland,     // first improving cell in row-major order
  Dantzig,   // most negative reduced cost, ties to the first cell
  LastCell,  // last improving cell in row-major order
};

struct SolveOptions {
  PivotRule pivot = PivotRule::Bland;
  /// Entering threshold on reduced costs, relative to 1 + max |c|.
  double optimality_tol = 1e-12;
  /// Masses at or below this are reported as zero.
  double mass_tol = 1e-13;
};

struct Solution {
  TransportPlan plan;
  PotentialPair potentials;
  std::vector<std::pair<std::size_t, std::size_t>> basis;
  std::size_t iterations = 0;
  double min_reduced_cost = 0.0;
};

namespace detail {

/// value + eps_coeff * eps for an infinitesimal eps > 0.
struct PerturbedMass {
  double value = 0.0;
  std::int64_t eps = 0;

  PerturbedMass& operator+=(const PerturbedMass& o) {
    value += o.value;
    eps += o.eps;
    return *this;
  }
  PerturbedMass& operator-=(const PerturbedMass& o) {
    value -= o.value;
    eps -= o.eps;
    return *this;
  }
};

/// Lexicographic order; values within `tol` count as equal (rounding noise).
inline bool lex_less(const PerturbedMass& a, const PerturbedMass& b, double tol) {
  if (std::abs(a.value - b.value) > tol) return a.value < b.value;
  return a.eps < b.eps;
}

inline void check_marginal(std::span<const double> w, const char* name) {
  if (w.empty()) fail(ErrorKind::Validation, std::string(name) + " has no atoms");
  double total = 0.0;
  for (double v : w) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::Validation, std::string(name) + " weights must be positive");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) fail(ErrorKind::Validation, std::string(name) + " weights do not sum to 1");
}

/// Cells incident to each node, in compressed rows. Nodes 0..n-1 are
/// sources, n..n+m-1 targets.
struct Incidence {
  std::vector<std::size_t> offset;
  std::vector<std::size_t> cells;

  Incidence(std::size_t n, std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& basis)
      : offset(n + m + 1, 0), cells(2 * basis.size()) {
    for (const auto& [i, j] : basis) {
      ++offset[i + 1];
      ++offset[n + j + 1];
    }
    for (std::size_t v = 0; v < n + m; ++v) offset[v + 1] += offset[v];
    std::vector<std::size_t> fill(offset.begin(), offset.end() - 1);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      cells[fill[basis[b].first]++] = b;
      cells[fill[n + basis[b].second]++] = b;
    }
  }

  std::span<const std::size_t> operator[](std::size_t node) const {
    return {cells.data() + offset[node], offset[node + 1] - offset[node]};
  }
};

/// Flows on a spanning tree of the bipartite graph, found by peeling leaves.
/// Nodes 0..n-1 are sources, n..n+m-1 targets.
template <typename Mass>
std::vector<Mass> tree_flows(std::size_t n, std::size_t m, const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                             std::vector<Mass> residual) {
  const std::size_t nodes = n + m;
  const Incidence incident(n, m, cells);
  std::vector<std::size_t> degree(nodes);
  for (std::size_t v = 0; v < nodes; ++v) degree[v] = incident[v].size();
  std::vector<char> edge_done(cells.size(), 0);
  std::vector<Mass> flow(cells.size());
  std::deque<std::size_t> leaves;
  for (std::size_t v = 0; v < nodes; ++v)
    if (degree[v] == 1) leaves.push_back(v);
  while (!leaves.empty()) {
    const std::size_t v = leaves.front();
    leaves.pop_front();
    if (degree[v] != 1) continue;
    std::size_t edge = cells.size();
    for (std::size_t b : incident[v])
      if (!edge_done[b]) {
        edge = b;
        break;
      }
    const std::size_t other = v < n ? n + cells[edge].second : cells[edge].first;
    flow[edge] = residual[v];
    residual[other] -= residual[v];
    edge_done[edge] = 1;
    degree[v] = 0;
    if (--degree[other] == 1) leaves.push_back(other);
  }
  return flow;
}

/// Solves u_i + v_j = c_ij on the basic cells with u_0 = 0.
inline void tree_potentials(const CostMatrix& c, const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                            std::vector<double>& u, std::vector<double>& v) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  const Incidence incident(n, m, cells);
  u.assign(n, 0.0);
  v.assign(m, 0.0);
  std::vector<char> seen(n + m, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    const std::size_t node = stack.back();
    stack.pop_back();
    for (std::size_t b : incident[node]) {
      const auto [i, j] = cells[b];
      if (node < n) {
        if (!seen[n + j]) {
          v[j] = c(i, j) - u[i];
          seen[n + j] = 1;
          stack.push_back(n + j);
        }
      } else if (!seen[i]) {
        u[i] = c(i, j) - v[j];
        seen[i] = 1;
        stack.push_back(i);
      }
    }
  }
}

/// Basic cells on the tree path from target node j to source node i, in order
/// starting next to j.
inline std::vector<std::size_t> tree_path(std::size_t n, std::size_t m,
                                          const std::vector<std::pair<std::size_t, std::size_t>>& cells,
                                          std::size_t from_target, std::size_t to_source) {
  const Incidence incident(n, m, cells);
  const std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> via(n + m, none);
  std::vector<char> seen(n + m, 0);
  std::deque<std::size_t> queue{n + from_target};
  seen[n + from_target] = 1;
  while (!queue.empty() && !seen[to_source]) {
    const std::size_t node = queue.front();
    queue.pop_front();
    for (std::size_t b : incident[node]) {
      const std::size_t other = node < n ? n + cells[b].second : cells[b].first;
      if (!seen[other]) {
        seen[other] = 1;
        via[other] = b;
        queue.push_back(other);
      }
    }
  }
  std::vector<std::size_t> path;
  for (std::size_t node = to_source; node != n + from_target;) {
    const std::size_t b = via[node];
    path.push_back(b);
    node = node < n ? n + cells[b].second : cells[b].first;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace detail

inline Solution solve_exact(const CostMatrix& c, std::span<const double> w0, std::span<const double> w1,
                            const SolveOptions& options = {}) {
  using detail::PerturbedMass;
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  if (w0.size() != n || w1.size() != m) fail(ErrorKind::Validation, "weights do not match the cost matrix");
  detail::check_marginal(w0, "source");
  detail::check_marginal(w1, "target");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (!std::isfinite(c(i, j))) fail(ErrorKind::Validation, "cost matrix has a non-finite entry");

  std::vector<PerturbedMass> residual(n + m);
  for (std::size_t i = 0; i < n; ++i) residual[i] = {w0[i], 1};
  for (std::size_t j = 0; j < m; ++j) residual[n + j] = {w1[j], 0};
  residual[n + m - 1].eps = static_cast<std::int64_t>(n);

  // north-west corner staircase: n + m - 1 cells, a spanning tree
  std::vector<std::pair<std::size_t, std::size_t>> basis;
  {
    std::vector<PerturbedMass> s(residual.begin(), residual.begin() + n);
    std::vector<PerturbedMass> d(residual.begin() + n, residual.end());
    std::size_t i = 0, j = 0;
    while (true) {
      basis.emplace_back(i, j);
      if (i == n - 1 && j == m - 1) break;
      const bool row_done = !detail::lex_less(d[j], s[i], 0.0);
      if ((row_done && i < n - 1) || j == m - 1) {
        d[j] -= s[i];
        ++i;
      } else {
        s[i] -= d[j];
        ++j;
      }
    }
  }

  const double scale = 1.0 + c.max_abs();
  const double enter_tol = options.optimality_tol * scale;
  const double mass_noise = 1e-13;
  const std::size_t max_iterations = 100 * (n * m + n + m) + 1000;

  std::vector<double> u, v;
  std::vector<PerturbedMass> flow = detail::tree_flows(n, m, basis, residual);
  std::vector<char> is_basic(n * m, 0);
  for (const auto& [i, j] : basis) is_basic[i * m + j] = 1;

  std::size_t iterations = 0;
  for (;; ++iterations) {
    if (iterations > max_iterations) fail(ErrorKind::Domain, "simplex iteration limit exceeded");
    detail::tree_potentials(c, basis, u, v);

    std::size_t enter = n * m;
    double best = -enter_tol;
    for (std::size_t i = 0; i < n && !(options.pivot == PivotRule::Bland && enter < n * m); ++i) {
      const std::span<const double> row = c.row(i);
      const char* basic = &is_basic[i * m];
      for (std::size_t j = 0; j < m; ++j) {
        const double r = row[j] - u[i] - v[j];
        if (r >= -enter_tol || basic[j]) continue;
        if (options.pivot == PivotRule::Bland) {
          enter = i * m + j;
          break;
        }
        if (options.pivot == PivotRule::LastCell) {
          enter = i * m + j;
        } else if (r < best) {
          best = r;
          enter = i * m + j;
        }
      }
    }
    if (enter == n * m) break;

    const std::size_t ei = enter / m;
    const std::size_t ej = enter % m;
    const std::vector<std::size_t> path = detail::tree_path(n, m, basis, ej, ei);
    // cells at even positions of the path lose mass when (ei, ej) gains it
    std::size_t leave = basis.size();
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const std::size_t b = path[k];
      if (leave == basis.size() || detail::lex_less(flow[b], flow[leave], mass_noise)) {
        leave = b;
      } else if (!detail::lex_less(flow[leave], flow[b], mass_noise)) {
        const auto key = [&](std::size_t x) { return basis[x].first * m + basis[x].second; };
        if (key(b) < key(leave)) leave = b;
      }
    }
    is_basic[basis[leave].first * m + basis[leave].second] = 0;
    basis[leave] = {ei, ej};
    is_basic[enter] = 1;
    flow = detail::tree_flows(n, m, basis, residual);
  }

  // drop the perturbation: exact tree flows for the true weights
  std::vector<double> plain(n + m);
  for (std::size_t i = 0; i < n; ++i) plain[i] = w0[i];
  for (std::size_t j = 0; j < m; ++j) plain[n + j] = w1[j];
  const std::vector<double> mass = detail::tree_flows(n, m, basis, plain);

  Solution sol;
  sol.iterations = iterations;
  sol.basis = basis;
  sol.plan.rows = n;
  sol.plan.cols = m;
  for (std::size_t b = 0; b < basis.size(); ++b)
    if (mass[b] > options.mass_tol) sol.plan.entries.push_back({basis[b].first, basis[b].second, mass[b]});
  std::sort(sol.plan.entries.begin(), sol.plan.entries.end(),
            [](const PlanEntry& a, const PlanEntry& b) { return std::tie(a.source, a.target) < std::tie(b.source, b.target); });
  for (const auto& e : sol.plan.entries) sol.plan.cost_total += e.mass * c(e.source, e.target);

  sol.potentials.phi = u;
  sol.potentials.phi_c = v;
  sol.potentials.normalize();
  double min_r = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      min_r = std::min(min_r, c(i, j) - sol.potentials.phi[i] - sol.potentials.phi_c[j]);
  sol.min_reduced_cost = min_r;
  if (min_r < -1e-9 * scale) fail(ErrorKind::Domain, "post-hoc optimality check failed");
  return sol;
}

inline Solution solve_exact(const CostSpec& spec, const SpaceDescriptor& space, const DiscreteMeasure& mu0,
                            const DiscreteMeasure& mu1, const SolveOptions& options = {}) {
  const auto w0 = mu0.weights();
  const auto w1 = mu1.weights();
  return solve_exact(cost_matrix(spec, space, mu0, mu1), w0, w1, options);
}

/// Exact optimum by enumeration, independent of the simplex: permutations when
/// n = m <= 8 with uniform weights, otherwise every spanning-tree basis of the
/// transportation polytope when n * m <= 12.
inline double oracle_bruteforce(const CostMatrix& c, std::span<const double> w0, std::span<const double> w1) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  if (w0.size() != n || w1.size() != m) fail(ErrorKind::Validation, "weights do not match the cost matrix");
  detail::check_marginal(w0, "source");
  detail::check_marginal(w1, "target");

  const auto uniform = [](std::span<const double> w) {
    return std::all_of(w.begin(), w.end(), [&](double x) { return std::abs(x - 1.0 / w.size()) <= 1e-15; });
  };
  if (n == m && n <= 8 && uniform(w0) && uniform(w1)) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) total += c(i, perm[i]);
      best = std::min(best, total / static_cast<double>(n));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
  }
  if (n * m > 12) fail(ErrorKind::Size, "instance too large for the brute-force oracle");

  const std::size_t cells = n * m;
  const std::size_t k = n + m - 1;
  std::vector<double> plain(n + m);
  for (std::size_t i = 0; i < n; ++i) plain[i] = w0[i];
  for (std::size_t j = 0; j < m; ++j) plain[n + j] = w1[j];
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
    std::vector<std::pair<std::size_t, std::size_t>> chosen;
    for (std::size_t cell = 0; cell < cells; ++cell)
      if (mask & (1u << cell)) chosen.emplace_back(cell / m, cell % m);
    // k edges on n + m nodes form a spanning tree iff they are acyclic
    std::vector<std::size_t> parent(n + m);
    std::iota(parent.begin(), parent.end(), 0);
    const auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    bool tree = true;
    for (const auto& [i, j] : chosen) {
      const std::size_t a = find(i);
      const std::size_t b = find(n + j);
      if (a == b) {
        tree = false;
        break;
      }
      parent[a] = b;
    }
    if (!tree) continue;
    const std::vector<double> flow = detail::tree_flows(n, m, chosen, plain);
    if (std::any_of(flow.begin(), flow.end(), [](double f) { return f < -1e-12; })) continue;
    double total = 0.0;
    for (std::size_t b = 0; b < chosen.size(); ++b) total += std::max(flow[b], 0.0) * c(chosen[b].first, chosen[b].second);
    best = std::min(best, total);
  }
  return best;
}

/// Primal cost minus dual objective; nonnegative for feasible inputs.
inline double duality_gap(const TransportPlan& plan, const PotentialPair& pair, const DiscreteMeasure& mu0,
                          const DiscreteMeasure& mu1) {
  return plan.cost_total - dual_objective(pair, mu0, mu1);
}

inline double duality_gap(const TransportPlan& plan, const PotentialPair& pair, std::span<const double> w0,
                          std::span<const double> w1) {
  double j = 0.0;
  for (std::size_t i = 0; i < w0.size(); ++i) j += pair.phi[i] * w0[i];
  for (std::size_t k = 0; k < w1.size(); ++k) j += pair.phi_c[k] * w1[k];
  return plan.cost_total - j;
}

/// Optimal dual pair in the relative interior of the dual face of `plan`:
/// tight on the support, and strictly slack on every other cell unless some
/// other optimal plan uses it. Target potentials satisfy difference
/// constraints phi_c[k] - phi_c[j] <= c(i,k) - c(i,j) for j in supp(i);
/// with D the shortest-path closure, phi_c[k] = mean_r D[r][k] is strictly
/// inside every constraint that is not forced by a zero-length cycle.
inline PotentialPair interior_dual(const CostMatrix& c, const TransportPlan& plan) {
  const std::size_t n = c.rows();
  const std::size_t m = c.cols();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(m * m, inf);
  for (std::size_t k = 0; k < m; ++k) dist[k * m + k] = 0.0;
  const auto support = plan.row_support();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j : support[i])
      for (std::size_t k = 0; k < m; ++k) dist[j * m + k] = std::min(dist[j * m + k], c(i, k) - c(i, j));
  for (std::size_t via = 0; via < m; ++via)
    for (std::size_t a = 0; a < m; ++a) {
      const double da = dist[a * m + via];
      if (da == inf) continue;
      for (std::size_t b = 0; b < m; ++b) dist[a * m + b] = std::min(dist[a * m + b], da + dist[via * m + b]);
    }
  const double scale = 1.0 + c.max_abs();
  for (std::size_t k = 0; k < m; ++k) {
    if (dist[k * m + k] < -1e-9 * scale) fail(ErrorKind::Domain, "plan is not optimal (negative cycle)");
    dist[k * m + k] = 0.0;
  }
  PotentialPair pair;
  pair.phi_c.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    double total = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      if (dist[r * m + k] == inf) fail(ErrorKind::Domain, "target unreachable in the dual constraint graph");
      total += dist[r * m + k];
    }
    pair.phi_c[k] = total / static_cast<double>(m);
  }
  pair.phi = c_transform_to_rows(c, pair.phi_c).values;
  pair.normalize();
  return pair;
}

}  // namespace alexot
