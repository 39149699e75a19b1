#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "alexot/solver.hpp"

using namespace alexot;

namespace {

const SpaceDescriptor kPlane = SpaceDescriptor::plane();

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0 / static_cast<double>(n)); }

/// Positive weights summing to 1 (the last absorbs the rounding).
std::vector<double> random_weights(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = 0.2 + rng.uniform());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) acc += (w[i] /= total);
  w[n - 1] = 1.0 - acc;
  return w;
}

CostMatrix random_costs(std::size_t n, std::size_t m, Rng& rng) {
  CostMatrix c(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c(i, j) = rng.uniform();
  return c;
}

void expect_certified(const CostMatrix& c, const std::vector<double>& w0, const std::vector<double>& w1,
                      const Solution& s) {
  const auto rs = s.plan.row_sums();
  const auto cs = s.plan.col_sums();
  for (std::size_t i = 0; i < w0.size(); ++i) EXPECT_NEAR(rs[i], w0[i], 1e-10);
  for (std::size_t j = 0; j < w1.size(); ++j) EXPECT_NEAR(cs[j], w1[j], 1e-10);
  EXPECT_LE(s.plan.entries.size(), w0.size() + w1.size() - 1);
  for (const auto& e : s.plan.entries) {
    EXPECT_GT(e.mass, 0.0);
    EXPECT_NEAR(s.potentials.phi[e.source] + s.potentials.phi_c[e.target], c(e.source, e.target), 1e-9);
  }
  EXPECT_LE(max_dual_violation(c, s.potentials), 1e-9);
  EXPECT_LE(std::abs(duality_gap(s.plan, s.potentials, w0, w1)), 1e-9 * (1.0 + std::abs(s.plan.cost_total)));
  EXPECT_EQ(*std::min_element(s.potentials.phi.begin(), s.potentials.phi.end()), 0.0);
}

}  // namespace

TEST(Solve, IdenticalMeasuresGiveIdentityPlan) {
  std::vector<Point> pts;
  Rng rng(1);
  for (int i = 0; i < 7; ++i) pts.push_back(Point::planar(rng.uniform(), rng.uniform()));
  const auto mu = DiscreteMeasure::weighted(pts, random_weights(7, rng));
  const Solution s = solve_exact(CostSpec::quadratic(), kPlane, mu, mu);
  EXPECT_EQ(s.plan.cost_total, 0.0);
  ASSERT_EQ(s.plan.entries.size(), 7u);
  for (const auto& e : s.plan.entries) EXPECT_EQ(e.source, e.target);
  EXPECT_LE(std::abs(duality_gap(s.plan, s.potentials, mu, mu)), 1e-9);
}

TEST(Solve, LineTwoByTwoIsMonotone) {
  const auto mu0 = DiscreteMeasure::uniform({Point::planar(0, 0), Point::planar(1, 0)});
  const auto mu1 = DiscreteMeasure::uniform({Point::planar(1, 0), Point::planar(2, 0)});
  const CostMatrix c = cost_matrix(CostSpec::quadratic(), kPlane, mu0, mu1);
  const Solution s = solve_exact(c, mu0.weights(), mu1.weights());
  EXPECT_DOUBLE_EQ(s.plan.cost_total, 0.5);
  ASSERT_EQ(s.plan.entries.size(), 2u);
  EXPECT_EQ(s.plan.entries[0].target, 0u);
  EXPECT_EQ(s.plan.entries[1].target, 1u);
  // the anti-monotone plan 0 -> 2, 1 -> 1 costs (2 + 0) / 2
  TransportPlan anti{2, 2, {{0, 1, 0.5}, {1, 0, 0.5}}, 0.5 * c(0, 1) + 0.5 * c(1, 0)};
  EXPECT_DOUBLE_EQ(anti.cost_total, 1.0);
  EXPECT_DOUBLE_EQ(duality_gap(anti, PotentialPair{{0, 0}, {0, 0}}, mu0, mu1), 1.0);
  EXPECT_LE(std::abs(duality_gap(s.plan, s.potentials, mu0, mu1)), 1e-9);
}

TEST(Solve, ThreeByThreeMatchesOracle) {
  Rng rng(2024);
  const CostMatrix c = random_costs(3, 3, rng);
  const auto w = uniform_weights(3);
  EXPECT_NEAR(solve_exact(c, w, w).plan.cost_total, oracle_bruteforce(c, w, w), 1e-12);
}

TEST(Solve, Validation) {
  CostMatrix c(2, 2, 1.0);
  const std::vector<double> good{0.5, 0.5}, bad{0.5, 0.6};
  EXPECT_THROW(solve_exact(c, good, bad), Error);
  EXPECT_THROW(solve_exact(c, std::vector<double>{1.0}, good), Error);
  EXPECT_THROW(solve_exact(c, std::vector<double>{1.0, 0.0}, good), Error);
  c(0, 0) = std::nan("");
  EXPECT_THROW(solve_exact(c, good, good), Error);
}

TEST(Oracle, SmallCases) {
  CostMatrix one(1, 1, 3.25);
  const std::vector<double> w1{1.0};
  EXPECT_EQ(oracle_bruteforce(one, w1, w1), 3.25);
  CostMatrix two(2, 2);
  two(0, 0) = 1.0, two(0, 1) = 0.2, two(1, 0) = 0.4, two(1, 1) = 3.0;
  const auto w2 = uniform_weights(2);
  EXPECT_NEAR(oracle_bruteforce(two, w2, w2), 0.3, 1e-15);
}

TEST(Oracle, FourByFourPermutations) {
  Rng rng(4);
  const CostMatrix c = random_costs(4, 4, rng);
  const auto w = uniform_weights(4);
  std::vector<int> p{0, 1, 2, 3};
  double best = 1e300;
  do {
    best = std::min(best, (c(0, p[0]) + c(1, p[1]) + c(2, p[2]) + c(3, p[3])) / 4.0);
  } while (std::next_permutation(p.begin(), p.end()));
  EXPECT_NEAR(oracle_bruteforce(c, w, w), best, 1e-15);
  EXPECT_NEAR(solve_exact(c, w, w).plan.cost_total, best, 1e-12);
}

TEST(Oracle, BothModesAgreeWithSimplex) {
  // weighted 3x4 goes through the spanning-tree enumeration, uniform 3x3 through permutations
  Rng rng(5);
  for (int t = 0; t < 20; ++t) {
    const CostMatrix c = random_costs(3, 3, rng);
    const auto w = uniform_weights(3);
    const double perm = oracle_bruteforce(c, w, w);
    const auto w0 = random_weights(3, rng);
    const auto w1 = random_weights(4, rng);
    const CostMatrix c34 = random_costs(3, 4, rng);
    EXPECT_NEAR(solve_exact(c34, w0, w1).plan.cost_total, oracle_bruteforce(c34, w0, w1), 1e-12);
    EXPECT_NEAR(solve_exact(c, w, w).plan.cost_total, perm, 1e-12);
  }
}

TEST(Oracle, SizeLimit) {
  Rng rng(6);
  const CostMatrix c = random_costs(4, 4, rng);
  const auto w0 = random_weights(4, rng);
  try {
    oracle_bruteforce(c, w0, w0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Size);
  }
  const CostMatrix big = random_costs(9, 9, rng);
  const auto w9 = uniform_weights(9);
  EXPECT_THROW(oracle_bruteforce(big, w9, w9), Error);
}

TEST(SolverProperties, MatchesOracleOn200Instances) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(derive_seed(17, seed));
    const std::size_t n = 1 + rng.below(6);
    const CostMatrix c = random_costs(n, n, rng);
    const auto w = uniform_weights(n);
    const Solution s = solve_exact(c, w, w);
    EXPECT_NEAR(s.plan.cost_total, oracle_bruteforce(c, w, w), 1e-12) << "seed " << seed;
    expect_certified(c, w, w, s);
  }
}

TEST(SolverProperties, CertifiedOnWeightedInstances) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(derive_seed(18, seed));
    const std::size_t n = 1 + rng.below(30), m = 1 + rng.below(30);
    const CostMatrix c = random_costs(n, m, rng);
    const auto w0 = random_weights(n, rng);
    const auto w1 = random_weights(m, rng);
    expect_certified(c, w0, w1, solve_exact(c, w0, w1));
  }
}

TEST(SolverProperties, PivotRulesAgreeOnValue) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(19, seed));
    const std::size_t n = 2 + rng.below(15), m = 2 + rng.below(15);
    const CostMatrix c = random_costs(n, m, rng);
    const auto w0 = random_weights(n, rng);
    const auto w1 = random_weights(m, rng);
    const double bland = solve_exact(c, w0, w1, {PivotRule::Bland}).plan.cost_total;
    for (PivotRule r : {PivotRule::Dantzig, PivotRule::LastCell}) {
      const Solution s = solve_exact(c, w0, w1, {r});
      EXPECT_NEAR(s.plan.cost_total, bland, 1e-12);
      expect_certified(c, w0, w1, s);
    }
  }
}

TEST(SolverProperties, DegenerateIntegerCosts) {
  // many ties: costs in {0, 1, 2} with uniform weights
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(20, seed));
    const std::size_t n = 1 + rng.below(6);
    CostMatrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) c(i, j) = static_cast<double>(rng.below(3));
    const auto w = uniform_weights(n);
    for (PivotRule r : {PivotRule::Bland, PivotRule::Dantzig, PivotRule::LastCell}) {
      const Solution s = solve_exact(c, w, w, {r});
      EXPECT_NEAR(s.plan.cost_total, oracle_bruteforce(c, w, w), 1e-12);
      expect_certified(c, w, w, s);
    }
  }
}

TEST(SolverProperties, PermutingSourcesPermutesPlan) {
  Rng rng(21);
  const std::size_t n = 8, m = 6;
  const CostMatrix c = random_costs(n, m, rng);
  const auto w0 = random_weights(n, rng);
  const auto w1 = random_weights(m, rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[1], perm[5]);
  CostMatrix cp(n, m);
  std::vector<double> wp(n);
  for (std::size_t i = 0; i < n; ++i) {
    wp[i] = w0[perm[i]];
    for (std::size_t j = 0; j < m; ++j) cp(i, j) = c(perm[i], j);
  }
  const Solution a = solve_exact(c, w0, w1);
  const Solution b = solve_exact(cp, wp, w1);
  EXPECT_NEAR(a.plan.cost_total, b.plan.cost_total, 1e-12);
  // generic costs: the optimal plan is unique, so the permuted plan matches entrywise
  std::vector<std::vector<double>> pa(n, std::vector<double>(m, 0.0)), pb = pa;
  for (const auto& e : a.plan.entries) pa[e.source][e.target] = e.mass;
  for (const auto& e : b.plan.entries) pb[perm[e.source]][e.target] = e.mass;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) EXPECT_NEAR(pa[i][j], pb[i][j], 1e-12);
}

TEST(SolverProperties, ScalingCosts) {
  Rng rng(22);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 2 + rng.below(10), m = 2 + rng.below(10);
    const CostMatrix c = random_costs(n, m, rng);
    const auto w0 = random_weights(n, rng);
    const auto w1 = random_weights(m, rng);
    const double lambda = 0.1 + 10.0 * rng.uniform();
    CostMatrix cs(n, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) cs(i, j) = lambda * c(i, j);
    const Solution a = solve_exact(c, w0, w1);
    const Solution b = solve_exact(cs, w0, w1);
    EXPECT_NEAR(b.plan.cost_total, lambda * a.plan.cost_total, 1e-12 * (1.0 + lambda));
    // the unscaled support is optimal for the scaled instance
    double support_cost = 0.0;
    for (const auto& e : a.plan.entries) support_cost += e.mass * cs(e.source, e.target);
    EXPECT_NEAR(support_cost, b.plan.cost_total, 1e-12 * (1.0 + lambda));
  }
}

TEST(DualityGap, ZeroForIdentityWithZeroPotentials) {
  const auto mu = DiscreteMeasure::uniform({Point::planar(0, 0), Point::planar(1, 0), Point::planar(0, 1)});
  const double third = 1.0 / 3.0;
  TransportPlan id{3, 3, {{0, 0, third}, {1, 1, third}, {2, 2, third}}, 0.0};
  EXPECT_EQ(duality_gap(id, PotentialPair{{0, 0, 0}, {0, 0, 0}}, mu, mu), 0.0);
}

TEST(InteriorDual, TightOnSupportAndFeasible) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(derive_seed(23, seed));
    const std::size_t n = 1 + rng.below(20), m = 1 + rng.below(8);
    const CostMatrix c = random_costs(n, m, rng);
    const auto w0 = random_weights(n, rng);
    const auto w1 = random_weights(m, rng);
    const Solution s = solve_exact(c, w0, w1);
    const PotentialPair d = interior_dual(c, s.plan);
    EXPECT_LE(max_dual_violation(c, d), 1e-9);
    for (const auto& e : s.plan.entries) EXPECT_NEAR(d.phi[e.source] + d.phi_c[e.target], c(e.source, e.target), 1e-9);
    EXPECT_LE(std::abs(duality_gap(s.plan, d, w0, w1)), 1e-9);
  }
}

TEST(InteriorDual, AvoidsSpuriousTies) {
  // Identity transport on three well separated points: every dual with
  // phi_c[k] - phi_c[j] strictly inside its bounds leaves off-support cells slack.
  const auto mu = DiscreteMeasure::uniform({Point::planar(0, 0), Point::planar(3, 0), Point::planar(0, 4)});
  const CostMatrix c = cost_matrix(CostSpec::quadratic(), kPlane, mu, mu);
  const Solution s = solve_exact(c, mu.weights(), mu.weights());
  const PotentialPair d = interior_dual(c, s.plan);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) {
        EXPECT_GT(c(i, j) - d.phi[i] - d.phi_c[j], 1.0);
      }
}
