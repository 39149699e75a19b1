// Acceptance run: one PASS/FAIL line per criterion, each at its pinned
// tolerance and runtime budget. Exit status is nonzero if any line fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "alexot/comparison.hpp"
#include "alexot/io.hpp"
#include "alexot/monge.hpp"
#include "support/instances.hpp"

using namespace alexot;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = o.pass && elapsed < budget_s;
  std::printf("%s  %d  %-26s %6.2f s / %4.0f s  %s\n", pass ? "PASS" : "FAIL", id, name, elapsed, budget_s,
              o.detail.c_str());
  std::fflush(stdout);
  return pass;
}

const SpaceDescriptor kSpaces[] = {SpaceDescriptor::plane(), SpaceDescriptor::sphere(1.0),
                                   SpaceDescriptor::cone(1.5 * kPi)};
const CostSpec kCosts[] = {CostSpec::quadratic(), CostSpec::power(3.0)};

std::vector<double> generic_weights(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += (x = 0.5 + rng.uniform());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) acc += (w[i] /= total);
  w[n - 1] = 1.0 - acc;
  return w;
}

struct RandomInstance {
  SpaceDescriptor space;
  CostSpec cost;
  DiscreteMeasure mu0, mu1;
};

RandomInstance random_instance(std::uint64_t seed, std::size_t max_n, bool uniform_square) {
  Rng rng(seed);
  RandomInstance r{kSpaces[rng.below(3)], kCosts[rng.below(2)], {}, {}};
  const std::size_t n = 1 + rng.below(max_n);
  const std::size_t m = uniform_square ? n : 1 + rng.below(max_n);
  const auto a = sample_region(r.space, default_region(r.space), n, rng.next());
  const auto b = sample_region(r.space, default_region(r.space), m, rng.next());
  if (uniform_square) {
    r.mu0 = DiscreteMeasure::uniform(a);
    r.mu1 = DiscreteMeasure::uniform(b);
  } else {
    r.mu0 = DiscreteMeasure::weighted(a, generic_weights(n, rng));
    r.mu1 = DiscreteMeasure::weighted(b, generic_weights(m, rng));
  }
  return r;
}

Outcome duality_certificate() {
  double worst_gap = 0.0, worst_slack = 0.0, worst_violation = 0.0;
  bool ok = true;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const RandomInstance inst = random_instance(derive_seed(101, s), 50, false);
    const CostMatrix c = cost_matrix(inst.cost, inst.space, inst.mu0, inst.mu1);
    const Solution sol = solve_exact(c, inst.mu0.weights(), inst.mu1.weights());
    const double gap = std::abs(duality_gap(sol.plan, sol.potentials, inst.mu0, inst.mu1));
    double slack = 0.0;
    for (const auto& e : sol.plan.entries)
      slack = std::max(slack, std::abs(sol.potentials.phi[e.source] + sol.potentials.phi_c[e.target] - c(e.source, e.target)));
    const double violation = max_dual_violation(c, sol.potentials);
    ok = ok && gap <= 1e-9 * (1.0 + sol.plan.cost_total) && slack <= 1e-9 && violation <= 1e-9;
    worst_gap = std::max(worst_gap, gap);
    worst_slack = std::max(worst_slack, slack);
    worst_violation = std::max(worst_violation, violation);
  }
  return {ok, fmt("200 instances; max |gap| %.1e, slackness %.1e, dual violation %.1e", worst_gap, worst_slack,
                  worst_violation)};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const RandomInstance inst = random_instance(derive_seed(102, s), 6, true);
    const CostMatrix c = cost_matrix(inst.cost, inst.space, inst.mu0, inst.mu1);
    const auto w0 = inst.mu0.weights();
    const auto w1 = inst.mu1.weights();
    worst = std::max(worst, std::abs(solve_exact(c, w0, w1).plan.cost_total - oracle_bruteforce(c, w0, w1)));
  }
  return {worst <= 1e-12, fmt("200 instances; max |simplex - oracle| %.1e", worst)};
}

Outcome curvature_certification() {
  const ComparisonReport cone = check_triangle_comparison(SpaceDescriptor::cone(1.5 * kPi), 0.0, 100000, 103);
  const ComparisonReport sphere = check_triangle_comparison(SpaceDescriptor::sphere(1.0), 1.0, 100000, 104);
  const ComparisonReport wide = check_triangle_comparison(SpaceDescriptor::cone(3.0 * kPi), 0.0, 100000, 105);
  const bool ok = cone.min_slack >= -1e-9 && sphere.min_slack >= -1e-9 && wide.witness && wide.min_slack < -1e-3;
  return {ok, fmt("min slack: Cone(3pi/2) %.2e, Sphere(1) %.2e, Cone(3pi) witness %.3f", cone.min_slack,
                  sphere.min_slack, wide.min_slack)};
}

Outcome first_variation() {
  bool ok = true;
  double worst = 0.0;
  std::size_t configs = 0;
  for (const auto& space : {SpaceDescriptor::plane(), SpaceDescriptor::sphere(1.0), SpaceDescriptor::cone(1.5 * kPi),
                            SpaceDescriptor::cone(3.0 * kPi)}) {
    const FirstVariationSummary s = check_first_variation_ratio(space, 100, 106);
    ok = ok && s.passed() && s.configurations == 100;
    configs += s.configurations;
    worst = std::max(worst, s.worst_margin);
  }
  return {ok, fmt("%.0f configurations over 4 spaces; worst ratio / allowed %.3f", static_cast<double>(configs), worst)};
}

struct LadderResult {
  std::vector<MapVerificationReport> reports;
  bool non_increasing = true;
};

const LadderResult& cone_ladder() {
  static const LadderResult result = [] {
    LadderResult r;
    double previous = 2.0;
    for (std::size_t n : {250u, 500u, 1000u}) {
      const Instance inst = instance_from_json(fixtures::cone_ladder_json(n));
      MapOptions opt;
      opt.tol = 1e-4;
      r.reports.push_back(verify_graph_and_formula(inst.space, inst.cost, inst.source, inst.target, opt));
      if (r.reports.back().split_fraction() > previous) r.non_increasing = false;
      previous = r.reports.back().split_fraction();
    }
    return r;
  }();
  return result;
}

Outcome graph_concentration() {
  const LadderResult& l = cone_ladder();
  const double last = l.reports.back().split_fraction();
  return {l.non_increasing && last <= 0.005,
          fmt("split fraction %.4f, %.4f, %.4f at N = 250, 500, 1000", l.reports[0].split_fraction(),
              l.reports[1].split_fraction(), last)};
}

Outcome map_formula() {
  const LadderResult& l = cone_ladder();
  bool ok = true;
  double formula = 0.0, norm = 0.0;
  for (const auto& r : l.reports) {
    ok = ok && r.passed() && r.n_verified > 0;
    formula = std::max(formula, r.max_formula_residual);
    norm = std::max(norm, r.max_norm_residual);
  }
  const Instance t = instance_from_json(fixtures::plane_translation_json());
  const MapVerificationReport tr = verify_graph_and_formula(t.space, t.cost, t.source, t.target, {});
  ok = ok && tr.passed() && tr.n_split == 0 && tr.tol == 1e-6;
  return {ok, fmt("cone ladder residuals %.1e / %.1e (tol 1e-4); translation %.1e (tol 1e-6)", formula, norm,
                  std::max(tr.max_formula_residual, tr.max_norm_residual))};
}

Outcome power_cost() {
  const CostSpec p3 = CostSpec::power(3.0);
  const SpaceDescriptor plane = SpaceDescriptor::plane();
  const auto src = DiscreteMeasure::uniform(sample_region(plane, RectangleRegion{0.0, 1.0, 0.0, 1.0}, 200, 107));
  const auto single = DiscreteMeasure::uniform({Point::planar(1.5, 0.5)});
  const MapVerificationReport one = verify_graph_and_formula(plane, p3, src, single, {});
  const Instance g = fixtures::generic_plane_instance(200, 8, 108, p3);
  const MapVerificationReport gen = verify_graph_and_formula(g.space, g.cost, g.source, g.target, {});
  const bool ok = one.passed() && one.n_verified == 200 && gen.passed() && gen.n_zero_gradient >= 1;
  return {ok, fmt("residual %.1e single target, %.1e generic; %.0f atoms took F(x) = x",
                  std::max(one.max_formula_residual, one.max_norm_residual),
                  std::max(gen.max_formula_residual, gen.max_norm_residual), static_cast<double>(gen.n_zero_gradient))};
}

Outcome uniqueness() {
  std::size_t disagreements = 0, flagged = 0, runs = 0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng rng(derive_seed(109, s));
    const SpaceDescriptor space = kSpaces[s % 3];
    const CostSpec cost = kCosts[(s / 3) % 2];
    const Region reg = space.kind == SpaceKind::Cone ? Region{AnnulusRegion{0.5, 1.5, 0.0, std::nullopt}}
                                                     : default_region(space);
    const std::size_t n = 20 + rng.below(41), m = 2 + rng.below(7);
    const auto mu0 = DiscreteMeasure::uniform(sample_region(space, reg, n, rng.next()));
    const auto pts = sample_region(space, reg, m, rng.next());
    const auto mu1 = DiscreteMeasure::weighted(pts, generic_weights(m, rng));
    const UniquenessReport r = verify_uniqueness(space, cost, mu0, mu1, 1e-9, 3, rng.next());
    disagreements += r.disagreements;
    flagged += r.flagged_disagreements;
    runs += r.runs;
  }
  return {disagreements == 0, fmt("50 instances, %.0f solves; %.0f disagreements, %.0f at flagged atoms",
                                   static_cast<double>(runs), static_cast<double>(disagreements),
                                   static_cast<double>(flagged))};
}

Outcome c_transform_algebra() {
  double idem = 0.0, lipschitz_excess = -1e300;
  bool order = true;
  for (std::uint64_t s = 0; s < 1000; ++s) {
    const RandomInstance inst = random_instance(derive_seed(110, s), 12, false);
    const CostMatrix c = cost_matrix(inst.cost, inst.space, inst.mu0, inst.mu1);
    Rng rng(derive_seed(111, s));
    std::vector<double> phi(c.rows()), bigger(c.rows());
    for (std::size_t i = 0; i < phi.size(); ++i) {
      phi[i] = rng.uniform(-1.0, 1.0);
      bigger[i] = phi[i] + rng.uniform(0.0, 0.5);
    }
    const auto once = c_transform(c, phi).values;
    const auto thrice = c_transform(c, c_transform_to_rows(c, once).values).values;
    for (std::size_t j = 0; j < once.size(); ++j) idem = std::max(idem, std::abs(thrice[j] - once[j]));
    const auto lower = c_transform(c, bigger).values;
    for (std::size_t j = 0; j < once.size(); ++j) order = order && lower[j] <= once[j];
    // the cost is h'(D)-Lipschitz in each argument, D the diameter of all atoms
    std::vector<Point> all = inst.mu0.points();
    const auto b = inst.mu1.points();
    all.insert(all.end(), b.begin(), b.end());
    const double lip = inst.cost.h_prime(diameter(inst.space, all));
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t k = 0; k < b.size(); ++k)
        lipschitz_excess =
            std::max(lipschitz_excess, std::abs(once[j] - once[k]) - lip * distance(inst.space, b[j], b[k]));
  }
  const bool ok = idem <= 1e-12 && order && lipschitz_excess <= 1e-9;
  return {ok, fmt("1000 cases; idempotence %.1e, Lipschitz excess %.1e, order reversal ", idem, lipschitz_excess) +
                  (order ? "holds" : "fails")};
}

}  // namespace

int main() {
  bool all = true;
  all &= criterion(1, "duality certificate", 10, duality_certificate);
  all &= criterion(2, "oracle equivalence", 5, oracle_equivalence);
  all &= criterion(3, "curvature certification", 30, curvature_certification);
  all &= criterion(4, "first variation", 5, first_variation);
  all &= criterion(5, "graph concentration", 60, graph_concentration);
  all &= criterion(6, "map formula", 60, map_formula);
  all &= criterion(7, "power cost map", 30, power_cost);
  all &= criterion(8, "uniqueness", 30, uniqueness);
  all &= criterion(9, "c-transform algebra", 5, c_transform_algebra);
  std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
  return all ? 0 : 1;
}
