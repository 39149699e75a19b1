#pragma once

// Command implementations behind the alexot executable. Each returns a
// report and an exit code; argument parsing and file output live in the tool.
//
// Exit codes: 0 pass, 1 verification failure, 2 input error, 3 capability error.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "alexot/comparison.hpp"
#include "alexot/duality.hpp"
#include "alexot/io.hpp"
#include "alexot/monge.hpp"
#include "alexot/solver.hpp"

namespace alexot {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitInput = 2, kExitCapability = 3 };

inline int exit_code_for(ErrorKind kind) { return kind == ErrorKind::Size ? kExitCapability : kExitInput; }

struct CommandResult {
  int exit_code = kExitPass;
  Json report;
  std::string csv;  // per-atom table, map verification only
};

inline Json instance_config(const Instance& inst) {
  Json j{{"space", to_json(inst.space)}, {"cost", to_json(inst.cost)}};
  j["seed"] = inst.seed ? Json(*inst.seed) : Json(nullptr);
  j["n_source"] = inst.source.size();
  j["n_target"] = inst.target.size();
  if (inst.source_spec.region) j["source_region"] = to_json(*inst.source_spec.region);
  return j;
}

// ---------------------------------------------------------------------------
// solve

inline CommandResult cmd_solve(const Instance& inst, bool oracle) {
  const CostMatrix c = cost_matrix(inst.cost, inst.space, inst.source, inst.target);
  const auto w0 = inst.source.weights();
  const auto w1 = inst.target.weights();
  CommandResult out;
  Json config = instance_config(inst);
  config["command"] = "solve";
  config["oracle"] = oracle;
  std::optional<double> oracle_value;
  if (oracle) {
    try {
      oracle_value = oracle_bruteforce(c, w0, w1);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Size) throw;
      out.exit_code = kExitCapability;
      out.report = {{"config", config}, {"error", e.what()}};
      return out;
    }
  }
  const Solution sol = solve_exact(c, w0, w1);
  const double gap = duality_gap(sol.plan, sol.potentials, inst.source, inst.target);
  Json& r = out.report;
  r["config"] = config;
  r["plan"] = plan_to_json(sol.plan);
  r["cost"] = sol.plan.cost_total;
  if (inst.cost.kind == CostKind::Quadratic) {
    r["cost_convention"] = "d^2/2";
    r["cost_d2"] = 2.0 * sol.plan.cost_total;
  }
  r["phi"] = sol.potentials.phi;
  r["phi_c"] = sol.potentials.phi_c;
  r["gap"] = gap;
  r["iterations"] = sol.iterations;
  r["min_reduced_cost"] = sol.min_reduced_cost;
  if (oracle_value) {
    const double diff = std::abs(*oracle_value - sol.plan.cost_total);
    r["oracle"] = {{"value", *oracle_value}, {"difference", diff}, {"agrees", diff <= 1e-12 * (1.0 + *oracle_value)}};
    if (!r["oracle"]["agrees"].get<bool>()) out.exit_code = kExitFail;
  }
  return out;
}

// ---------------------------------------------------------------------------
// verify curvature

struct CurvatureOptions {
  std::optional<double> k;  // default: the space's curvature lower bound
  std::size_t samples = 10000;
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::optional<Region> region;
};

inline CommandResult cmd_verify_curvature(const SpaceDescriptor& space, const CurvatureOptions& opt) {
  const double k = opt.k.value_or(space.curvature_lower_bound());
  const ComparisonReport rep = check_triangle_comparison(space, k, opt.samples, opt.seed, opt.region);
  CommandResult out;
  const bool pass = rep.evaluations > 0 && rep.certified(opt.tol);
  out.report = {{"config",
                 {{"command", "verify curvature"},
                  {"space", to_json(space)},
                  {"k", k},
                  {"samples", opt.samples},
                  {"seed", opt.seed},
                  {"tol", opt.tol},
                  {"region", to_json(opt.region.value_or(default_region(space)))}}},
                {"report", to_json(space, rep)},
                {"passed", pass}};
  out.exit_code = pass ? kExitPass : kExitFail;
  return out;
}

// ---------------------------------------------------------------------------
// verify duality

inline CommandResult cmd_verify_duality(const Instance& inst, double tol) {
  const CostMatrix c = cost_matrix(inst.cost, inst.space, inst.source, inst.target);
  const auto w0 = inst.source.weights();
  const auto w1 = inst.target.weights();
  const Solution sol = solve_exact(c, w0, w1);
  const double gap = duality_gap(sol.plan, sol.potentials, inst.source, inst.target);
  double slackness = 0.0;
  for (const auto& e : sol.plan.entries)
    slackness = std::max(slackness, std::abs(sol.potentials.phi[e.source] + sol.potentials.phi_c[e.target] - c(e.source, e.target)));
  const double violation = max_dual_violation(c, sol.potentials);
  const CTransform phi_cc = c_transform_to_rows(c, c_transform(c, sol.potentials.phi).values);
  double concavity = 0.0;
  for (std::size_t i = 0; i < phi_cc.values.size(); ++i)
    concavity = std::max(concavity, std::abs(phi_cc.values[i] - sol.potentials.phi[i]));
  const double gap_bound = tol * (1.0 + std::abs(sol.plan.cost_total));
  const bool pass = std::abs(gap) <= gap_bound && slackness <= tol && violation <= tol && concavity <= tol;
  CommandResult out;
  Json config = instance_config(inst);
  config["command"] = "verify duality";
  config["tol"] = tol;
  out.report = {{"config", config},
                {"cost", sol.plan.cost_total},
                {"dual_objective", dual_objective(sol.potentials, inst.source, inst.target)},
                {"gap", gap},
                {"gap_bound", gap_bound},
                {"max_slackness_residual", slackness},
                {"max_dual_violation", violation},
                {"phi_c_concavity_deviation", concavity},
                {"passed", pass}};
  out.exit_code = pass ? kExitPass : kExitFail;
  return out;
}

// ---------------------------------------------------------------------------
// verify map

struct MapCommandOptions {
  std::optional<double> fd_step;
  std::optional<double> tol;  // default 1e-6 on the plane, 1e-4 elsewhere
  std::vector<std::size_t> refine;
  DualChoice dual = DualChoice::Interior;
};

inline double default_map_tol(const SpaceDescriptor& space) { return space.kind == SpaceKind::Plane ? 1e-6 : 1e-4; }

inline CommandResult cmd_verify_map(const Instance& inst, const MapCommandOptions& opt) {
  MapOptions mo;
  mo.fd_step = opt.fd_step.value_or(0.0);
  mo.tol = opt.tol.value_or(default_map_tol(inst.space));
  mo.dual = opt.dual;
  CommandResult out;
  Json config = instance_config(inst);
  config["command"] = "verify map";
  config["tol"] = mo.tol;
  config["fd_step"] = opt.fd_step ? Json(*opt.fd_step) : Json("auto");
  config["dual"] = opt.dual == DualChoice::Interior ? "interior" : "vertex";
  config["refine"] = opt.refine;
  out.report["config"] = config;

  if (opt.refine.empty()) {
    const MapVerificationReport rep = verify_graph_and_formula(inst.space, inst.cost, inst.source, inst.target, mo);
    out.report["report"] = to_json(rep);
    out.report["passed"] = rep.passed();
    out.csv = atoms_csv(inst.space, inst.target, rep);
    out.exit_code = rep.passed() ? kExitPass : kExitFail;
    return out;
  }

  if (!inst.source_spec.region) fail(ErrorKind::Validation, "--refine needs a source given as {\"region\", \"n\"}");
  if (!inst.source_spec.weights.empty()) fail(ErrorKind::Validation, "--refine needs uniform source weights");
  Json ladder = Json::array();
  bool all_pass = true;
  bool non_increasing = true;
  double previous = 2.0;
  for (std::size_t n : opt.refine) {
    const DiscreteMeasure src =
        generated_measure(inst.space, *inst.source_spec.region, n, derive_seed(inst.seed.value_or(0), 0));
    const MapVerificationReport rep = verify_graph_and_formula(inst.space, inst.cost, src, inst.target, mo);
    Json row = to_json(rep);
    row["N"] = n;
    ladder.push_back(row);
    all_pass = all_pass && rep.passed();
    if (rep.split_fraction() > previous) non_increasing = false;
    previous = rep.split_fraction();
    out.csv = atoms_csv(inst.space, inst.target, rep);  // table for the finest level
  }
  out.report["ladder"] = ladder;
  out.report["split_fraction_non_increasing"] = non_increasing;
  out.report["passed"] = all_pass && non_increasing;
  out.exit_code = all_pass && non_increasing ? kExitPass : kExitFail;
  return out;
}

// ---------------------------------------------------------------------------
// verify uniqueness

struct UniquenessOptions {
  double perturbation = 1e-9;
  std::size_t trials = 3;
  std::uint64_t seed = 0;
};

inline CommandResult cmd_verify_uniqueness(const Instance& inst, const UniquenessOptions& opt) {
  const UniquenessReport rep =
      verify_uniqueness(inst.space, inst.cost, inst.source, inst.target, opt.perturbation, opt.trials, opt.seed);
  CommandResult out;
  Json config = instance_config(inst);
  config["command"] = "verify uniqueness";
  config["perturbation"] = opt.perturbation;
  config["trials"] = opt.trials;
  config["perturbation_seed"] = opt.seed;
  out.report = {{"config", config}, {"report", to_json(rep)}, {"passed", rep.passed()}};
  out.exit_code = rep.passed() ? kExitPass : kExitFail;
  return out;
}

// ---------------------------------------------------------------------------
// verify first-variation

struct FirstVariationOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 0;
};

inline CommandResult cmd_verify_first_variation(const SpaceDescriptor& space, const FirstVariationOptions& opt) {
  const FirstVariationSummary sum = check_first_variation_ratio(space, opt.samples, opt.seed);
  CommandResult out;
  Json worst = nullptr;
  double worst_margin = -1.0;
  for (const auto& c : sum.cases) {
    const double margin = c.ratio_fine / c.allowed_fine;
    if (margin > worst_margin) {
      worst_margin = margin;
      worst = {{"a", to_json(space, c.a)},
               {"start", to_json(space, c.geodesic.start)},
               {"direction", c.geodesic.direction.components},
               {"ratio_fine", c.ratio_fine},
               {"allowed_fine", c.allowed_fine}};
    }
  }
  out.report = {{"config",
                 {{"command", "verify first-variation"},
                  {"space", to_json(space)},
                  {"samples", opt.samples},
                  {"seed", opt.seed},
                  {"t_coarse", 1e-2},
                  {"t_fine", 1e-4}}},
                {"configurations", sum.configurations},
                {"failures", sum.failures},
                {"worst_margin", sum.worst_margin},
                {"worst_case", worst},
                {"passed", sum.passed()}};
  out.exit_code = sum.passed() ? kExitPass : kExitFail;
  return out;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateOptions {
  SpaceDescriptor space;
  CostSpec cost;
  Region region;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t targets = 0;               // sampled targets (uniform weights)
  std::optional<Region> target_region;   // default: the source region
  std::optional<Vec2> translate;         // plane only: target = source shifted
};

inline Instance generate_instance(const GenerateOptions& opt) {
  opt.space.validate();
  opt.cost.validate();
  Instance inst;
  inst.space = opt.space;
  inst.cost = opt.cost;
  inst.seed = opt.seed;
  inst.source = generated_measure(opt.space, opt.region, opt.n, derive_seed(opt.seed, 0));
  inst.source.validate(opt.space);
  if (opt.translate) {
    if (opt.space.kind != SpaceKind::Plane) fail(ErrorKind::Validation, "--translate is defined on the plane only");
    if (opt.targets != 0) fail(ErrorKind::Validation, "--translate and --targets are exclusive");
    inst.target = inst.source;
    for (auto& a : inst.target.atoms)
      a.point = Point::planar(a.point[0] + (*opt.translate)[0], a.point[1] + (*opt.translate)[1]);
  } else {
    const Region treg = opt.target_region.value_or(opt.region);
    const std::size_t m = opt.targets ? opt.targets : (std::holds_alternative<GridRegion>(treg) ? region_size(treg) : 0);
    if (m == 0) fail(ErrorKind::Validation, "generate needs --targets or --translate");
    inst.target = generated_measure(opt.space, treg, m, derive_seed(opt.seed, 1));
  }
  inst.target.validate(opt.space);
  return inst;
}

inline CommandResult cmd_generate(const GenerateOptions& opt) {
  CommandResult out;
  out.report = to_json(generate_instance(opt));
  return out;
}

}  // namespace alexot
