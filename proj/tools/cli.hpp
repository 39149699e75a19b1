#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "alexot/commands.hpp"

namespace alexot::cli {

/// Inline JSON when the argument starts with '{', otherwise a file path.
inline Json load_json_arg(const std::string& arg) {
  const auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && arg[first] == '{') return io::parse_text(arg, "<argument>");
  return io::parse_file(arg);
}

inline void write_atomically(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::Validation, path + ": cannot open for writing");
    f << text;
    if (!f.flush()) fail(ErrorKind::Validation, path + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(ErrorKind::Validation, path + ": " + ec.message());
}

inline Instance load_instance(const std::string& arg, std::optional<std::uint64_t> seed) {
  Json j = load_json_arg(arg);
  if (seed && j.is_object()) j["seed"] = *seed;
  return instance_from_json(j);
}

inline std::vector<std::size_t> parse_refine(const std::string& s) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    const auto comma = s.find(',', pos);
    const std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || v == 0) fail(ErrorKind::Validation, "--refine: bad count \"" + tok + "\"");
    out.push_back(static_cast<std::size_t>(v));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

/// Runs one command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal transport on model Alexandrov spaces: solve and verify."};
  app.require_subcommand(1);

  std::string out_path, csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol, fd_step, k;

  // solve
  auto* solve = app.add_subcommand("solve", "Solve an instance exactly and print plan and potentials");
  std::string instance_arg;
  bool oracle = false;
  solve->add_option("instance", instance_arg, "Instance JSON file (or inline JSON)")->required();
  solve->add_flag("--oracle", oracle, "Cross-check against brute-force enumeration (small instances only)");
  solve->add_option("--out", out_path, "Write the report here instead of standard output");

  // verify
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  verify->require_subcommand(1);

  auto* curvature = verify->add_subcommand("curvature", "Sampled triangle comparison against the model surface");
  std::string space_arg, region_arg;
  std::size_t samples = 10000;
  curvature->add_option("space", space_arg, "Space descriptor or instance JSON")->required();
  curvature->add_option("--k", k, "Curvature of the model surface (default: the space's lower bound)");
  curvature->add_option("--samples", samples, "Number of sampled triangles");
  curvature->add_option("--seed", seed, "Master seed");
  curvature->add_option("--tol", tol, "Certification tolerance on the slack");
  curvature->add_option("--region", region_arg, "Sampling region JSON");
  curvature->add_option("--out", out_path, "Report path");

  auto* duality = verify->add_subcommand("duality", "Duality gap, complementary slackness and c-concavity");
  duality->add_option("instance", instance_arg, "Instance JSON")->required();
  duality->add_option("--tol", tol, "Tolerance");
  duality->add_option("--seed", seed, "Override the instance seed");
  duality->add_option("--out", out_path, "Report path");

  auto* map = verify->add_subcommand("map", "Graph concentration and the map formula");
  std::string refine_arg, dual_arg = "interior";
  map->add_option("instance", instance_arg, "Instance JSON")->required();
  map->add_option("--fd-step", fd_step, "Finite-difference step (default 1e-5 x diameter)");
  map->add_option("--tol", tol, "Residual tolerance (default 1e-6 plane, 1e-4 otherwise)");
  map->add_option("--refine", refine_arg, "Comma-separated source sizes, e.g. 250,500,1000");
  map->add_option("--seed", seed, "Override the instance seed");
  map->add_option("--dual", dual_arg, "Potential used for psi: interior or vertex")
      ->check(CLI::IsMember({"interior", "vertex"}));
  map->add_option("--out", out_path, "Report path");
  map->add_option("--csv", csv_path, "Per-atom CSV path");

  auto* uniq = verify->add_subcommand("uniqueness", "Agreement of assignments across pivot rules and perturbations");
  double perturbation = 1e-9;
  std::size_t trials = 3;
  uniq->add_option("instance", instance_arg, "Instance JSON")->required();
  uniq->add_option("--perturbation", perturbation, "Cost perturbation scale");
  uniq->add_option("--trials", trials, "Perturbed runs per pivot rule");
  uniq->add_option("--seed", seed, "Seed for perturbations (also overrides the instance seed)");
  uniq->add_option("--out", out_path, "Report path");

  auto* fv = verify->add_subcommand("first-variation", "Ratio test for the first variation formula");
  std::size_t fv_samples = 100;
  fv->add_option("space", space_arg, "Space descriptor or instance JSON")->required();
  fv->add_option("--samples", fv_samples, "Number of configurations");
  fv->add_option("--seed", seed, "Master seed");
  fv->add_option("--out", out_path, "Report path");

  // generate
  auto* gen = app.add_subcommand("generate", "Build a reproducible instance");
  std::string gen_space, gen_cost = "{\"kind\":\"quadratic\"}", gen_region, gen_target_region;
  std::size_t gen_n = 0, gen_targets = 0;
  std::vector<double> translate;
  gen->add_option("--space", gen_space, "Space descriptor JSON")->required();
  gen->add_option("--cost", gen_cost, "Cost JSON");
  gen->add_option("--region", gen_region, "Source region JSON")->required();
  gen->add_option("--n", gen_n, "Number of source atoms (default nx*ny for grids)");
  gen->add_option("--seed", seed, "Master seed");
  gen->add_option("--targets", gen_targets, "Number of sampled target atoms");
  gen->add_option("--target-region", gen_target_region, "Target region JSON (default: the source region)");
  gen->add_option("--translate", translate, "Plane only: targets are the sources shifted by dx,dy")
      ->delimiter(',')
      ->expected(2);
  gen->add_option("--out", out_path, "Instance path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitInput;
  }

  CommandResult result;
  try {
    if (*solve) {
      result = cmd_solve(load_instance(instance_arg, std::nullopt), oracle);
    } else if (*curvature) {
      CurvatureOptions o;
      o.k = k;
      o.samples = samples;
      o.seed = seed.value_or(0);
      o.tol = tol.value_or(1e-9);
      if (!region_arg.empty()) o.region = region_from_json(load_json_arg(region_arg));
      result = cmd_verify_curvature(space_from_any(load_json_arg(space_arg)), o);
    } else if (*duality) {
      result = cmd_verify_duality(load_instance(instance_arg, seed), tol.value_or(1e-9));
    } else if (*map) {
      MapCommandOptions o;
      o.fd_step = fd_step;
      o.tol = tol;
      if (!refine_arg.empty()) o.refine = parse_refine(refine_arg);
      o.dual = dual_arg == "vertex" ? DualChoice::SolverVertex : DualChoice::Interior;
      result = cmd_verify_map(load_instance(instance_arg, seed), o);
    } else if (*uniq) {
      UniquenessOptions o;
      o.perturbation = perturbation;
      o.trials = trials;
      const Instance inst = load_instance(instance_arg, seed);
      o.seed = seed.value_or(inst.seed.value_or(0));
      result = cmd_verify_uniqueness(inst, o);
    } else if (*fv) {
      FirstVariationOptions o;
      o.samples = fv_samples;
      o.seed = seed.value_or(0);
      result = cmd_verify_first_variation(space_from_any(load_json_arg(space_arg)), o);
    } else if (*gen) {
      GenerateOptions o;
      o.space = space_from_json(load_json_arg(gen_space));
      o.cost = cost_from_json(load_json_arg(gen_cost));
      o.region = region_from_json(load_json_arg(gen_region));
      o.n = gen_n ? gen_n : region_size(o.region);
      o.seed = seed.value_or(0);
      o.targets = gen_targets;
      if (!gen_target_region.empty()) o.target_region = region_from_json(load_json_arg(gen_target_region));
      if (!translate.empty()) o.translate = Vec2{translate[0], translate[1]};
      result = cmd_generate(o);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    const std::string text = result.report.dump(2) + "\n";
    if (out_path.empty()) {
      out << text;
    } else {
      write_atomically(out_path, text);
    }
    if (!csv_path.empty()) write_atomically(csv_path, result.csv);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  if (result.exit_code == kExitCapability && result.report.contains("error"))
    err << "error: " << result.report["error"].get<std::string>() << "\n";
  return result.exit_code;
}

}  // namespace alexot::cli
