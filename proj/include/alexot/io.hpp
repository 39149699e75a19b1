#pragma once

// JSON encodings of spaces, costs, regions, measures, instances and reports.
// Requires nlohmann/json (json.hpp) on the include path.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <json.hpp>

#include "alexot/comparison.hpp"
#include "alexot/costs.hpp"
#include "alexot/duality.hpp"
#include "alexot/error.hpp"
#include "alexot/monge.hpp"
#include "alexot/solver.hpp"
#include "alexot/spaces.hpp"

namespace alexot {

using Json = nlohmann::ordered_json;

namespace io {

inline const Json& require(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Validation, where + ": missing \"" + key + "\"");
  return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorKind::Validation, where + ": expected a number");
  return j.get<double>();
}

inline double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return number(j.at(key), where + "." + key);
}

/// Parses text, turning syntax errors into validation errors anchored at
/// line:column of `name`.
inline Json parse_text(const std::string& text, const std::string& name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto cut = msg.find("syntax error");
    if (cut != std::string::npos) msg = msg.substr(cut);
    fail(ErrorKind::Validation, name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Validation, path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Json parse_file(const std::string& path) { return parse_text(read_file(path), path); }

}  // namespace io

// ---------------------------------------------------------------------------
// Spaces, points, costs

inline Json to_json(const SpaceDescriptor& s) {
  switch (s.kind) {
    case SpaceKind::Plane: return {{"kind", "plane"}};
    case SpaceKind::Sphere: return {{"kind", "sphere"}, {"curvature", s.curvature}};
    case SpaceKind::Cone: return {{"kind", "cone"}, {"total_angle", s.total_angle}};
  }
  return {};
}

inline SpaceDescriptor space_from_json(const Json& j) {
  const Json& kind = io::require(j, "kind", "space");
  if (!kind.is_string()) fail(ErrorKind::Validation, "space.kind: expected a string");
  const auto k = kind.get<std::string>();
  SpaceDescriptor s;
  if (k == "plane") {
    s = SpaceDescriptor::plane();
  } else if (k == "sphere") {
    s = SpaceDescriptor::sphere(io::number(io::require(j, "curvature", "space"), "space.curvature"));
  } else if (k == "cone") {
    s = SpaceDescriptor::cone(io::number(io::require(j, "total_angle", "space"), "space.total_angle"));
  } else {
    fail(ErrorKind::Validation, "space.kind: unknown kind \"" + k + "\"");
  }
  s.validate();
  return s;
}

inline Json to_json(const SpaceDescriptor& s, const Point& p) {
  Json a = Json::array();
  for (int i = 0; i < s.point_dimension(); ++i) a.push_back(p.coords[static_cast<std::size_t>(i)]);
  return a;
}

inline Point point_from_json(const SpaceDescriptor& s, const Json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorKind::Validation, where + ": expected an array of coordinates");
  std::vector<double> coords;
  for (std::size_t i = 0; i < j.size(); ++i) coords.push_back(io::number(j[i], where + "[" + std::to_string(i) + "]"));
  try {
    return make_point(s, coords);
  } catch (const Error& e) {
    fail(e.kind(), where + ": " + e.what());
  }
}

inline Json to_json(const CostSpec& c) {
  if (c.kind == CostKind::Quadratic) return {{"kind", "quadratic"}};
  return {{"kind", "power"}, {"p", c.p}};
}

inline CostSpec cost_from_json(const Json& j) {
  const Json& kind = io::require(j, "kind", "cost");
  if (!kind.is_string()) fail(ErrorKind::Validation, "cost.kind: expected a string");
  const auto k = kind.get<std::string>();
  CostSpec c;
  if (k == "quadratic") {
    c = CostSpec::quadratic();
  } else if (k == "power") {
    c = CostSpec::power(io::number(io::require(j, "p", "cost"), "cost.p"));
  } else {
    fail(ErrorKind::Validation, "cost.kind: unknown kind \"" + k + "\"");
  }
  c.validate();
  return c;
}

// ---------------------------------------------------------------------------
// Regions

inline Json to_json(const Region& region) {
  return std::visit(
      [](const auto& r) -> Json {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, RectangleRegion>) {
          return {{"type", "rectangle"}, {"x0", r.x0}, {"x1", r.x1}, {"y0", r.y0}, {"y1", r.y1}};
        } else if constexpr (std::is_same_v<R, GridRegion>) {
          return {{"type", "grid"}, {"nx", r.nx}, {"ny", r.ny}, {"x0", r.x0},
                  {"x1", r.x1},     {"y0", r.y0}, {"y1", r.y1}};
        } else if constexpr (std::is_same_v<R, AnnulusRegion>) {
          Json j{{"type", "annulus"}, {"r0", r.r0}, {"r1", r.r1}, {"phi0", r.phi0}};
          if (r.phi1) j["phi1"] = *r.phi1;
          return j;
        } else {
          return {{"type", "cap"}, {"theta0", r.theta0}, {"theta1", r.theta1}};
        }
      },
      region);
}

inline Region region_from_json(const Json& j) {
  const Json& type = io::require(j, "type", "region");
  if (!type.is_string()) fail(ErrorKind::Validation, "region.type: expected a string");
  const auto t = type.get<std::string>();
  const std::string w = "region";
  if (t == "rectangle") {
    RectangleRegion r;
    r.x0 = io::number_or(j, "x0", r.x0, w);
    r.x1 = io::number_or(j, "x1", r.x1, w);
    r.y0 = io::number_or(j, "y0", r.y0, w);
    r.y1 = io::number_or(j, "y1", r.y1, w);
    return r;
  }
  if (t == "grid") {
    GridRegion r;
    const auto count = [&](const char* key) {
      const Json& v = io::require(j, key, w);
      if (!v.is_number_integer() || v.get<long long>() <= 0)
        fail(ErrorKind::Validation, w + "." + key + ": expected a positive integer");
      return static_cast<int>(v.get<long long>());
    };
    r.nx = count("nx");
    r.ny = count("ny");
    r.x0 = io::number_or(j, "x0", r.x0, w);
    r.x1 = io::number_or(j, "x1", r.x1, w);
    r.y0 = io::number_or(j, "y0", r.y0, w);
    r.y1 = io::number_or(j, "y1", r.y1, w);
    return r;
  }
  if (t == "annulus") {
    AnnulusRegion r;
    r.r0 = io::number_or(j, "r0", r.r0, w);
    r.r1 = io::number_or(j, "r1", r.r1, w);
    r.phi0 = io::number_or(j, "phi0", r.phi0, w);
    if (j.contains("phi1")) r.phi1 = io::number(j.at("phi1"), w + ".phi1");
    return r;
  }
  if (t == "cap") {
    CapRegion r;
    r.theta0 = io::number_or(j, "theta0", r.theta0, w);
    r.theta1 = io::number_or(j, "theta1", r.theta1, w);
    return r;
  }
  fail(ErrorKind::Validation, "region.type: unknown type \"" + t + "\"");
}

inline std::size_t region_size(const Region& region) {
  if (const auto* g = std::get_if<GridRegion>(&region)) return static_cast<std::size_t>(g->nx) * g->ny;
  return 0;
}

// ---------------------------------------------------------------------------
// Measures and instances

inline Json to_json(const SpaceDescriptor& s, const DiscreteMeasure& m) {
  Json atoms = Json::array();
  for (const auto& a : m.atoms) atoms.push_back({{"point", to_json(s, a.point)}, {"weight", a.weight}});
  return {{"atoms", atoms}};
}

inline DiscreteMeasure measure_from_json(const SpaceDescriptor& s, const Json& j, const std::string& where) {
  const Json& atoms = io::require(j, "atoms", where);
  if (!atoms.is_array()) fail(ErrorKind::Validation, where + ".atoms: expected an array");
  DiscreteMeasure m;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const std::string w = where + ".atoms[" + std::to_string(i) + "]";
    m.atoms.push_back({point_from_json(s, io::require(atoms[i], "point", w), w + ".point"),
                       io::number(io::require(atoms[i], "weight", w), w + ".weight")});
  }
  try {
    m.validate(s);
  } catch (const Error& e) {
    fail(e.kind(), where + ": " + e.what());
  }
  return m;
}

/// A measure given either explicitly or as a sampled region.
struct MeasureSource {
  DiscreteMeasure measure;
  std::optional<Region> region;  // set when generated
  std::size_t n = 0;
  std::vector<double> weights;   // optional explicit weights for a generated measure
};

struct Instance {
  SpaceDescriptor space;
  CostSpec cost;
  DiscreteMeasure source;
  DiscreteMeasure target;
  std::optional<std::uint64_t> seed;
  MeasureSource source_spec;  // how the source was specified (for refinement ladders)

  friend bool operator==(const Instance& a, const Instance& b) {
    const auto same = [](const DiscreteMeasure& x, const DiscreteMeasure& y) {
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x.atoms[i].point == y.atoms[i].point) || x.atoms[i].weight != y.atoms[i].weight) return false;
      return true;
    };
    return a.space == b.space && a.cost == b.cost && a.seed == b.seed && same(a.source, b.source) &&
           same(a.target, b.target);
  }
};

/// Uniform-weight measure of n samples, or explicit weights when given.
inline DiscreteMeasure generated_measure(const SpaceDescriptor& s, const Region& region, std::size_t n,
                                         std::uint64_t seed, const std::vector<double>& weights = {}) {
  if (n == 0) fail(ErrorKind::Validation, "a measure needs n >= 1 atoms");
  const auto pts = sample_region(s, region, n, seed);
  if (weights.empty()) return DiscreteMeasure::uniform(pts);
  return DiscreteMeasure::weighted(pts, weights);
}

/// Seed offsets: the source draws from derive_seed(seed, 0), the target from
/// derive_seed(seed, 1).
inline MeasureSource measure_source_from_json(const SpaceDescriptor& s, const Json& j, const std::string& where,
                                              std::optional<std::uint64_t> seed, std::uint64_t stream) {
  MeasureSource out;
  if (j.is_object() && j.contains("atoms")) {
    out.measure = measure_from_json(s, j, where);
    out.n = out.measure.size();
    return out;
  }
  if (!j.is_object() || !j.contains("region"))
    fail(ErrorKind::Validation, where + ": expected {\"atoms\": [...]} or {\"region\": {...}, \"n\": N}");
  out.region = region_from_json(j.at("region"));
  const Json& n = io::require(j, "n", where);
  if (!n.is_number_integer() || n.get<long long>() < 0)
    fail(ErrorKind::Validation, where + ".n: expected a nonnegative integer");
  out.n = static_cast<std::size_t>(n.get<long long>());
  if (j.contains("weights")) {
    for (const auto& w : j.at("weights")) out.weights.push_back(io::number(w, where + ".weights"));
  }
  if (!seed && !std::holds_alternative<GridRegion>(*out.region))
    fail(ErrorKind::Validation, where + ": a sampled measure needs a \"seed\" in the instance");
  try {
    out.measure = generated_measure(s, *out.region, out.n, derive_seed(seed.value_or(0), stream), out.weights);
    out.measure.validate(s);
  } catch (const Error& e) {
    fail(e.kind(), where + ": " + e.what());
  }
  return out;
}

inline Instance instance_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::Validation, "instance: expected a JSON object");
  Instance inst;
  inst.space = space_from_json(io::require(j, "space", "instance"));
  inst.cost = j.contains("cost") ? cost_from_json(j.at("cost")) : CostSpec::quadratic();
  if (j.contains("seed")) {
    const Json& s = j.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      fail(ErrorKind::Validation, "instance.seed: expected a nonnegative integer");
    inst.seed = s.get<std::uint64_t>();
  }
  inst.source_spec = measure_source_from_json(inst.space, io::require(j, "source", "instance"), "source", inst.seed, 0);
  inst.source = inst.source_spec.measure;
  inst.target = measure_source_from_json(inst.space, io::require(j, "target", "instance"), "target", inst.seed, 1).measure;
  return inst;
}

/// Explicit form: every atom listed, so the output parses back to the same instance.
inline Json to_json(const Instance& inst) {
  Json j;
  j["space"] = to_json(inst.space);
  j["cost"] = to_json(inst.cost);
  if (inst.seed) j["seed"] = *inst.seed;
  j["source"] = to_json(inst.space, inst.source);
  j["target"] = to_json(inst.space, inst.target);
  return j;
}

/// A space given directly, or the "space" member of an instance.
inline SpaceDescriptor space_from_any(const Json& j) {
  if (j.is_object() && j.contains("kind")) return space_from_json(j);
  if (j.is_object() && j.contains("space")) return space_from_json(j.at("space"));
  fail(ErrorKind::Validation, "expected a space descriptor or an instance with a \"space\" member");
}

// ---------------------------------------------------------------------------
// Results and reports

inline Json to_json(const PotentialPair& p) { return {{"phi", p.phi}, {"phi_c", p.phi_c}}; }

inline Json plan_to_json(const TransportPlan& plan) {
  Json a = Json::array();
  for (const auto& e : plan.entries) a.push_back(Json::array({e.source, e.target, e.mass}));
  return a;
}

inline Json to_json(const SpaceDescriptor& s, const ComparisonReport& r) {
  Json j{{"samples", r.samples},
         {"evaluations", r.evaluations},
         {"skipped", r.skipped},
         {"min_slack", r.evaluations ? Json(r.min_slack) : Json(nullptr)},
         {"mean_slack", r.mean_slack}};
  if (r.witness) {
    j["witness"] = {{"p", to_json(s, r.witness->p)},
                    {"start", to_json(s, r.witness->start)},
                    {"end", to_json(s, r.witness->end)},
                    {"t", r.witness->t}};
  } else {
    j["witness"] = nullptr;
  }
  return j;
}

inline Json to_json(const MapVerificationReport& r) {
  return {{"n_atoms", r.n_atoms},
          {"n_split", r.n_split},
          {"n_verified", r.n_verified},
          {"skipped", r.skipped()},
          {"n_skipped_singular", r.n_skipped_singular},
          {"n_skipped_tie", r.n_skipped_tie},
          {"n_mismatch", r.n_mismatch},
          {"n_zero_gradient", r.n_zero_gradient},
          {"split_fraction", r.split_fraction()},
          {"max_formula_residual", r.max_formula_residual},
          {"max_norm_residual", r.max_norm_residual},
          {"max_equality_residual", r.max_equality_residual},
          {"fd_step", r.fd_step},
          {"tol", r.tol},
          {"cost", r.cost_total},
          {"gap", r.gap},
          {"accounting_exact", r.accounting_exact()},
          {"passed", r.passed()}};
}

inline Json to_json(const UniquenessReport& r) {
  return {{"runs", r.runs},
          {"n_atoms", r.n_atoms},
          {"n_flagged", r.n_flagged},
          {"disagreements", r.disagreements},
          {"flagged_disagreements", r.flagged_disagreements},
          {"disagreeing_atoms", r.disagreeing_atoms},
          {"passed", r.passed()}};
}

/// Per-atom table: index, x, assigned y, |grad psi|, d(x, y), residuals, status.
inline std::string atoms_csv(const SpaceDescriptor& s, const DiscreteMeasure& target,
                             const MapVerificationReport& r) {
  const int dim = s.point_dimension();
  std::string out = "index";
  for (int i = 0; i < dim; ++i) out += ",x" + std::to_string(i);
  for (int i = 0; i < dim; ++i) out += ",y" + std::to_string(i);
  out += ",assigned,grad_norm,distance,formula_residual,norm_residual,status\n";
  char buf[64];
  const auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& a : r.atoms) {
    out += std::to_string(a.index);
    for (int i = 0; i < dim; ++i) out += "," + num(a.x.coords[static_cast<std::size_t>(i)]);
    const Point& y = target.atoms[a.assigned].point;
    for (int i = 0; i < dim; ++i) out += "," + num(y.coords[static_cast<std::size_t>(i)]);
    out += "," + std::to_string(a.assigned) + "," + num(a.grad_norm) + "," + num(a.distance_to_assigned) + "," +
           num(a.formula_residual) + "," + num(a.norm_residual) + "," + to_string(a.status) + "\n";
  }
  return out;
}

}  // namespace alexot
