#pragma once

// Line-oriented scenario files:
//
//   # comment
//   [section]
//   key = value          # trailing comment
//
// Sections: geometry, material, shell, constraints, load, stepping, output.
// Keys may appear once, except fix, fix_point, tie, clamp and symmetry.

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "constitution.hpp"
#include "mesh.hpp"

namespace klshell {

struct GeometrySpec {
  std::string kind = "strip";  // strip, plate, hemitube
  double thickness = 0.0, width = 0.0, length = 0.0, radius = 0.0;
  int nel_u = 1, nel_v = 1;
  bool quarter = false;  // plate only: model [0, L/2]^2 with the center at the origin corner
  GradingRegion grading;
  double grading_ratio = 1.0;
};

struct MaterialInput {
  Model model = Model::NH;
  std::optional<double> c1, c2, c3, k1, k2;
  std::vector<double> fiber_angles;
  double kappa = 0.0;
  bool switch_enabled = false;
};

struct TargetComps {
  std::string target;  // edge, corner or "all"
  std::string comps;
};

struct ConstraintSpec {
  std::vector<TargetComps> fix;
  std::vector<TargetComps> tie;
  std::vector<Edge> symmetry;
  std::vector<Edge> clamp;
  double clamp_penalty = 1e3;  // times E T^3
  bool clamp_free_tilt = false;  // clamp only the rotation about the edge tangent
};

enum class LoadKind { CornerForce, Pressure, Rotation, Indenter, EdgeTraction };

struct LoadSpec {
  LoadKind kind = LoadKind::CornerForce;
  std::string corner = "umax_vmax";
  Vec3 vec = Vec3::Zero();  // force or traction
  double pressure = 0.0;
  Edge edge = Edge::vmax;
  Vec3 axis = Vec3::UnitX();
  double angle_deg = 0.0;
  double penalty = 0.0;  // rotation: times E T^3; indenter: times E T
  bool free_tilt = false;  // rotation: constrain only the rotation about the axis
  double radius = 0.0, depth = 0.0;
  Vec3 center = Vec3::Zero();  // indenter contact point at depth 0
};

struct SteppingSpec {
  int steps = 20;
  int max_iter = 25;
  double tol_abs = 1e-8;  // times E T L
  double tol_rel = 1e-10;
  double tol_force = 0.0;  // relative to the internal force; 0 disables
  int max_bisections = 8;
};

struct OutputSpec {
  std::string point = "umax_vmax";  // corner name, or "u v" parameters
  int component = 1;
  std::string csv;
};

struct Scenario {
  std::string name = "scenario";
  GeometrySpec geometry;
  MaterialInput material;
  ShellModel model;
  ConstraintSpec constraints;
  LoadSpec load;
  SteppingSpec stepping;
  OutputSpec output;

  MaterialSpec material_spec() const {
    MaterialSpec m = preset(material.model, geometry.thickness, material.fiber_angles, material.kappa,
                            material.model == Model::GOH && material.switch_enabled);
    if (material.c1) m.c1 = *material.c1;
    if (material.c2) m.c2 = *material.c2;
    for (auto& f : m.fibers) {
      if (material.c3) f.c3 = *material.c3;
      if (material.k1) f.k1 = *material.k1;
      if (material.k2) f.k2 = *material.k2;
    }
    m.switch_enabled = material.switch_enabled;
    m.validate();
    return m;
  }
};

namespace detail {

struct Cursor {
  int line;
  int col;  // 1-based column of the value
  std::string key;
  std::string value;
};

inline std::vector<std::string> split(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline double to_double(const Cursor& c, const std::string& tok) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(c.line, c.col, "key '" + c.key + "': expected a number, got '" + tok + "'");
  }
}

inline int to_int(const Cursor& c, const std::string& tok) {
  const double v = to_double(c, tok);
  if (v != std::floor(v)) throw ParseError(c.line, c.col, "key '" + c.key + "': expected an integer, got '" + tok + "'");
  return static_cast<int>(v);
}

inline std::vector<std::string> tokens(const Cursor& c, std::size_t n) {
  std::vector<std::string> t = split(c.value);
  if (n > 0 && t.size() != n)
    throw ParseError(c.line, c.col, "key '" + c.key + "': expected " + std::to_string(n) + " value(s), got " +
                                        std::to_string(t.size()));
  return t;
}

inline double num(const Cursor& c) { return to_double(c, tokens(c, 1)[0]); }
inline int integer(const Cursor& c) { return to_int(c, tokens(c, 1)[0]); }

inline Vec3 vec3(const Cursor& c) {
  const auto t = tokens(c, 3);
  return Vec3(to_double(c, t[0]), to_double(c, t[1]), to_double(c, t[2]));
}

inline bool boolean(const Cursor& c) {
  const std::string v = tokens(c, 1)[0];
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ParseError(c.line, c.col, "key '" + c.key + "': expected true or false, got '" + v + "'");
}

inline Edge edge(const Cursor& c, const std::string& s) {
  if (auto e = parse_edge(s)) return *e;
  throw ParseError(c.line, c.col, "key '" + c.key + "': unknown edge '" + s + "'");
}

inline bool is_corner(const std::string& s) {
  return s == "umin_vmin" || s == "umin_vmax" || s == "umax_vmin" || s == "umax_vmax";
}

inline TargetComps target_comps(const Cursor& c, bool corners_only) {
  const auto t = tokens(c, 2);
  const bool ok = corners_only ? is_corner(t[0]) : (is_corner(t[0]) || parse_edge(t[0]) || t[0] == "all");
  if (!ok) throw ParseError(c.line, c.col, "key '" + c.key + "': unknown target '" + t[0] + "'");
  if (t[1].empty() || t[1].find_first_not_of("xyz") != std::string::npos)
    throw ParseError(c.line, c.col, "key '" + c.key + "': components must be letters from xyz, got '" + t[1] + "'");
  return {t[0], t[1]};
}

inline void apply_geometry(Scenario& s, const Cursor& c) {
  GeometrySpec& g = s.geometry;
  if (c.key == "kind") {
    g.kind = tokens(c, 1)[0];
    if (g.kind != "strip" && g.kind != "plate" && g.kind != "hemitube")
      throw ParseError(c.line, c.col, "key 'kind': unknown geometry '" + g.kind + "'");
  } else if (c.key == "thickness") g.thickness = num(c);
  else if (c.key == "width") g.width = num(c);
  else if (c.key == "length") g.length = num(c);
  else if (c.key == "radius") g.radius = num(c);
  else if (c.key == "elements") {
    const auto t = tokens(c, 2);
    g.nel_u = to_int(c, t[0]);
    g.nel_v = to_int(c, t[1]);
  } else if (c.key == "quarter") g.quarter = boolean(c);
  else if (c.key == "grading_focus") {
    const auto t = tokens(c, 2);
    if (t[0] != "-") g.grading.u = to_double(c, t[0]);
    if (t[1] != "-") g.grading.v = to_double(c, t[1]);
  } else if (c.key == "grading_ratio") g.grading_ratio = num(c);
  else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [geometry]");
}

inline void apply_material(Scenario& s, const Cursor& c) {
  MaterialInput& m = s.material;
  if (c.key == "model") {
    try {
      m.model = parse_model(tokens(c, 1)[0]);
    } catch (const InvalidMaterial& e) {
      throw ParseError(c.line, c.col, std::string("key 'model': ") + e.what());
    }
  } else if (c.key == "c1" || c.key == "mu") m.c1 = num(c);
  else if (c.key == "c2") m.c2 = num(c);
  else if (c.key == "c3") m.c3 = num(c);
  else if (c.key == "k1") m.k1 = num(c);
  else if (c.key == "k2") m.k2 = num(c);
  else if (c.key == "fibers") {
    m.fiber_angles.clear();
    for (const auto& t : tokens(c, 0)) m.fiber_angles.push_back(to_double(c, t));
  } else if (c.key == "kappa") m.kappa = num(c);
  else if (c.key == "switch") m.switch_enabled = boolean(c);
  else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [material]");
}

inline void apply_shell(Scenario& s, const Cursor& c) {
  if (c.key == "pipeline") {
    try {
      s.model.pipeline = parse_pipeline(tokens(c, 1)[0]);
    } catch (const Error& e) {
      throw ParseError(c.line, c.col, std::string("key 'pipeline': ") + e.what());
    }
  } else if (c.key == "gauss_points") {
    s.model.n_gp = integer(c);
    if (s.model.n_gp < 0) throw ParseError(c.line, c.col, "key 'gauss_points' must be non-negative");
  } else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [shell]");
}

inline void apply_constraints(Scenario& s, const Cursor& c) {
  ConstraintSpec& k = s.constraints;
  if (c.key == "fix") k.fix.push_back(target_comps(c, false));
  else if (c.key == "fix_point") k.fix.push_back(target_comps(c, true));
  else if (c.key == "tie") {
    TargetComps t = target_comps(c, false);
    if (!parse_edge(t.target)) throw ParseError(c.line, c.col, "key 'tie': target must be an edge");
    k.tie.push_back(t);
  } else if (c.key == "symmetry") k.symmetry.push_back(edge(c, tokens(c, 1)[0]));
  else if (c.key == "clamp") k.clamp.push_back(edge(c, tokens(c, 1)[0]));
  else if (c.key == "clamp_penalty") k.clamp_penalty = num(c);
  else if (c.key == "clamp_free_tilt") k.clamp_free_tilt = boolean(c);
  else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [constraints]");
}

inline void apply_load(Scenario& s, const Cursor& c) {
  LoadSpec& l = s.load;
  if (c.key == "type") {
    const std::string t = tokens(c, 1)[0];
    static const std::map<std::string, LoadKind> kinds = {{"corner_force", LoadKind::CornerForce},
                                                          {"pressure", LoadKind::Pressure},
                                                          {"rotation", LoadKind::Rotation},
                                                          {"indenter", LoadKind::Indenter},
                                                          {"edge_traction", LoadKind::EdgeTraction}};
    auto it = kinds.find(t);
    if (it == kinds.end()) throw ParseError(c.line, c.col, "key 'type': unknown load '" + t + "'");
    l.kind = it->second;
  } else if (c.key == "corner") {
    l.corner = tokens(c, 1)[0];
    if (!is_corner(l.corner)) throw ParseError(c.line, c.col, "key 'corner': unknown corner '" + l.corner + "'");
  } else if (c.key == "force" || c.key == "traction") l.vec = vec3(c);
  else if (c.key == "pressure") l.pressure = num(c);
  else if (c.key == "edge") l.edge = edge(c, tokens(c, 1)[0]);
  else if (c.key == "axis") l.axis = vec3(c);
  else if (c.key == "angle") l.angle_deg = num(c);
  else if (c.key == "penalty") l.penalty = num(c);
  else if (c.key == "free_tilt") l.free_tilt = boolean(c);
  else if (c.key == "radius") l.radius = num(c);
  else if (c.key == "depth") l.depth = num(c);
  else if (c.key == "center") l.center = vec3(c);
  else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [load]");
}

inline void apply_stepping(Scenario& s, const Cursor& c) {
  SteppingSpec& t = s.stepping;
  if (c.key == "steps") t.steps = integer(c);
  else if (c.key == "max_iter") t.max_iter = integer(c);
  else if (c.key == "tol_abs") t.tol_abs = num(c);
  else if (c.key == "tol_rel") t.tol_rel = num(c);
  else if (c.key == "tol_force") t.tol_force = num(c);
  else if (c.key == "max_bisections") t.max_bisections = integer(c);
  else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [stepping]");
  if (t.steps < 1) throw ParseError(c.line, c.col, "key 'steps' must be at least 1");
}

inline void apply_output(Scenario& s, const Cursor& c) {
  OutputSpec& o = s.output;
  if (c.key == "monitor") {
    const auto t = tokens(c, 0);
    if (t.size() == 2 && is_corner(t[0])) o.point = t[0];
    else if (t.size() == 3) {
      to_double(c, t[0]);
      to_double(c, t[1]);
      o.point = t[0] + " " + t[1];
    } else throw ParseError(c.line, c.col, "key 'monitor': expected '<corner> <x|y|z>' or '<u> <v> <x|y|z>'");
    const std::string& comp = t.back();
    if (comp != "x" && comp != "y" && comp != "z")
      throw ParseError(c.line, c.col, "key 'monitor': unknown component '" + comp + "'");
    o.component = comp[0] - 'x';
  } else if (c.key == "csv") o.csv = tokens(c, 1)[0];
  else throw ParseError(c.line, 1, "unknown key '" + c.key + "' in [output]");
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& is, const std::string& name = "scenario") {
  static const std::set<std::string> sections = {"geometry", "material",  "shell", "constraints",
                                                 "load",     "stepping", "output"};
  static const std::set<std::string> repeatable = {"fix", "fix_point", "tie", "clamp", "symmetry"};
  Scenario s;
  s.name = name;
  std::string section, raw;
  std::set<std::string> seen;
  int ln = 0;
  while (std::getline(is, raw)) {
    ++ln;
    std::string line = raw.substr(0, raw.find('#'));
    const std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(0, e + 1);
    if (line[b] == '[') {
      if (line.back() != ']') throw ParseError(ln, static_cast<int>(b) + 1, "unterminated section header");
      section = line.substr(b + 1, line.size() - b - 2);
      if (!sections.count(section)) throw ParseError(ln, static_cast<int>(b) + 2, "unknown section '" + section + "'");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(ln, static_cast<int>(b) + 1, "expected 'key = value'");
    if (section.empty()) throw ParseError(ln, static_cast<int>(b) + 1, "key outside of a section");
    detail::Cursor c;
    c.line = ln;
    c.key = line.substr(b, line.find_last_not_of(" \t", eq - 1) + 1 - b);
    const std::size_t vb = line.find_first_not_of(" \t", eq + 1);
    if (vb == std::string::npos) throw ParseError(ln, static_cast<int>(eq) + 2, "key '" + c.key + "' has no value");
    c.col = static_cast<int>(vb) + 1;
    c.value = line.substr(vb);
    const std::string qualified = section + "." + c.key;
    if (!repeatable.count(c.key) && !seen.insert(qualified).second)
      throw ParseError(ln, static_cast<int>(b) + 1, "duplicate key '" + c.key + "' in [" + section + "]");
    if (section == "geometry") detail::apply_geometry(s, c);
    else if (section == "material") detail::apply_material(s, c);
    else if (section == "shell") detail::apply_shell(s, c);
    else if (section == "constraints") detail::apply_constraints(s, c);
    else if (section == "load") detail::apply_load(s, c);
    else if (section == "stepping") detail::apply_stepping(s, c);
    else detail::apply_output(s, c);
  }
  return s;
}

inline Scenario parse_scenario_string(const std::string& text, const std::string& name = "scenario") {
  std::istringstream is(text);
  return parse_scenario(is, name);
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error("cannot open scenario file '" + path + "'");
  std::string name = path.substr(path.find_last_of("/\\") + 1);
  name = name.substr(0, name.find_last_of('.'));
  return parse_scenario(f, name);
}

}  // namespace klshell
