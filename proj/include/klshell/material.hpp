#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tensor.hpp"

namespace klshell {

enum class Model { NH, MR, Fung, AMR, GOH };

inline const char* model_name(Model m) {
  switch (m) {
    case Model::NH: return "NH";
    case Model::MR: return "MR";
    case Model::Fung: return "Fung";
    case Model::AMR: return "AMR";
    case Model::GOH: return "GOH";
  }
  return "?";
}

inline Model parse_model(const std::string& s) {
  if (s == "NH") return Model::NH;
  if (s == "MR") return Model::MR;
  if (s == "Fung") return Model::Fung;
  if (s == "AMR") return Model::AMR;
  if (s == "GOH") return Model::GOH;
  throw InvalidMaterial("unknown material model '" + s + "'");
}

struct FiberFamily {
  Vec3 direction{0, 1, 0};
  double c3 = 0.0;     // AMR [kPa]
  double k1 = 0.0;     // GOH [kPa]
  double k2 = 0.0;     // GOH, dimensionless
  double kappa = 0.0;  // GOH dispersion in [0, 1/3]
};

// Constants are the 3D ones (c~1, c~2, mu~, ...); the directly-decoupled
// pipeline scales stress-like constants by the thickness itself.
struct MaterialSpec {
  Model model = Model::NH;
  double c1 = 10.0;  // c~1 for NH/MR/Fung/AMR, mu~ for GOH [kPa]
  double c2 = 0.0;   // MR/AMR [kPa]; Fung dimensionless
  std::vector<FiberFamily> fibers;
  double thickness = 0.1;  // [mm]
  bool switch_enabled = false;

  // Infinitesimal Young's modulus used for normalization.
  double youngs_modulus() const { return 3.0 * c1; }

  std::vector<Vec3> fiber_directions() const {
    std::vector<Vec3> d;
    for (const auto& f : fibers) d.push_back(f.direction);
    return d;
  }

  void validate() const {
    if (!(thickness > 0.0)) throw InvalidMaterial("thickness must be positive");
    if (!(c1 > 0.0)) throw InvalidMaterial("c1 must be positive");
    if ((model == Model::MR || model == Model::AMR || model == Model::Fung) && c2 < 0.0)
      throw InvalidMaterial("c2 must be non-negative");
    if (model == Model::GOH) {
      if (fibers.size() > 2) throw InvalidMaterial("GOH takes at most two fiber families");
      for (const auto& f : fibers) {
        if (f.k1 < 0.0 || f.k2 < 0.0) throw InvalidMaterial("k1, k2 must be non-negative");
        if (f.kappa < 0.0 || f.kappa > 1.0 / 3.0 + 1e-15) throw InvalidMaterial("kappa must lie in [0, 1/3]");
      }
    }
    if (model == Model::AMR)
      for (const auto& f : fibers)
        if (f.c3 < 0.0) throw InvalidMaterial("c3 must be non-negative");
    if (switch_enabled && model != Model::GOH) throw InvalidMaterial("the fiber switch applies to GOH only");
  }
};

// In-plane fiber direction sin(theta) e1 + cos(theta) e2.
inline Vec3 fiber_from_angle(double theta_deg) {
  const double t = theta_deg * std::numbers::pi / 180.0;
  return Vec3(std::sin(t), std::cos(t), 0.0);
}

// Table of default constants. Fiber angles are scenario input.
inline MaterialSpec preset(Model model, double thickness, const std::vector<double>& fiber_angles_deg = {},
                           double kappa = 0.0, bool switch_enabled = false) {
  MaterialSpec m;
  m.model = model;
  m.thickness = thickness;
  m.c1 = 10.0;
  switch (model) {
    case Model::NH: break;
    case Model::MR: m.c2 = 2.0 * m.c1; break;
    case Model::Fung: m.c2 = 10.0; break;
    case Model::AMR:
      m.c2 = 2.0 * m.c1;
      for (double th : fiber_angles_deg) m.fibers.push_back({fiber_from_angle(th), 100.0 * m.c1, 0, 0, 0});
      break;
    case Model::GOH:
      m.c1 = 10.0;
      for (double th : fiber_angles_deg) m.fibers.push_back({fiber_from_angle(th), 0, 100.0 * 10.0, 500.0, kappa});
      m.switch_enabled = switch_enabled;
      break;
  }
  m.validate();
  return m;
}

}  // namespace klshell
