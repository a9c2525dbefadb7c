#pragma once

// Homogeneous displacement constraints. Ties merge unknowns into one
// equation, fixes remove a whole tied class.

#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "mesh.hpp"

namespace klshell {

class DofMap {
 public:
  explicit DofMap(int n_dof = 0) : parent_(n_dof), fixed_(n_dof, false) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  int size() const { return static_cast<int>(parent_.size()); }

  void fix(int dof) {
    fixed_[root(dof)] = true;
    numbered_ = false;
  }

  void tie(int a, int b) {
    const int ra = root(a), rb = root(b);
    if (ra == rb) return;
    parent_[rb] = ra;
    fixed_[ra] = fixed_[ra] || fixed_[rb];
    numbered_ = false;
  }

  bool is_fixed(int dof) const { return fixed_[root(dof)]; }

  // Equation number of a dof, -1 when fixed.
  int eq(int dof) const {
    number();
    return eq_[dof];
  }

  int n_free() const {
    number();
    return n_free_;
  }

  Eigen::VectorXd reduce(const Eigen::VectorXd& full) const {
    number();
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n_free_);
    for (int i = 0; i < size(); ++i)
      if (eq_[i] >= 0) r(eq_[i]) += full(i);
    return r;
  }

  Eigen::VectorXd expand(const Eigen::VectorXd& red) const {
    number();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(size());
    for (int i = 0; i < size(); ++i)
      if (eq_[i] >= 0) u(i) = red(eq_[i]);
    return u;
  }

  template <class TripletRange>
  Eigen::SparseMatrix<double> reduce(const TripletRange& k) const {
    number();
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(k.size());
    for (const auto& e : k) {
      const int r = eq_[e.row()], c = eq_[e.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, e.value());
    }
    Eigen::SparseMatrix<double> K(n_free_, n_free_);
    K.setFromTriplets(t.begin(), t.end());
    return K;
  }

 private:
  int root(int i) const {
    while (parent_[i] != i) i = parent_[i];
    return i;
  }

  void number() const {
    if (numbered_) return;
    const int n = size();
    eq_.assign(n, -1);
    std::vector<int> cls(n, -1);
    n_free_ = 0;
    for (int i = 0; i < n; ++i) {
      const int r = root(i);
      if (fixed_[r]) continue;
      if (cls[r] < 0) cls[r] = n_free_++;
      eq_[i] = cls[r];
    }
    numbered_ = true;
  }

  std::vector<int> parent_;
  std::vector<bool> fixed_;
  mutable std::vector<int> eq_;
  mutable int n_free_ = 0;
  mutable bool numbered_ = false;
};

// Component mask from letters such as "xz".
inline std::vector<int> parse_components(const std::string& s) {
  std::vector<int> c;
  for (char ch : s) {
    if (ch == 'x') c.push_back(0);
    else if (ch == 'y') c.push_back(1);
    else if (ch == 'z') c.push_back(2);
    else throw Error(std::string("unknown component '") + ch + "'");
  }
  return c;
}

inline void fix_nodes(DofMap& d, const std::vector<int>& nodes, const std::vector<int>& comps) {
  for (int n : nodes)
    for (int c : comps) d.fix(3 * n + c);
}

// One common value per component along the nodes.
inline void tie_nodes(DofMap& d, const std::vector<int>& nodes, const std::vector<int>& comps) {
  for (std::size_t k = 1; k < nodes.size(); ++k)
    for (int c : comps) d.tie(3 * nodes[0] + c, 3 * nodes[k] + c);
}

// Direction normal to a mirror plane through an edge: the coordinate along
// which the reference net leaves the edge.
inline int symmetry_component(const NurbsPatch& P, Edge e) {
  const std::vector<int> r0 = edge_nodes(P, e, 0), r1 = edge_nodes(P, e, 1);
  Vec3 d = (P.ctrl[r1[0]] - P.ctrl[r0[0]]).cwiseAbs();
  int c;
  d.maxCoeff(&c);
  return c;
}

// Mirror symmetry about the plane through an edge: zero normal displacement
// on the edge and zero slope of the in-plane and transverse components.
inline void apply_symmetry(DofMap& d, const NurbsPatch& P, Edge e) {
  const int cn = symmetry_component(P, e);
  const std::vector<int> r0 = edge_nodes(P, e, 0), r1 = edge_nodes(P, e, 1);
  for (std::size_t k = 0; k < r0.size(); ++k) {
    d.fix(3 * r0[k] + cn);
    for (int c = 0; c < 3; ++c)
      if (c != cn) d.tie(3 * r0[k] + c, 3 * r1[k] + c);
  }
}

}  // namespace klshell
