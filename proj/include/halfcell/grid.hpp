#pragma once

#include <Eigen/Dense>
#include <vector>

#include "halfcell/model.hpp"

namespace halfcell {

// Uniform periodic grid on the unit torus, dim 1 or 2, h = 1/n_per.
struct TorusGrid {
  int dim = 1;
  int n_per = 64;
  double h = 1.0 / 64;

  TorusGrid() = default;
  TorusGrid(int dim_, int n_per_) : dim(dim_), n_per(n_per_), h(1.0 / n_per_) {}

  int num_nodes() const { return dim == 1 ? n_per : n_per * n_per; }
  int wrap(int i) const { return ((i % n_per) + n_per) % n_per; }
  int index(int i, int j = 0) const {
    return dim == 1 ? wrap(i) : wrap(i) + n_per * wrap(j);
  }
  void coords(int idx, int& i, int& j) const {
    i = idx % n_per;
    j = dim == 1 ? 0 : idx / n_per;
  }
  VectorXd point(int idx) const {
    int i, j;
    coords(idx, i, j);
    VectorXd y(dim);
    y[0] = i * h;
    if (dim == 2) y[1] = j * h;
    return y;
  }
};

enum class NodeClass { Interior, Bottom, Lid };

// Periodic half-strip in terrain-following coordinates: tangential t with
// period t_period (dim==2 only) and z = y_N - psi(y') in [0, R]. Bottom
// boundary nodes sit exactly at z = 0, the lid at z = R.
struct StripGrid {
  int dim = 1;
  int n_t = 1;           // tangential nodes per period (dim==2)
  double t_period = 1.0;
  int n_z = 65;          // nodes on [0, R]
  double R = 4.0;
  double h_t = 0.0;
  double h_z = 0.0;
  DomainSpec dom;        // carries psi; flat for dim==1

  static StripGrid make(const DomainSpec& dom, int n_t, int n_z, double R,
                        double t_period = 1.0);

  int num_nodes() const { return n_t * n_z; }
  int wrap_t(int i) const { return ((i % n_t) + n_t) % n_t; }
  int index(int i, int k) const { return wrap_t(i) + n_t * k; }
  void coords(int idx, int& i, int& k) const {
    i = idx % n_t;
    k = idx / n_t;
  }
  NodeClass cls(int idx) const {
    int k = idx / n_t;
    return k == 0 ? NodeClass::Bottom : (k == n_z - 1 ? NodeClass::Lid : NodeClass::Interior);
  }
  double t_of(int idx) const { return (idx % n_t) * h_t; }
  double z_of(int idx) const { return (idx / n_t) * h_z; }

  // Physical (unflattened) point y.
  VectorXd point(int idx) const;

  // Index of the boundary anchor node (origin on the bottom boundary).
  int anchor() const { return index(0, 0); }
};

using GridFn = std::vector<double>;

// Periodic (bi)linear interpolation of a torus grid function at y (wrapped).
double torus_interpolate(const TorusGrid& g, const GridFn& u, const VectorXd& y);

// Bilinear interpolation of a strip grid function at flattened coords (t, z);
// t wraps periodically, z is clamped to [0, R].
double strip_interpolate(const StripGrid& g, const GridFn& u, double t, double z);

// Physical-space gradient of a strip grid function at a node (tangential
// central, normal one-sided at bottom/lid), unflattened through psi.
VectorXd strip_gradient(const StripGrid& g, const GridFn& u, int idx);

// Stencil of component d of the gradient above, as (node, weight) pairs.
std::vector<std::pair<int, double>> strip_gradient_stencil(const StripGrid& g, int idx,
                                                           int d);
std::vector<std::pair<int, double>> torus_gradient_stencil(const TorusGrid& g, int idx,
                                                           int d);

VectorXd torus_gradient(const TorusGrid& g, const GridFn& u, int idx);

}  // namespace halfcell
