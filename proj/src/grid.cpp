#include "halfcell/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace halfcell {

StripGrid StripGrid::make(const DomainSpec& dom, int n_t, int n_z, double R,
                          double t_period) {
  StripGrid g;
  g.dim = dom.dim;
  g.dom = dom;
  g.R = R;
  g.n_z = n_z;
  g.h_z = R / (n_z - 1);
  if (g.dim == 2) {
    g.n_t = n_t;
    g.t_period = t_period;
    g.h_t = t_period / n_t;
  } else {
    g.n_t = 1;
    g.h_t = 0.0;
  }
  return g;
}

VectorXd StripGrid::point(int idx) const {
  VectorXd y(dim);
  if (dim == 1) {
    y[0] = z_of(idx);
  } else {
    double t = t_of(idx);
    y[0] = t;
    y[1] = dom.psi_at(t) + z_of(idx);
  }
  return y;
}

double torus_interpolate(const TorusGrid& g, const GridFn& u, const VectorXd& y) {
  auto frac = [&](double v) {
    double s = (v - std::floor(v)) * g.n_per;
    int i = static_cast<int>(std::floor(s));
    return std::pair<int, double>(i, s - i);
  };
  auto [i, wi] = frac(y[0]);
  if (g.dim == 1) return (1 - wi) * u[g.index(i)] + wi * u[g.index(i + 1)];
  auto [j, wj] = frac(y[1]);
  return (1 - wi) * (1 - wj) * u[g.index(i, j)] + wi * (1 - wj) * u[g.index(i + 1, j)] +
         (1 - wi) * wj * u[g.index(i, j + 1)] + wi * wj * u[g.index(i + 1, j + 1)];
}

double strip_interpolate(const StripGrid& g, const GridFn& u, double t, double z) {
  double zc = std::min(std::max(z, 0.0), g.R);
  double fz = zc / g.h_z;
  int k = std::min(static_cast<int>(std::floor(fz)), g.n_z - 2);
  double wz = fz - k;
  if (g.dim == 1) return (1 - wz) * u[g.index(0, k)] + wz * u[g.index(0, k + 1)];
  double ft = t / g.h_t;
  int i = static_cast<int>(std::floor(ft));
  double wt = ft - i;
  double v00 = u[g.index(i, k)], v10 = u[g.index(i + 1, k)];
  double v01 = u[g.index(i, k + 1)], v11 = u[g.index(i + 1, k + 1)];
  return (1 - wt) * ((1 - wz) * v00 + wz * v01) + wt * ((1 - wz) * v10 + wz * v11);
}

VectorXd strip_gradient(const StripGrid& g, const GridFn& u, int idx) {
  int i, k;
  g.coords(idx, i, k);
  double vz;
  if (k == 0)
    vz = (u[g.index(i, 1)] - u[g.index(i, 0)]) / g.h_z;
  else if (k == g.n_z - 1)
    vz = (u[g.index(i, k)] - u[g.index(i, k - 1)]) / g.h_z;
  else
    vz = (u[g.index(i, k + 1)] - u[g.index(i, k - 1)]) / (2 * g.h_z);
  VectorXd grad(g.dim);
  if (g.dim == 1) {
    grad[0] = vz;
    return grad;
  }
  double vt = (u[g.index(i + 1, k)] - u[g.index(i - 1, k)]) / (2 * g.h_t);
  double dpsi = g.dom.psi_d1(g.t_of(idx));
  grad[0] = vt - dpsi * vz;
  grad[1] = vz;
  return grad;
}

VectorXd torus_gradient(const TorusGrid& g, const GridFn& u, int idx) {
  int i, j;
  g.coords(idx, i, j);
  VectorXd grad(g.dim);
  grad[0] = (u[g.index(i + 1, j)] - u[g.index(i - 1, j)]) / (2 * g.h);
  if (g.dim == 2) grad[1] = (u[g.index(i, j + 1)] - u[g.index(i, j - 1)]) / (2 * g.h);
  return grad;
}

std::vector<std::pair<int, double>> strip_gradient_stencil(const StripGrid& g, int idx,
                                                           int d) {
  int i, k;
  g.coords(idx, i, k);
  std::vector<std::pair<int, double>> out;
  auto add = [&out](int j, double w) {
    for (auto& e : out)
      if (e.first == j) {
        e.second += w;
        return;
      }
    out.emplace_back(j, w);
  };
  auto add_vz = [&](double c) {
    if (k == 0) {
      add(g.index(i, 1), c / g.h_z);
      add(g.index(i, 0), -c / g.h_z);
    } else if (k == g.n_z - 1) {
      add(g.index(i, k), c / g.h_z);
      add(g.index(i, k - 1), -c / g.h_z);
    } else {
      add(g.index(i, k + 1), c / (2 * g.h_z));
      add(g.index(i, k - 1), -c / (2 * g.h_z));
    }
  };
  if (g.dim == 1 || d == 1) {
    add_vz(1.0);
    return out;
  }
  add(g.index(i + 1, k), 1.0 / (2 * g.h_t));
  add(g.index(i - 1, k), -1.0 / (2 * g.h_t));
  add_vz(-g.dom.psi_d1(g.t_of(idx)));
  return out;
}

std::vector<std::pair<int, double>> torus_gradient_stencil(const TorusGrid& g, int idx,
                                                           int d) {
  int i, j;
  g.coords(idx, i, j);
  std::vector<std::pair<int, double>> out;
  if (d == 0) {
    out.emplace_back(g.index(i + 1, j), 1.0 / (2 * g.h));
    out.emplace_back(g.index(i - 1, j), -1.0 / (2 * g.h));
  } else {
    out.emplace_back(g.index(i, j + 1), 1.0 / (2 * g.h));
    out.emplace_back(g.index(i, j - 1), -1.0 / (2 * g.h));
  }
  return out;
}

}  // namespace halfcell
