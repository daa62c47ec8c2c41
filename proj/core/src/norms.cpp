#include "singctrl/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "singctrl/banded.hpp"

namespace singctrl {

double sobolev_norm(std::span<const double> y, const BeamMatrices& mats, int order, NormKind kind) {
  if (y.size() != size_t(mats.ndof())) throw std::invalid_argument("field does not match the mesh");
  if (order < 0 || order > 2) throw std::invalid_argument("norm order must be 0, 1 or 2");
  const SymBand* forms[3] = {&mats.M, &mats.K, &mats.B};
  double s = 0.0;
  for (int k = kind == NormKind::full ? 0 : order; k <= order; ++k) s += forms[k]->quad(y);
  return std::sqrt(std::max(s, 0.0));
}

double sobolev_norm(std::span<const double> u, const SpaceGrid& g, int order, NormKind kind) {
  if (u.size() != size_t(g.nodes())) throw std::invalid_argument("field does not match the grid");
  if (order < 0 || order > 1) throw std::invalid_argument("nodal fields support orders 0 and 1");
  const double h = g.h();
  double s = 0.0;
  if (order == 0 || kind == NormKind::full)
    for (int j = 0; j < g.nodes(); ++j) s += (j == 0 || j == g.n_elem ? 0.5 * h : h) * u[j] * u[j];
  if (order == 1)
    for (int j = 0; j < g.n_elem; ++j) s += (u[j + 1] - u[j]) * (u[j + 1] - u[j]) / h;
  return std::sqrt(s);
}

double dual_norm_h1(std::span<const double> f, const SpaceGrid& g) {
  if (f.size() != size_t(g.nodes())) throw std::invalid_argument("functional does not match the grid");
  const int m = g.n_elem - 1;
  if (m < 1) return 0.0;
  const double h = g.h();
  SymBand K(m, 1);
  for (int i = 0; i < m; ++i) {
    K.set(i, i, 2.0 / h);
    if (i + 1 < m) K.set(i, i + 1, -1.0 / h);
  }
  std::vector<double> z(f.begin() + 1, f.end() - 1), r = z;
  BandCholesky(K).solve(z);
  double s = 0.0;
  for (int i = 0; i < m; ++i) s += r[i] * z[i];
  return std::sqrt(std::max(s, 0.0));
}

double dual_norm_h2(std::span<const double> f, const BeamMatrices& mats) {
  if (f.size() != size_t(mats.ndof())) throw std::invalid_argument("functional does not match the mesh");
  const int J = mats.grid.n_elem;
  std::vector<int> free;
  for (int i = 2; i < 2 * J; ++i) free.push_back(i);
  SymBand A = mats.B.combine(1.0, mats.K, 1.0).restrict(free);
  std::vector<double> r(free.size());
  for (size_t a = 0; a < free.size(); ++a) r[a] = f[free[a]];
  std::vector<double> z = r;
  BandCholesky(A).solve(z);
  double s = 0.0;
  for (size_t a = 0; a < r.size(); ++a) s += r[a] * z[a];
  return std::sqrt(std::max(s, 0.0));
}

double beam_state_norm(std::span<const double> y, std::span<const double> ydot, const BeamMatrices& mats) {
  double s = mats.B.quad(y) + mats.K.quad(y) + mats.M.quad(y) + mats.M.quad(ydot);
  return std::sqrt(std::max(s, 0.0));
}

}  // namespace singctrl
