#include <gtest/gtest.h>

#include <cmath>

#include "singctrl/beam.hpp"
#include "singctrl/beam_hum.hpp"
#include "singctrl/experiment.hpp"
#include "singctrl/norms.hpp"

using namespace singctrl;

namespace {

// Cubic Hermite shape functions on [0, h] and their derivatives, written out directly.
double shape(int a, double s, double h, int d) {
  switch (a) {
    case 0: return d == 0 ? 1 - 3 * s * s + 2 * s * s * s : d == 1 ? (-6 * s + 6 * s * s) / h : (-6 + 12 * s) / (h * h);
    case 1: return d == 0 ? h * (s - 2 * s * s + s * s * s) : d == 1 ? 1 - 4 * s + 3 * s * s : (-4 + 6 * s) / h;
    case 2: return d == 0 ? 3 * s * s - 2 * s * s * s : d == 1 ? (6 * s - 6 * s * s) / h : (6 - 12 * s) / (h * h);
    default: return d == 0 ? h * (-s * s + s * s * s) : d == 1 ? -2 * s + 3 * s * s : (-2 + 6 * s) / h;
  }
}

BeamField single_level(const SpaceGrid& g, std::vector<double> y) {
  BeamField f;
  f.grid = g;
  f.tgrid = TimeGrid{1.0, 1};
  f.y = y;
  f.y.insert(f.y.end(), y.begin(), y.end());
  f.ydot.assign(f.y.size(), 0.0);
  return f;
}

BeamProblem modal_problem(int steps) {
  BeamProblem p;
  p.eps = 1e-2;
  p.grid = SpaceGrid{40};
  p.tgrid = TimeGrid{1.0, steps};
  BeamModes m(assemble_beam_matrices(p.grid), p.eps);
  std::vector<double> a0(m.size(), 0.0), a1(m.size(), 0.0);
  a0[0] = 1.0;
  a0[2] = 0.2;
  p.y0 = m.state(0.0, a0, a1);
  p.y1.assign(p.y0.size(), 0.0);
  return p;
}

double modal_error(int steps) {
  auto p = modal_problem(steps);
  auto mats = assemble_beam_matrices(p.grid);
  BeamModes m(mats, p.eps);
  auto a0 = m.project(p.y0);
  std::vector<double> a1(a0.size(), 0.0);
  auto f = solve_beam(p);
  const int N = p.tgrid.n_steps;
  auto exact = m.state(p.tgrid.T, a0, a1);
  std::vector<double> d(exact.size());
  for (size_t k = 0; k < d.size(); ++k) d[k] = f.level(N)[k] - exact[k];
  std::vector<double> z(d.size(), 0.0);
  return beam_state_norm(d, z, mats);
}

}  // namespace

TEST(BeamMatrices, ConstantsInKernels) {
  SpaceGrid g{25};
  auto mats = assemble_beam_matrices(g);
  std::vector<double> c(2 * g.nodes(), 0.0);
  for (int j = 0; j < g.nodes(); ++j) c[value_dof(j)] = 1.0;
  EXPECT_NEAR(sobolev_norm(c, mats, 1), 0.0, 1e-12);
  EXPECT_NEAR(sobolev_norm(c, mats, 2), 0.0, 1e-12);
  EXPECT_NEAR(sobolev_norm(c, mats, 0), 1.0, 1e-12);
}

TEST(BeamMatrices, ElementMatricesAgainstGaussQuadrature) {
  const double h = 0.37;
  double M[4][4], K[4][4], B[4][4];
  hermite_element(h, M, K, B);
  const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831, 0.9061798459386640};
  const double wg[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                        0.2369268850561891};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      double m = 0, k = 0, bb = 0;
      for (int q = 0; q < 5; ++q) {
        const double s = 0.5 * (xg[q] + 1), w = 0.5 * h * wg[q];
        m += w * shape(a, s, h, 0) * shape(b, s, h, 0);
        k += w * shape(a, s, h, 1) * shape(b, s, h, 1);
        bb += w * shape(a, s, h, 2) * shape(b, s, h, 2);
      }
      EXPECT_NEAR(M[a][b], m, 1e-12);
      EXPECT_NEAR(K[a][b], k, 1e-12);
      EXPECT_NEAR(B[a][b], bb, 1e-12 * std::max(1.0, std::abs(bb)));
    }
}

TEST(BeamMatrices, MassFormOfSine) {
  double prev = 0.0;
  for (int n : {10, 20}) {
    SpaceGrid g{n};
    auto y = hermite_interpolant(g, [](double x) { return std::sin(M_PI * x); },
                                 [](double x) { return M_PI * std::cos(M_PI * x); });
    auto mats = assemble_beam_matrices(g);
    const double s = sobolev_norm(y, mats, 0);
    const double err = std::abs(s * s - 0.5);
    EXPECT_LT(err, 1e-4);
    if (prev > 0) EXPECT_GT(prev / err, 12.0);  // fourth order
    prev = err;
  }
}

TEST(BeamSolve, ZeroDataStaysZero) {
  BeamProblem p;
  p.grid = SpaceGrid{40};
  p.tgrid = TimeGrid{2.5, 100};
  p.y0.assign(2 * p.grid.nodes(), 0.0);
  p.y1 = p.y0;
  auto f = solve_beam(p);
  for (double v : f.y) EXPECT_EQ(v, 0.0);
  for (double v : f.ydot) EXPECT_EQ(v, 0.0);
}

TEST(BeamSolve, EnergyConserved) {
  for (unsigned s : {1u, 2u}) EXPECT_LE(suite_beam_energy(s).value, 1e-8);
}

TEST(BeamSolve, ModalSolutionSecondOrderInTime) {
  const double e1 = modal_error(200), e2 = modal_error(400);
  EXPECT_LT(e1, 5e-2);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(BeamSolve, Reversible) {
  EXPECT_LE(suite_beam_reversibility(3).value, 1e-8);
}

TEST(BeamSolve, RefusesUnderResolvedMesh) {
  BeamProblem p;
  p.eps = 1e-4;
  p.grid = SpaceGrid{20};
  p.tgrid = TimeGrid{2.5, 100};
  p.y0.assign(2 * p.grid.nodes(), 0.0);
  p.y1 = p.y0;
  EXPECT_THROW(solve_beam(p), std::invalid_argument);
  p.check_resolution = false;
  EXPECT_NO_THROW(solve_beam(p));
}

TEST(BeamTrace, ParabolaIsExact) {
  SpaceGrid g{10};
  auto y = hermite_interpolant(g, [](double x) { return x * x; }, [](double x) { return 2 * x; });
  auto tr = trace_xx_at_one(single_level(g, y));
  for (int i = 0; i < tr.size(); ++i) EXPECT_NEAR(tr[i], 2.0, 1e-9);
}

TEST(BeamTrace, SineCurvatureVanishesAtOne) {
  SpaceGrid g{50};
  auto y = hermite_interpolant(g, [](double x) { return std::sin(M_PI * x); },
                               [](double x) { return M_PI * std::cos(M_PI * x); });
  auto tr = trace_xx_at_one(single_level(g, y));
  EXPECT_LT(std::abs(tr[0]), 10 * g.h() * g.h() * M_PI * M_PI);
}

TEST(BeamTrace, ZeroField) {
  SpaceGrid g{10};
  auto tr = trace_xx_at_one(single_level(g, std::vector<double>(2 * g.nodes(), 0.0)));
  EXPECT_EQ(tr[0], 0.0);
}

TEST(BeamEnergy, ZeroFieldAndQuadraticScaling) {
  auto p = modal_problem(100);
  auto mats = assemble_beam_matrices(p.grid);
  auto E1 = beam_energy(solve_beam(p), mats, p.eps);
  for (auto& v : p.y0) v *= 2;
  auto E2 = beam_energy(solve_beam(p), mats, p.eps);
  for (int i = 0; i < E1.size(); ++i) EXPECT_NEAR(E2[i], 4 * E1[i], 1e-12 * E2[i]);
  for (auto& v : p.y0) v = 0;
  auto E0 = beam_energy(solve_beam(p), mats, p.eps);
  for (int i = 0; i < E0.size(); ++i) EXPECT_EQ(E0[i], 0.0);
}
