#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "singctrl/experiment.hpp"
#include "singctrl/wave.hpp"
#include "singctrl/wave_hum.hpp"

using namespace singctrl;

namespace {

WaveProblem standing(int J, double T = 2.0) {
  WaveProblem p;
  p.grid = SpaceGrid{J};
  p.tgrid = wave_time_grid(p.grid, T);
  p.position = sample_nodes(p.grid, [](double x) { return std::sin(M_PI * x); });
  p.velocity.assign(p.grid.nodes(), 0.0);
  return p;
}

double standing_error(int J) {
  auto p = standing(J);
  auto u = solve_wave(p);
  double err = 0.0;
  for (int i = 0; i < u.tgrid.size(); ++i)
    for (int j = 0; j <= J; ++j)
      err = std::max(err, std::abs(u(i, j) - std::sin(M_PI * p.grid.x(j)) * std::cos(M_PI * u.tgrid.t(i))));
  return err;
}

double right_trace_error(int J) {
  auto u = solve_wave(standing(J));
  auto tr = trace_normal_derivative(u, End::right);
  double err = 0.0;
  for (int i = 0; i < tr.size(); ++i) err = std::max(err, std::abs(tr[i] + M_PI * std::cos(M_PI * u.tgrid.t(i))));
  return err;
}

}  // namespace

TEST(WaveSolve, StandingWaveAtNodes) {
  // The Courant-one scheme reproduces separated solutions at the nodes.
  for (int J : {40, 80}) EXPECT_LT(standing_error(J), 1e-12);
}

TEST(WaveSolve, DAlembertExactOnCharacteristics) {
  for (unsigned seed : {1u, 2u, 3u}) EXPECT_LE(suite_wave_exactness(seed).value, 1e-12);
}

TEST(WaveSolve, RejectsOtherCourantNumbers) {
  auto r = suite_wave_exactness(1, 0.9);
  EXPECT_FALSE(r.pass);
}

TEST(WaveSolve, BoundaryDrivenResidual) {
  WaveProblem p;
  p.grid = SpaceGrid{100};
  p.tgrid = wave_time_grid(p.grid, 2.5);
  p.position.assign(p.grid.nodes(), 0.0);
  p.velocity.assign(p.grid.nodes(), 0.0);
  p.right = Signal(p.tgrid);
  for (int i = 0; i < p.tgrid.size(); ++i) {
    const double t = p.tgrid.t(i);
    p.right[i] = t * t * t * std::exp(-t);
  }
  auto u = solve_wave(p);
  double res = 0.0;
  for (int i = 1; i < p.tgrid.n_steps; ++i)
    for (int j = 1; j < p.grid.n_elem; ++j)
      res = std::max(res, std::abs(u(i + 1, j) - 2 * u(i, j) + u(i - 1, j) - (u(i, j + 1) - 2 * u(i, j) + u(i, j - 1))));
  EXPECT_LE(res, 1e-10);
  for (int i = 0; i < p.tgrid.size(); ++i) EXPECT_DOUBLE_EQ(u(i, p.grid.n_elem), p.right[i]);
}

TEST(WaveSolve, BackwardRecoversInitialLevels) {
  EXPECT_LE(suite_wave_reversibility(11).value, 1e-10);
}

TEST(WaveTrace, StandingWaveRightTrace) {
  EXPECT_LT(right_trace_error(100), 20.0 / (100.0 * 100.0));
}

TEST(WaveTrace, RefinementQuartersError) {
  const double r = right_trace_error(50) / right_trace_error(100);
  EXPECT_GT(r, 3.2);
  EXPECT_LT(r, 4.8);
}

TEST(WaveTrace, ZeroField) {
  WaveField u(SpaceGrid{20}, TimeGrid{2.5, 50});
  for (End e : {End::left, End::right}) {
    auto tr = trace_normal_derivative(u, e);
    for (int i = 0; i < tr.size(); ++i) EXPECT_EQ(tr[i], 0.0);
  }
}

TEST(WaveTrace, TimeDerivativesOfBoundaryColumn) {
  SpaceGrid g{10};
  TimeGrid tg{2.0, 400};
  WaveField a(g, tg), b(g, tg), c(g, tg);
  for (int i = 0; i < tg.size(); ++i) {
    const double t = tg.t(i);
    a.at(i, g.n_elem) = t * t;
    b.at(i, g.n_elem) = std::sin(t);
    c.at(i, g.n_elem) = 1.5;
  }
  auto d2 = trace_time_derivative(a, End::right, 2);
  auto d1 = trace_time_derivative(b, End::right, 1);
  for (int i = 0; i < tg.size(); ++i) {
    EXPECT_NEAR(d2[i], 2.0, 1e-8);
    EXPECT_NEAR(d1[i], std::cos(tg.t(i)), 2 * tg.dt() * tg.dt());
    for (int k : {1, 2}) EXPECT_NEAR(trace_time_derivative(c, End::right, k)[i], 0.0, 1e-10);
  }
}

TEST(FourthDerivative, StandingWave) {
  const int J = 200;
  auto u = solve_wave(standing(J));
  auto d = fourth_x_derivative(u);
  const double p4 = std::pow(M_PI, 4);
  double err = 0.0;
  for (int i = 0; i < u.tgrid.size(); ++i)
    for (int j = 0; j <= J; ++j)
      err = std::max(err, std::abs(d(i, j) - p4 * std::sin(M_PI * u.grid.x(j)) * std::cos(M_PI * u.tgrid.t(i))));
  EXPECT_LT(err / p4, 1e-2);
}

TEST(FourthDerivative, AffineFieldVanishes) {
  SpaceGrid g{40};
  TimeGrid tg = wave_time_grid(g, 2.5);
  WaveField u(g, tg);
  for (int i = 0; i < tg.size(); ++i)
    for (int j = 0; j <= g.n_elem; ++j) u.at(i, j) = 0.3 + 1.7 * g.x(j) - 0.4 * tg.t(i);
  auto d = fourth_x_derivative(u);
  for (double v : d.u) EXPECT_NEAR(v, 0.0, 1e-6);
}

TEST(FourthDerivative, TwoModeSolution) {
  const int J = 200;
  WaveProblem p = standing(J);
  p.position = sample_nodes(p.grid, [](double x) { return std::sin(M_PI * x) + 0.3 * std::sin(3 * M_PI * x); });
  auto u = solve_wave(p);
  auto d = fourth_x_derivative(u);
  double err = 0.0, scale = 0.0;
  for (int i = 0; i < u.tgrid.size(); ++i)
    for (int j = 0; j <= J; ++j) {
      const double x = p.grid.x(j), t = u.tgrid.t(i);
      const double ex = std::pow(M_PI, 4) * (std::sin(M_PI * x) * std::cos(M_PI * t) +
                                             0.3 * 81 * std::sin(3 * M_PI * x) * std::cos(3 * M_PI * t));
      err = std::max(err, std::abs(d(i, j) - ex));
      scale = std::max(scale, std::abs(ex));
    }
  EXPECT_LT(err / scale, 1e-2);
}

TEST(WaveEnergy, ConservedWithoutControl) {
  auto u = solve_wave(standing(64, 2.5));
  auto E = wave_energy(u);
  for (double e : E) EXPECT_NEAR(e, E[0], 1e-10 * E[0]);
}
