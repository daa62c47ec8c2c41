#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "singctrl/experiment.hpp"
#include "singctrl/wave_hum.hpp"

using namespace singctrl;

namespace {

std::vector<double> random_dir(size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST(WaveHum, ZeroDataGivesZeroControl) {
  auto p = default_wave_problem(100);
  std::fill(p.y0.begin(), p.y0.end(), 0.0);
  std::fill(p.y1.begin(), p.y1.end(), 0.0);
  auto r = solve_wave_control(p);
  EXPECT_LE(r.iterations, 1);
  for (double v : r.control.values) EXPECT_EQ(v, 0.0);
}

TEST(WaveHum, ReferenceNormAtCoarsestAllowedMesh) {
  auto r = solve_wave_control(default_wave_problem(200));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(l2_norm(r.control), 0.349834, 0.02 * 0.349834);
}

TEST(WaveHum, ConvergedRunsLeaveSmallFinalState) {
  auto p = default_wave_problem(200);
  auto r = solve_wave_control(p);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(wave_control_certificate(p, r.control), 1e-5);
}

TEST(WaveHum, ControlVanishesOutsideWeightSupport) {
  auto p = default_wave_problem(100);
  auto r = solve_wave_control(p);
  EXPECT_EQ(r.control[0], 0.0);
  EXPECT_EQ(r.control[r.control.size() - 1], 0.0);
}

TEST(WaveHum, GradientCheck) {
  for (unsigned s : {1u, 2u}) EXPECT_LE(suite_wave_gradient(s).value, 1e-6);
}

TEST(WaveHum, FunctionalIsQuadratic) {
  auto p = default_wave_problem(40);
  auto mu = random_dir(2 * (p.grid.n_elem - 1), 3);
  auto scaled = [&](double s) {
    std::vector<double> m(mu);
    for (auto& x : m) x *= s;
    return wave_hum_functional(p, m);
  };
  // Third difference of a quadratic vanishes.
  const double d3 = scaled(3) - 3 * scaled(2) + 3 * scaled(1) - scaled(0);
  EXPECT_NEAR(d3, 0.0, 1e-9 * std::abs(scaled(3)));
  EXPECT_EQ(scaled(0), 0.0);
}

TEST(WaveHum, GradientCheckScaledDirection) {
  auto p = default_wave_problem(40);
  const size_t n = 2 * (p.grid.n_elem - 1);
  auto base = random_dir(n, 5), dir = random_dir(n, 6);
  auto dir2 = dir;
  for (auto& x : dir2) x *= 2;
  EXPECT_LE(gradient_check_wave(p, base, dir, 1e-5), 1e-6);
  EXPECT_LE(gradient_check_wave(p, base, dir2, 1e-5), 1e-6);
}

TEST(WaveHum, GradientCheckZeroDirection) {
  auto p = default_wave_problem(40);
  const size_t n = 2 * (p.grid.n_elem - 1);
  std::vector<double> zero(n, 0.0);
  EXPECT_EQ(gradient_check_wave(p, random_dir(n, 8), zero, 1e-5), 0.0);
}
