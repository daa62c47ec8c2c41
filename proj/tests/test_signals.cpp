#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "singctrl/norms.hpp"
#include "singctrl/signals.hpp"

using namespace singctrl;

namespace {

// Adaptive Simpson, independent of the library quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
  const double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15 * tol)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-14) {
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  return simpson(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), tol, 50);
}

Signal sampled(const TimeGrid& g, const std::function<double(double)>& f) {
  Signal s(g);
  for (int i = 0; i < g.size(); ++i) s[i] = f(g.t(i));
  return s;
}

}  // namespace

TEST(Weight, VanishesAtBothEnds) {
  WeightFn w{2.5, 40, 3};
  EXPECT_EQ(eval_weight(w, 0.0), 0.0);
  EXPECT_EQ(eval_weight(w, 2.5), 0.0);
}

TEST(Weight, CentreIsOne) {
  EXPECT_NEAR(eval_weight(WeightFn{2.5, 40, 3}, 1.25), 1.0, 1e-15);
}

TEST(Weight, DerivativesMatchDifferences) {
  WeightFn w{2.5, 40, 3};
  const double d = 1e-5;
  for (double t : {0.01, 0.05, 0.2, 1.0, 2.45, 2.49}) {
    const double fd1 = (eval_weight(w, t + d) - eval_weight(w, t - d)) / (2 * d);
    const double fd2 = (eval_weight(w, t + d) - 2 * eval_weight(w, t) + eval_weight(w, t - d)) / (d * d);
    EXPECT_NEAR(weight_derivative(w, t, 1), fd1, 1e-6 * std::max(1.0, std::abs(fd1)));
    EXPECT_NEAR(weight_derivative(w, t, 2), fd2, 1e-3 * std::max(1.0, std::abs(fd2)));
  }
}

TEST(WeightedNorm, ZeroSignal) {
  TimeGrid g{2.5, 100};
  EXPECT_EQ(weighted_l2_norm(Signal(g), WeightFn{}, WeightMode::times_eta), 0.0);
  EXPECT_EQ(weighted_l2_norm(Signal(g), WeightFn{}, WeightMode::over_eta), 0.0);
}

TEST(WeightedNorm, OnesAgainstAdaptiveQuadrature) {
  WeightFn w{2.5, 40, 3};
  TimeGrid g{2.5, 10000};
  const double oracle = integrate([&](double t) { return eval_weight(w, t); }, 0.0, 2.5);
  EXPECT_NEAR(weighted_l2_norm(Signal(g, 1.0), w, WeightMode::times_eta), oracle, 1e-10);
}

TEST(Sobolev, ZeroField) {
  SpaceGrid g{50};
  std::vector<double> z(g.nodes(), 0.0);
  for (int k : {0, 1}) EXPECT_EQ(sobolev_norm(z, g, k), 0.0);
  auto mats = assemble_beam_matrices(g);
  std::vector<double> zh(2 * g.nodes(), 0.0);
  for (int k : {0, 1, 2}) EXPECT_EQ(sobolev_norm(zh, mats, k), 0.0);
}

TEST(Sobolev, ParabolaH1Seminorm) {
  for (int n : {20, 40}) {
    SpaceGrid g{n};
    auto f = sample_nodes(g, [](double x) { return x * (1 - x); });
    EXPECT_NEAR(sobolev_norm(f, g, 1), std::sqrt(1.0 / 3.0), 0.5 * g.h() * g.h());
  }
}

TEST(Sobolev, SineL2Norm) {
  SpaceGrid g{40};
  auto f = sample_nodes(g, [](double x) { return std::sin(M_PI * x); });
  EXPECT_NEAR(sobolev_norm(f, g, 0), std::sqrt(0.5), 2 * g.h() * g.h());
}

TEST(TimeDerivative, QuadraticSecondDerivative) {
  TimeGrid g{1.0, 50};
  auto d = signal_time_derivative(sampled(g, [](double t) { return t * t; }), 2);
  for (int i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], 2.0, 1e-10);
}

TEST(TimeDerivative, SineFirstDerivativeSecondOrder) {
  double prev = 0.0;
  for (int n : {100, 200}) {
    TimeGrid g{2.0, n};
    auto d = signal_time_derivative(sampled(g, [](double t) { return std::sin(t); }), 1);
    double err = 0.0;
    for (int i = 0; i < d.size(); ++i) err = std::max(err, std::abs(d[i] - std::cos(g.t(i))));
    EXPECT_LT(err, 2 * g.dt() * g.dt());
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.6);
    prev = err;
  }
}

TEST(TimeDerivative, ConstantGivesZero) {
  TimeGrid g{2.5, 40};
  for (int k : {1, 2}) {
    auto d = signal_time_derivative(Signal(g, 3.7), k);
    for (int i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], 0.0, 1e-12);
  }
}

TEST(FitRate, ExactPowerLaw) {
  std::vector<std::pair<double, double>> p{
      {1e-2, std::pow(10, -1.5)}, {1e-3, std::pow(10, -2.25)}, {1e-4, std::pow(10, -3.0)}};
  EXPECT_NEAR(fit_rate(p), 0.75, 1e-12);
}

TEST(FitRate, NoisyPowerLaw) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> noise(-0.01, 0.01);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<double, double>> p;
    for (double e : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) p.push_back({e, 3.0 * std::pow(e, 1.3) * (1 + noise(rng))});
    EXPECT_NEAR(fit_rate(p), 1.3, 0.02);
  }
}

TEST(L2, TrapezoidOfConstant) {
  TimeGrid g{2.5, 10};
  EXPECT_NEAR(l2_norm(Signal(g, 2.0)), 2.0 * std::sqrt(2.5), 1e-14);
}
