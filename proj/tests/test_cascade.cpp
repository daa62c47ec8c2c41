#include <gtest/gtest.h>

#include <cmath>

#include "singctrl/cascade.hpp"
#include "singctrl/experiment.hpp"

using namespace singctrl;

namespace {

// One cascade on the coarsest allowed mesh, shared by the tests below.
const CascadeResult& reference() {
  static const CascadeResult c = run_cascade(default_cascade_input(200));
  return c;
}

CascadeInput zero_input() {
  auto in = default_cascade_input(100);
  in.position = [](double) { return 0.0; };
  return in;
}

}  // namespace

TEST(Compatibility, SineFourthPowerOddLinesPass) {
  auto r = check_compatibility(default_cascade_input(), 1);
  ASSERT_EQ(r.checks.size(), 4u);
  EXPECT_TRUE(r.pass());
}

TEST(Compatibility, ZeroDataPassExactly) {
  auto r = check_compatibility(zero_input(), 2);
  EXPECT_TRUE(r.pass());
  for (const auto& c : r.checks) EXPECT_EQ(c.residual, 0.0);
}

TEST(Compatibility, FourthDerivativeLineFlagged) {
  auto r = check_compatibility(default_cascade_input(), 2);
  EXPECT_FALSE(r.pass());
  const double expected = 24 * std::pow(2 * M_PI, 4);
  int flagged = 0;
  for (const auto& c : r.checks) {
    if (c.pass) continue;
    ++flagged;
    EXPECT_NEAR(c.residual, expected, 1e-6 * expected) << c.name;
  }
  EXPECT_EQ(flagged, 2);
}

TEST(EndpointDerivatives, Polynomial) {
  auto d = endpoint_derivatives([](double x) { return x * x * x - 2 * x; }, 3);
  EXPECT_NEAR(d.left[1], -2.0, 1e-10);
  EXPECT_NEAR(d.right[1], 1.0, 1e-10);
  EXPECT_NEAR(d.right[2], 6.0, 1e-7);
  EXPECT_NEAR(d.left[3], 6.0, 1e-5);
}

TEST(Cascade, ZeroDataGivesZeroLevels) {
  auto c = run_cascade(zero_input());
  ASSERT_EQ(c.order(), 2);
  for (const auto& L : c.levels) {
    for (double v : L.v.values) EXPECT_EQ(v, 0.0);
    for (double v : L.y.u) EXPECT_EQ(v, 0.0);
  }
}

TEST(Cascade, LevelZeroNorm) {
  EXPECT_NEAR(l2_norm(reference().levels[0].v), 0.349834, 0.02 * 0.349834);
}

TEST(Cascade, CertifiedLevels) {
  const auto& c = reference();
  EXPECT_TRUE(c.certified(0));
  EXPECT_TRUE(c.certified(1));
  EXPECT_LE(c.levels[0].final_residual, 1e-5);
}

TEST(Cascade, ControlIdentity) {
  const auto& c = reference();
  for (const auto& L : c.levels)
    for (int i = 0; i < c.tgrid.size(); ++i)
      EXPECT_NEAR(L.v[i] + eval_weight(c.weight, c.tgrid.t(i)) * L.phi_x1[i], 0.0, 1e-12 * (1 + std::abs(L.v[i])));
}

TEST(Cascade, LimitBoundaryValues) {
  // y^0(1) = -v^0 and y^1(1) = y^0_x(1) - v^1.
  const auto& c = reference();
  const int J = c.grid.n_elem;
  const auto &L0 = c.levels[0], &L1 = c.levels[1];
  for (int i = 0; i < c.tgrid.size(); ++i) {
    EXPECT_NEAR(L0.y(i, J), -L0.v[i], 1e-12 * (1 + std::abs(L0.v[i])));
    EXPECT_NEAR(L1.y(i, J), L0.y_x1[i] - L1.v[i], 1e-10 * (1 + std::abs(L1.v[i])));
  }
}

TEST(Cascade, DoublingDataDoublesCorrectors) {
  auto in = default_cascade_input(200);
  in.position = [](double x) { return 2 * std::pow(std::sin(2 * M_PI * x), 4); };
  auto c2 = run_cascade(in);
  const auto& c = reference();
  for (int j = 0; j <= 2; ++j) {
    Signal d = c2.levels[j].v - 2.0 * c.levels[j].v;
    EXPECT_LE(l2_norm(d), 1e-9 * l2_norm(c2.levels[j].v)) << "level " << j;
  }
}

TEST(Cascade, Linearity) {
  auto r = suite_cascade_linearity(5);
  EXPECT_TRUE(r.pass) << r.value;
}

TEST(Composite, RightEndCancels) {
  const auto& c = reference();
  auto comp = composite_approximation(c, 1e-4, 0);
  for (int i = 0; i < c.tgrid.size(); ++i) EXPECT_NEAR(comp.at(i, 1.0).y, 0.0, 1e-12);
}

TEST(Composite, LeftEndExponentiallySmall) {
  const auto& c = reference();
  const double eps = 1e-2;
  auto comp = composite_approximation(c, eps, 0);
  const double bound = 2 * std::exp(-1 / std::sqrt(eps)) * 0.5;
  for (int i = 0; i < c.tgrid.size(); ++i) EXPECT_LE(std::abs(comp.at(i, 0.0).y), bound);
}

TEST(ExpansionError, ExactLeadingTermGivesZero) {
  const auto& c = reference();
  const double eps = 1e-3;
  EXPECT_NEAR(expansion_error(c.levels[0].v, c, eps, 0), 0.0, 1e-14);
}

TEST(ExpansionError, ResamplingOntoAFinerGrid) {
  const auto& c = reference();
  const double eps = 1e-4;
  Signal s = expansion_sum(c, eps, 2);
  Signal fine = resample_cubic(s, TimeGrid{c.tgrid.T, 4 * c.tgrid.n_steps});
  EXPECT_LT(expansion_error(fine, c, eps, 2), 1e-3 * l2_norm(s));
}

TEST(Adjoint, ZeroCascadeGivesZeroResidual) {
  auto c = run_cascade(zero_input());
  auto a = adjoint_expansion_check(c, 1e-3, 2);
  EXPECT_EQ(a.residual, 0.0);
  EXPECT_EQ(a.bc_residual, 0.0);
}

TEST(Adjoint, CorrectedDataClamped) {
  for (int n = 0; n <= 2; ++n) EXPECT_LE(adjoint_expansion_check(reference(), 1e-3, n).bc_residual, 1e-12);
}

TEST(LayerScaling, ZeroSourceHasNoExponent) {
  TimeGrid tg{2.5, 200};
  const double eps[] = {1e-3, 1e-4};
  auto r = layer_source_scaling(eps, Signal(tg));
  for (auto [e, s] : r.points) EXPECT_EQ(s, 0.0);
  EXPECT_TRUE(std::isnan(r.exponent));
}

TEST(LayerScaling, HalvingEps) {
  TimeGrid tg{2.5, 1000};
  Signal f(tg);
  for (int i = 0; i < tg.size(); ++i) f[i] = std::pow(std::sin(M_PI * tg.t(i) / 2.5), 2);
  const double eps[] = {2e-4, 1e-4, 5e-5};
  auto r = layer_source_scaling(eps, f);
  for (int k : {0, 1}) {
    const double ratio = r.points[k].second / r.points[k + 1].second;
    EXPECT_NEAR(ratio, std::pow(2.0, 0.75), 0.15 * std::pow(2.0, 0.75));
  }
}
