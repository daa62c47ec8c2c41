#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "singctrl/signals.hpp"

namespace singctrl {

enum class Direction { forward, backward };
enum class End { left, right };

// Nodal values u(t_i, x_j), stored level by level.
struct WaveField {
  SpaceGrid grid;
  TimeGrid tgrid;
  std::vector<double> u;

  WaveField() = default;
  WaveField(const SpaceGrid& g, const TimeGrid& tg)
      : grid(g), tgrid(tg), u(static_cast<size_t>(tg.size()) * g.nodes(), 0.0) {}

  int stride() const { return grid.nodes(); }
  double operator()(int i, int j) const { return u[static_cast<size_t>(i) * stride() + j]; }
  double& at(int i, int j) { return u[static_cast<size_t>(i) * stride() + j]; }
  std::span<const double> level(int i) const {
    return {u.data() + static_cast<size_t>(i) * stride(), static_cast<size_t>(stride())};
  }
  std::span<double> level(int i) {
    return {u.data() + static_cast<size_t>(i) * stride(), static_cast<size_t>(stride())};
  }
  Signal column(int j) const;
};

// f(t,x) = left(t) e^{-x/sqrt(eps)} + right(t) e^{-(1-x)/sqrt(eps)}
struct LayerSource {
  double eps = 1.0;
  Signal left, right;

  double eval(int i, double x) const;
};

struct WaveProblem {
  SpaceGrid grid;
  TimeGrid tgrid;
  // Initial data for forward solves, final data for backward solves (nodal).
  std::vector<double> position, velocity;
  // Dirichlet data at x = 0 and x = 1; an empty signal means zero.
  Signal left, right;
  // Optional distributed source on the same space-time grid.
  std::shared_ptr<const WaveField> source;
  std::optional<LayerSource> layer_source;
  // Allowed mismatch between the data and the boundary signals at the starting level.
  double compat_tol = 1e-8;
};

// Grid pair with Courant number one.
TimeGrid wave_time_grid(const SpaceGrid& g, double T);

WaveField solve_wave(const WaveProblem& p, Direction dir = Direction::forward);

// d/dx at the chosen end (not the outward normal), one-sided second order.
Signal trace_normal_derivative(const WaveField& u, End end);
Signal trace_time_derivative(const WaveField& u, End end, int k);

// u_xxxx computed as u_tttt; valid only for wave solutions. When `sensitivity` is given it
// receives the relative change between the dt and 2dt estimates.
WaveField fourth_x_derivative(const WaveField& u, double* sensitivity = nullptr);

// Leapfrog energy on half levels: sum_j h [ (D_t u)^2 + D_x u^{i+1} D_x u^i ] / 2.
std::vector<double> wave_energy(const WaveField& u);

template <class F>
std::vector<double> sample_nodes(const SpaceGrid& g, F f) {
  std::vector<double> v(g.nodes());
  for (int j = 0; j < g.nodes(); ++j) v[j] = f(g.x(j));
  return v;
}

}  // namespace singctrl
