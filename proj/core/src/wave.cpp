#include "singctrl/wave.hpp"

#include <cmath>
#include <stdexcept>

namespace singctrl {

Signal WaveField::column(int j) const {
  Signal s(tgrid);
  for (int i = 0; i < tgrid.size(); ++i) s[i] = (*this)(i, j);
  return s;
}

double LayerSource::eval(int i, double x) const {
  const double r = std::sqrt(eps);
  double v = 0.0;
  if (!left.values.empty()) v += left[i] * std::exp(-x / r);
  if (!right.values.empty()) v += right[i] * std::exp(-(1.0 - x) / r);
  return v;
}

TimeGrid wave_time_grid(const SpaceGrid& g, double T) {
  double n = T / g.h();
  int steps = static_cast<int>(std::lround(n));
  if (std::abs(n - steps) > 1e-9) throw std::invalid_argument("T is not a multiple of h");
  return TimeGrid{T, steps};
}

namespace {

void check_problem(const WaveProblem& p) {
  const double h = p.grid.h();
  if (std::abs(p.tgrid.dt() - h) > 1e-12 * h)
    throw std::invalid_argument("wave solver needs Courant number one (dt = h)");
  const size_t nn = p.grid.nodes();
  if (p.position.size() != nn || p.velocity.size() != nn)
    throw std::invalid_argument("wave data have the wrong length");
  for (const Signal* s : {&p.left, &p.right})
    if (!s->values.empty() && !(s->grid == p.tgrid))
      throw std::invalid_argument("boundary signal on the wrong time grid");
  if (p.source && (!(p.source->grid == p.grid) || !(p.source->tgrid == p.tgrid)))
    throw std::invalid_argument("source on the wrong grid");
}

}  // namespace

WaveField solve_wave(const WaveProblem& p, Direction dir) {
  check_problem(p);
  const int J = p.grid.n_elem;
  const int N = p.tgrid.n_steps;
  const double dt = p.tgrid.dt();
  const double dt2 = dt * dt;
  const bool back = dir == Direction::backward;
  // Physical level index of the k-th marching step.
  auto lvl = [&](int k) { return back ? N - k : k; };
  auto bc = [&](const Signal& s, int k) { return s.values.empty() ? 0.0 : s[lvl(k)]; };
  auto src = [&](int k, int j) {
    double f = 0.0;
    if (p.source) f += (*p.source)(lvl(k), j);
    if (p.layer_source) f += p.layer_source->eval(lvl(k), p.grid.x(j));
    return f;
  };

  const double scale = 1.0 + std::abs(p.position.front()) + std::abs(p.position.back());
  if (std::abs(p.position.front() - bc(p.left, 0)) > p.compat_tol * scale ||
      std::abs(p.position.back() - bc(p.right, 0)) > p.compat_tol * scale)
    throw std::invalid_argument("wave data incompatible with the boundary signals");

  WaveField out(p.grid, p.tgrid);
  const double vsign = back ? -1.0 : 1.0;
  {
    auto u0 = out.level(lvl(0));
    for (int j = 0; j <= J; ++j) u0[j] = p.position[j];
    u0[0] = bc(p.left, 0);
    u0[J] = bc(p.right, 0);
  }
  if (N >= 1) {
    auto u0 = out.level(lvl(0));
    auto u1 = out.level(lvl(1));
    for (int j = 1; j < J; ++j)
      u1[j] = 0.5 * (u0[j + 1] + u0[j - 1]) + dt * vsign * p.velocity[j] + 0.5 * dt2 * src(0, j);
    u1[0] = bc(p.left, 1);
    u1[J] = bc(p.right, 1);
  }
  for (int k = 1; k < N; ++k) {
    auto um = out.level(lvl(k - 1));
    auto uc = out.level(lvl(k));
    auto up = out.level(lvl(k + 1));
    for (int j = 1; j < J; ++j) up[j] = uc[j + 1] + uc[j - 1] - um[j] + dt2 * src(k, j);
    up[0] = bc(p.left, k + 1);
    up[J] = bc(p.right, k + 1);
  }
  return out;
}

Signal trace_normal_derivative(const WaveField& u, End end) {
  const int J = u.grid.n_elem;
  if (J < 2) throw std::invalid_argument("trace needs at least two elements");
  const double h = u.grid.h();
  Signal s(u.tgrid);
  for (int i = 0; i < u.tgrid.size(); ++i) {
    if (end == End::right)
      s[i] = (3 * u(i, J) - 4 * u(i, J - 1) + u(i, J - 2)) / (2 * h);
    else
      s[i] = (-3 * u(i, 0) + 4 * u(i, 1) - u(i, 2)) / (2 * h);
  }
  return s;
}

Signal trace_time_derivative(const WaveField& u, End end, int k) {
  return signal_time_derivative(u.column(end == End::left ? 0 : u.grid.n_elem), k);
}

namespace {

// Second order accurate fourth derivative of a uniformly sampled series.
void d4_series(const double* f, int stride, int n, double dt, double* out, int ostride) {
  const double s = 1.0 / (dt * dt * dt * dt);
  auto F = [&](int i) { return f[static_cast<size_t>(i) * stride]; };
  auto O = [&](int i) -> double& { return out[static_cast<size_t>(i) * ostride]; };
  for (int i = 2; i <= n - 3; ++i)
    O(i) = (F(i + 2) - 4 * F(i + 1) + 6 * F(i) - 4 * F(i - 1) + F(i - 2)) * s;
  O(0) = (3 * F(0) - 14 * F(1) + 26 * F(2) - 24 * F(3) + 11 * F(4) - 2 * F(5)) * s;
  O(1) = (2 * F(0) - 9 * F(1) + 16 * F(2) - 14 * F(3) + 6 * F(4) - F(5)) * s;
  const int m = n - 1;
  O(m) = (3 * F(m) - 14 * F(m - 1) + 26 * F(m - 2) - 24 * F(m - 3) + 11 * F(m - 4) - 2 * F(m - 5)) * s;
  O(m - 1) = (2 * F(m) - 9 * F(m - 1) + 16 * F(m - 2) - 14 * F(m - 3) + 6 * F(m - 4) - F(m - 5)) * s;
}

}  // namespace

WaveField fourth_x_derivative(const WaveField& u, double* sensitivity) {
  const int n = u.tgrid.size();
  if (n < 12) throw std::invalid_argument("fourth derivative needs at least 11 steps");
  const int nodes = u.grid.nodes();
  const double dt = u.tgrid.dt();
  WaveField d(u.grid, u.tgrid);
  for (int j = 0; j < nodes; ++j) d4_series(u.u.data() + j, nodes, n, dt, d.u.data() + j, nodes);

  if (sensitivity) {
    // Same stencil on every other level, compared on the interior levels both estimates cover.
    double num = 0.0, den = 0.0;
    const double s2 = 1.0 / std::pow(2 * dt, 4);
    for (int i = 4; i <= n - 5; i += 2)
      for (int j = 0; j < nodes; ++j) {
        double c = (u(i + 4, j) - 4 * u(i + 2, j) + 6 * u(i, j) - 4 * u(i - 2, j) + u(i - 4, j)) * s2;
        double a = d(i, j);
        num += (a - c) * (a - c);
        den += a * a;
      }
    *sensitivity = den > 0 ? std::sqrt(num / den) : 0.0;
  }
  return d;
}

std::vector<double> wave_energy(const WaveField& u) {
  const int J = u.grid.n_elem;
  const int N = u.tgrid.n_steps;
  const double h = u.grid.h(), dt = u.tgrid.dt();
  std::vector<double> e(N);
  for (int i = 0; i < N; ++i) {
    auto a = u.level(i);
    auto b = u.level(i + 1);
    double s = 0.0;
    for (int j = 0; j <= J; ++j) {
      double ut = (b[j] - a[j]) / dt;
      s += ut * ut;
    }
    for (int j = 0; j < J; ++j) s += (b[j + 1] - b[j]) / h * (a[j + 1] - a[j]) / h;
    e[i] = 0.5 * h * s;
  }
  return e;
}

}  // namespace singctrl
