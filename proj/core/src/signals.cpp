#include "singctrl/signals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace singctrl {

TimeGrid time_grid_for_step(double T, double dt) {
  if (!(T > 0) || !(dt > 0)) throw std::invalid_argument("time grid needs T > 0 and dt > 0");
  int n = static_cast<int>(std::ceil(T / dt - 1e-9));
  return TimeGrid{T, std::max(n, 1)};
}

Signal::Signal(const TimeGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (static_cast<int>(values.size()) != g.size())
    throw std::invalid_argument("signal length does not match its grid");
}

static void check_same(const Signal& a, const Signal& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("signals live on different grids");
}

Signal operator+(const Signal& a, const Signal& b) {
  check_same(a, b);
  Signal r = a;
  for (int i = 0; i < r.size(); ++i) r[i] += b[i];
  return r;
}

Signal operator-(const Signal& a, const Signal& b) {
  check_same(a, b);
  Signal r = a;
  for (int i = 0; i < r.size(); ++i) r[i] -= b[i];
  return r;
}

Signal operator*(double s, const Signal& a) {
  Signal r = a;
  for (double& x : r.values) x *= s;
  return r;
}

double eval_weight(const WeightFn& w, double t) {
  if (t < 0.0 || t > w.T) throw std::domain_error("weight evaluated outside [0,T]");
  double f = (1.0 - std::exp(-w.a * t)) * (1.0 - std::exp(-w.a * (w.T - t)));
  return std::pow(f, w.p);
}

double weight_derivative(const WeightFn& w, double t, int k) {
  if (k == 0) return eval_weight(w, t);
  if (t < 0.0 || t > w.T) throw std::domain_error("weight evaluated outside [0,T]");
  if (k != 1 && k != 2) throw std::invalid_argument("weight derivative order must be 0, 1 or 2");
  const double ea = std::exp(-w.a * t), eb = std::exp(-w.a * (w.T - t));
  const double A = 1.0 - ea, B = 1.0 - eb;
  const double A1 = w.a * ea, B1 = -w.a * eb;
  const double A2 = -w.a * w.a * ea, B2 = -w.a * w.a * eb;
  const double f = A * B, f1 = A1 * B + A * B1, f2 = A2 * B + 2 * A1 * B1 + A * B2;
  if (k == 1) return w.p * std::pow(f, w.p - 1) * f1;
  return w.p * (w.p - 1) * std::pow(f, w.p - 2) * f1 * f1 + w.p * std::pow(f, w.p - 1) * f2;
}

Signal sample_weight(const WeightFn& w, const TimeGrid& g) {
  if (std::abs(g.T - w.T) > 1e-12) throw std::invalid_argument("weight and grid disagree on T");
  Signal s(g);
  for (int i = 0; i < g.size(); ++i) s[i] = eval_weight(w, g.t(i));
  return s;
}

std::vector<double> trapezoid_weights(const TimeGrid& g) {
  std::vector<double> q(g.size(), g.dt());
  q.front() *= 0.5;
  q.back() *= 0.5;
  return q;
}

double trapezoid(const Signal& v) {
  auto q = trapezoid_weights(v.grid);
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) s += q[i] * v[i];
  return s;
}

double l2_inner(const Signal& a, const Signal& b) {
  check_same(a, b);
  auto q = trapezoid_weights(a.grid);
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += q[i] * a[i] * b[i];
  return s;
}

double l2_norm(const Signal& v) { return std::sqrt(l2_inner(v, v)); }

double weighted_l2_norm(const Signal& v, const WeightFn& w, WeightMode mode) {
  if (std::abs(v.grid.T - w.T) > 1e-12) throw std::invalid_argument("weight and signal disagree on T");
  auto q = trapezoid_weights(v.grid);
  double s = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    double e = eval_weight(w, v.grid.t(i));
    double x = v[i] * v[i];
    if (mode == WeightMode::times_eta) {
      s += q[i] * e * x;
    } else if (e < kWeightFloor) {
      if (std::abs(v[i]) >= 1e-12)
        throw std::domain_error("signal does not vanish where the weight does (t = " +
                                std::to_string(v.grid.t(i)) + ")");
    } else {
      s += q[i] * x / e;
    }
  }
  return s;
}

Signal signal_time_derivative(const Signal& v, int k) {
  const int n = v.size();
  if (n < 5) throw std::invalid_argument("time derivative needs at least 4 steps");
  const double dt = v.grid.dt();
  Signal d(v.grid);
  if (k == 1) {
    for (int i = 1; i < n - 1; ++i) d[i] = (v[i + 1] - v[i - 1]) / (2 * dt);
    d[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * dt);
    d[n - 1] = (3 * v[n - 1] - 4 * v[n - 2] + v[n - 3]) / (2 * dt);
  } else if (k == 2) {
    const double dt2 = dt * dt;
    for (int i = 1; i < n - 1; ++i) d[i] = (v[i + 1] - 2 * v[i] + v[i - 1]) / dt2;
    d[0] = (2 * v[0] - 5 * v[1] + 4 * v[2] - v[3]) / dt2;
    d[n - 1] = (2 * v[n - 1] - 5 * v[n - 2] + 4 * v[n - 3] - v[n - 4]) / dt2;
  } else {
    throw std::invalid_argument("derivative order must be 1 or 2");
  }
  return d;
}

double interpolate_cubic(std::span<const double> f, double h, double x) {
  const int n = static_cast<int>(f.size());
  if (n < 4) throw std::invalid_argument("cubic interpolation needs four samples");
  double s = x / h;
  int i = static_cast<int>(std::floor(s));
  i = std::clamp(i - 1, 0, n - 4);
  double u = s - i;
  // Lagrange basis on the nodes i, i+1, i+2, i+3 at local coordinate u.
  double l0 = -(u - 1) * (u - 2) * (u - 3) / 6.0;
  double l1 = u * (u - 2) * (u - 3) / 2.0;
  double l2 = -u * (u - 1) * (u - 3) / 2.0;
  double l3 = u * (u - 1) * (u - 2) / 6.0;
  return l0 * f[i] + l1 * f[i + 1] + l2 * f[i + 2] + l3 * f[i + 3];
}

Signal resample_cubic(const Signal& v, const TimeGrid& target) {
  if (std::abs(v.grid.T - target.T) > 1e-12) throw std::invalid_argument("resampling across different T");
  if (v.grid == target) return v;
  Signal r(target);
  for (int i = 0; i < target.size(); ++i)
    r[i] = interpolate_cubic(v.values, v.grid.dt(), target.t(i));
  return r;
}

std::vector<double> fd_weights(double z, std::span<const double> x, int m) {
  const int n = static_cast<int>(x.size());
  if (n < m + 1) throw std::invalid_argument("too few nodes for the derivative order");
  std::vector<double> c(static_cast<size_t>(m + 1) * n, 0.0);
  auto C = [&](int k, int i) -> double& { return c[static_cast<size_t>(k) * n + i]; };
  double c1 = 1.0, c4 = x[0] - z;
  C(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = x[i] - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) C(k, i) = c1 * (k * C(k - 1, i - 1) - c5 * C(k, i - 1)) / c2;
        C(0, i) = -c1 * c5 * C(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) C(k, j) = (c4 * C(k, j) - k * C(k - 1, j)) / c3;
      C(0, j) = c4 * C(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

double fit_rate(std::span<const std::pair<double, double>> pts) {
  if (pts.size() < 3) throw std::invalid_argument("rate fit needs at least three points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [e, err] : pts) {
    if (!(e > 0) || !(err > 0)) throw std::invalid_argument("rate fit needs positive inputs");
    double x = std::log(e), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double n = static_cast<double>(pts.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace singctrl
