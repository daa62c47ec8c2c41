#include "singctrl/cascade.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace singctrl {

namespace {

constexpr double kNoCompat = std::numeric_limits<double>::infinity();

// Chebyshev interpolant on [0, 1] through Lobatto nodes.
struct Chebyshev {
  std::vector<double> c;

  Chebyshev(const Profile& f, int points) {
    const int n = points - 1;
    std::vector<double> fv(n + 1);
    for (int k = 0; k <= n; ++k) fv[k] = f(0.5 * (1.0 + std::cos(M_PI * k / n)));
    c.assign(n + 1, 0.0);
    for (int m = 0; m <= n; ++m) {
      double s = 0.0;
      for (int k = 0; k <= n; ++k) {
        double w = (k == 0 || k == n) ? 0.5 : 1.0;
        s += w * fv[k] * std::cos(M_PI * m * k / n);
      }
      c[m] = 2.0 * s / n;
    }
    c[0] *= 0.5;
    c[n] *= 0.5;
  }

  // p-th derivative of T_m at s = 1.
  static double tder(int m, int p) {
    double v = 1.0;
    for (int j = 0; j < p; ++j) v *= (double(m) * m - double(j) * j) / (2.0 * j + 1.0);
    return v;
  }

  double end_derivative(int p, bool right) const {
    double s = 0.0;
    for (size_t m = 0; m < c.size(); ++m) {
      double t = tder(int(m), p);
      if (!right && ((m + p) % 2 == 1)) t = -t;
      s += c[m] * t;
    }
    return s * std::pow(2.0, p);
  }

  double bound(int p) const {
    double s = 0.0;
    for (size_t m = 0; m < c.size(); ++m) s += std::abs(c[m]) * tder(int(m), p);
    return s * std::pow(2.0, p);
  }

  static double clenshaw(const std::vector<double>& a, double x) {
    const double s = 2.0 * x - 1.0;
    double b1 = 0.0, b2 = 0.0;
    for (size_t m = a.size(); m-- > 1;) {
      double b0 = 2.0 * s * b1 - b2 + a[m];
      b2 = b1;
      b1 = b0;
    }
    return s * b1 - b2 + a[0];
  }

  double value(double x) const { return clenshaw(c, x); }

  static std::vector<double> differentiated(const std::vector<double>& a) {
    const int n = static_cast<int>(a.size()) - 1;
    std::vector<double> d(std::max(n, 1), 0.0);
    for (int m = n; m >= 1; --m) d[m - 1] = (m + 1 < n ? d[m + 1] : 0.0) + 4.0 * m * a[m];
    d[0] *= 0.5;
    return d;
  }

  // p-th derivative on [0, 1].
  double derivative(double x, int p) const {
    std::vector<double> a = c;
    for (int k = 0; k < p; ++k) a = differentiated(a);
    return clenshaw(a, x);
  }

  double slope(double x) const { return derivative(x, 1); }
};

const std::vector<double>& one_sided_slope_weights() {
  static const std::vector<double> w = [] {
    std::vector<double> x{0, 1, 2, 3, 4, 5};
    auto all = fd_weights(0.0, x, 1);
    return std::vector<double>(all.begin() + 6, all.end());
  }();
  return w;
}

// Fifth-order one-sided x derivative at an end.
Signal edge_slope(const WaveField& u, End end) {
  const auto& w = one_sided_slope_weights();
  const int J = u.grid.n_elem;
  const double h = u.grid.h();
  Signal s(u.tgrid);
  for (int i = 0; i < u.tgrid.size(); ++i) {
    double d = 0.0;
    for (int k = 0; k < 6; ++k) d += w[k] * (end == End::left ? u(i, k) : -u(i, J - k));
    s[i] = d / h;
  }
  return s;
}

Signal backward_slope(const WaveField& u) {
  const int J = u.grid.n_elem;
  const double h = u.grid.h();
  Signal s(u.tgrid);
  for (int i = 0; i < u.tgrid.size(); ++i) s[i] = (u(i, J) - u(i, J - 1)) / h;
  return s;
}

// Derivatives 0..3 at t = 0 from a least-squares fit over the first samples: a degree-6 polynomial
// plus an alternating part, which absorbs the sublattice mismatch of the wave scheme.
std::array<double, 4> fitted_start_derivatives(const Signal& s) {
  constexpr int n = 32, deg = 6, alt = 3, cols = deg + 1 + alt;
  if (s.size() < n) throw std::invalid_argument("cascade needs at least 32 time steps");
  std::vector<double> A(static_cast<size_t>(n) * cols), b(n);
  for (int i = 0; i < n; ++i) {
    const double x = double(i) / (n - 1), sg = (i % 2 == 0) ? 1.0 : -1.0;
    double p = 1.0;
    for (int k = 0; k <= deg; ++k, p *= x) A[static_cast<size_t>(k) * n + i] = p;
    p = 1.0;
    for (int k = 0; k < alt; ++k, p *= x) A[static_cast<size_t>(deg + 1 + k) * n + i] = sg * p;
    b[i] = s[i];
  }
  lapack_int info = LAPACKE_dgels(LAPACK_COL_MAJOR, 'N', n, cols, 1, A.data(), n, b.data(), n);
  if (info != 0) throw std::runtime_error("least-squares fit failed");
  const double W = (n - 1) * s.grid.dt();
  std::array<double, 4> d{};
  double fact = 1.0;
  for (int k = 0; k <= 3; ++k) {
    if (k > 0) fact *= k;
    d[k] = fact * b[k] / std::pow(W, k);
  }
  return d;
}

// Fourth-order time filter that removes the alternating component; the end levels are kept
// and their neighbours use the three-point average.
WaveField time_filtered(const WaveField& u) {
  const int N = u.tgrid.n_steps, nodes = u.grid.nodes();
  WaveField f = u;
  for (int i = 1; i < N; ++i)
    for (int j = 0; j < nodes; ++j) {
      if (i >= 2 && i <= N - 2)
        f.at(i, j) = (-u(i - 2, j) + 4 * u(i - 1, j) + 10 * u(i, j) + 4 * u(i + 1, j) - u(i + 2, j)) / 16;
      else
        f.at(i, j) = 0.25 * (u(i - 1, j) + 2 * u(i, j) + u(i + 1, j));
    }
  return f;
}

Signal column_signal(const WaveField& f, int j) { return f.column(j); }

Signal times_weight(const Signal& s, const WeightFn& w) {
  auto eta = sample_weight(w, s.grid);
  Signal r(s.grid);
  for (int i = 0; i < s.size(); ++i) r[i] = eta[i] * s[i];
  return r;
}

WaveField difference(const WaveField& a, const WaveField& b) {
  WaveField r = a;
  for (size_t k = 0; k < r.u.size(); ++k) r.u[k] -= b.u[k];
  return r;
}

// Third time derivative per node on seven-point windows, one-sided near the ends.
WaveField third_time_derivative(const WaveField& u) {
  const int n = u.tgrid.size(), nodes = u.grid.nodes();
  if (n < 7) throw std::invalid_argument("third derivative needs at least six steps");
  const double s = 1.0 / std::pow(u.tgrid.dt(), 3);
  WaveField d(u.grid, u.tgrid);
  const double xs[7] = {0, 1, 2, 3, 4, 5, 6};
  for (int i = 0; i < n; ++i) {
    int b = std::clamp(i - 3, 0, n - 7);
    auto w = fd_weights(double(i - b), std::span<const double>(xs, 7), 3);
    for (int j = 0; j < nodes; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 7; ++k) acc += w[3 * 7 + k] * u(b + k, j);
      d.at(i, j) = acc * s;
    }
  }
  return d;
}

// w = -((t - T)/2) u_ttt solves the wave equation with source -u_tttt = -u_xxxx when u does
// and vanishes at T, so the fourth-derivative source is carried by w instead of differenced.
WaveField fourth_source_particular(const WaveField& u) {
  WaveField w = third_time_derivative(time_filtered(u));
  const double T = w.tgrid.T;
  for (int i = 0; i < w.tgrid.size(); ++i)
    for (int j = 0; j < w.grid.nodes(); ++j) w.at(i, j) *= -0.5 * (w.tgrid.t(i) - T);
  return w;
}

// Particular solution with boundary data (a, b), optional source, and initial data lifted
// so that the corners are compatible to second order.
WaveField solve_particular(const SpaceGrid& g, const TimeGrid& tg, const Signal& a, const Signal& b,
                           const std::shared_ptr<const WaveField>& src, CornerLift& l0,
                           CornerLift& l1) {
  auto da = fitted_start_derivatives(a), db = fitted_start_derivatives(b);
  double f0 = 0, f1 = 0, ft0 = 0, ft1 = 0;
  if (src) {
    auto c0 = fitted_start_derivatives(column_signal(*src, 0));
    auto c1 = fitted_start_derivatives(column_signal(*src, g.n_elem));
    f0 = c0[0];
    f1 = c1[0];
    ft0 = c0[1];
    ft1 = c1[1];
  }
  l0.c = {a[0], b[0], da[2] - f0, db[2] - f1};
  l1.c = {da[1], db[1], da[3] - ft0, db[3] - ft1};
  WaveProblem p;
  p.grid = g;
  p.tgrid = tg;
  p.position = sample_nodes(g, [&](double x) { return l0.value(x); });
  p.velocity = sample_nodes(g, [&](double x) { return l1.value(x); });
  p.left = a;
  p.right = b;
  p.source = src;
  p.compat_tol = kNoCompat;
  return solve_wave(p);
}

// Backward solve from rest at T, then the data (g0, g1) that make the homogeneous forward
// scheme reproduce the difference between the initial data (d0, d1) and its first two levels.
void backward_data(const SpaceGrid& g, const TimeGrid& tg, const Signal& left, const Signal& right,
                   const std::vector<double>& d0, const std::vector<double>& d1,
                   std::vector<double>& g0, std::vector<double>& g1) {
  WaveProblem p;
  p.grid = g;
  p.tgrid = tg;
  p.position.assign(g.nodes(), 0.0);
  p.velocity.assign(g.nodes(), 0.0);
  p.left = left;
  p.right = right;
  p.compat_tol = kNoCompat;
  WaveField yh = solve_wave(p, Direction::backward);
  const int J = g.n_elem;
  const double h = g.h();
  g0.assign(J + 1, 0.0);
  g1.assign(J + 1, 0.0);
  for (int j = 1; j < J; ++j) {
    double avg = 0.5 * (yh(0, j - 1) + yh(0, j + 1));
    g0[j] = d0[j] - yh(0, j);
    g1[j] = d1[j] - (yh(1, j) - avg) / h;
  }
}

WaveHumProblem hum_problem(const CascadeInput& in, std::vector<double> y0, std::vector<double> y1) {
  WaveHumProblem p;
  p.grid = in.grid;
  p.T = in.weight.T;
  p.weight = in.weight;
  p.y0 = std::move(y0);
  p.y1 = std::move(y1);
  p.tol = in.tol;
  p.state_tol = in.state_tol;
  p.max_iter = in.max_iter;
  return p;
}

WaveField solve_limit(const SpaceGrid& g, const TimeGrid& tg, std::vector<double> y0,
                      std::vector<double> y1, const Signal& left, const Signal& right,
                      const std::shared_ptr<const WaveField>& src) {
  WaveProblem p;
  p.grid = g;
  p.tgrid = tg;
  p.position = std::move(y0);
  p.velocity = std::move(y1);
  p.left = left;
  p.right = right;
  p.source = src;
  p.compat_tol = kNoCompat;
  return solve_wave(p);
}

// Traces handed to the next level come from the filtered field.
void set_state_traces(CascadeLevel& L) {
  WaveField sm = time_filtered(L.y);
  L.y_x0 = edge_slope(sm, End::left);
  L.y_x1 = edge_slope(sm, End::right);
}

// Extra particular fields of a level: w_phi is added to phi_a and w_y to y. The
// remainder y - w_y starts from (d0, d1).
struct LevelExtras {
  const WaveField* w_phi = nullptr;
  const WaveField* w_y = nullptr;
  std::vector<double> d0, d1;
};

// One level j >= 1: boundary data of phi_a and of the backward system are supplied.
CascadeLevel corrector_level(const CascadeInput& in, const TimeGrid& tg, const Signal& phi_left,
                             const Signal& phi_right, const Signal& y_left, const Signal& y_right_base,
                             const LevelExtras& ex = {}) {
  CascadeLevel L;
  const SpaceGrid& g = in.grid;
  const int J = g.n_elem;
  L.phi_a = solve_particular(g, tg, phi_left, phi_right, nullptr, L.lift0, L.lift1);
  if (ex.w_phi)
    for (size_t k = 0; k < L.phi_a.u.size(); ++k) L.phi_a.u[k] += ex.w_phi->u[k];
  Signal eta_pa = times_weight(edge_slope(L.phi_a, End::right), in.weight);

  // Data and boundary values of the homogeneous remainder y - w_y.
  std::vector<double> d0(g.nodes(), 0.0), d1(g.nodes(), 0.0);
  Signal left = y_left, right = y_right_base;
  if (ex.w_y) {
    for (int j = 1; j < J; ++j) {
      d0[j] = ex.d0[j];
      d1[j] = ex.d1[j];
    }
    left = left - ex.w_y->column(0);
    right = right - ex.w_y->column(J);
  }

  backward_data(g, tg, left, right + eta_pa, d0, d1, L.g0, L.g1);
  auto hp = hum_problem(in, L.g0, L.g1);
  L.hum = solve_wave_control(hp);
  WaveField Phi = wave_hum_adjoint(hp, L.hum);

  L.phi = Phi;
  for (size_t k = 0; k < L.phi.u.size(); ++k) L.phi.u[k] += L.phi_a.u[k];
  L.phi_x1 = backward_slope(Phi) + edge_slope(L.phi_a, End::right);
  L.v = -1.0 * times_weight(L.phi_x1, in.weight);
  {
    WaveField sm = time_filtered(L.phi);
    L.phi_x0 = edge_slope(sm, End::left);
    L.phi_x1_smooth = edge_slope(sm, End::right);
  }

  L.y = solve_limit(g, tg, d0, d1, left, right - L.v, nullptr);
  if (ex.w_y)
    for (size_t k = 0; k < L.y.u.size(); ++k) L.y.u[k] += ex.w_y->u[k];
  set_state_traces(L);
  L.final_residual = wave_final_state_norm(L.y);
  return L;
}

}  // namespace

CascadeInput default_cascade_input(int n_elem) {
  CascadeInput in;
  in.grid = SpaceGrid{n_elem};
  in.position = [](double x) { return std::pow(std::sin(2 * M_PI * x), 4); };
  return in;
}

bool CompatibilityReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
}

EndpointDerivatives endpoint_derivatives(const Profile& f, int m, int points) {
  if (points < 8) throw std::invalid_argument("too few Chebyshev points");
  Chebyshev ch(f, points);
  EndpointDerivatives d;
  for (int k = 0; k <= m; ++k) {
    d.left.push_back(ch.end_derivative(k, false));
    d.right.push_back(ch.end_derivative(k, true));
    d.scale.push_back(ch.bound(k));
  }
  return d;
}

CompatibilityReport check_compatibility(const CascadeInput& in, int order) {
  CompatibilityReport r;
  if (order < 1 || !in.position) return r;
  auto d = endpoint_derivatives(in.position, 4);
  auto add = [&](int k, bool right) {
    CompatibilityCheck c;
    c.name = std::string("y0") + std::string(k, '\'') + (right ? "(1)" : "(0)");
    c.residual = std::abs(right ? d.right[k] : d.left[k]);
    c.threshold = 1e-8 * std::max(1.0, d.scale[k]);
    c.pass = c.residual <= c.threshold;
    r.checks.push_back(c);
  };
  // The higher-order initial data vanish, so every line reduces to a derivative of y0.
  for (int k : {1, 3}) {
    add(k, false);
    add(k, true);
  }
  if (order >= 2) {
    add(4, false);
    add(4, true);
  }
  return r;
}

namespace {

// 1 - (35 s^4 - 84 s^5 + 70 s^6 - 20 s^7) on [0, 1], zero beyond; value and derivative.
void cutoff(double s, double& k, double& dk) {
  if (s >= 1.0) {
    k = dk = 0.0;
    return;
  }
  const double s3 = s * s * s;
  k = 1.0 - s3 * s * (35 + s * (-84 + s * (70 - 20 * s)));
  dk = -s3 * (140 + s * (-420 + s * (420 - 140 * s)));
}

}  // namespace

double CornerLift::value(double x) const {
  double k0, d0, k1, d1;
  cutoff(x / width, k0, d0);
  cutoff((1 - x) / width, k1, d1);
  return (c[0] + 0.5 * c[2] * x * x) * k0 + (c[1] + 0.5 * c[3] * (1 - x) * (1 - x)) * k1;
}

double CornerLift::slope(double x) const {
  double k0, d0, k1, d1;
  cutoff(x / width, k0, d0);
  cutoff((1 - x) / width, k1, d1);
  const double p0 = c[0] + 0.5 * c[2] * x * x, p1 = c[1] + 0.5 * c[3] * (1 - x) * (1 - x);
  return c[2] * x * k0 + p0 * d0 / width - c[3] * (1 - x) * k1 - p1 * d1 / width;
}

CascadeLevel compute_v0(const CascadeInput& in) {
  if (!in.position) throw std::invalid_argument("cascade input has no initial position");
  const SpaceGrid& g = in.grid;
  auto y0 = sample_nodes(g, in.position);
  auto y1 = in.velocity ? sample_nodes(g, in.velocity) : std::vector<double>(g.nodes(), 0.0);
  for (auto* v : {&y0, &y1}) {
    double scale = 1.0;
    for (double x : *v) scale = std::max(scale, std::abs(x));
    if (std::abs(v->front()) > 1e-12 * scale || std::abs(v->back()) > 1e-12 * scale)
      throw std::invalid_argument("initial data must vanish at both ends");
    v->front() = v->back() = 0.0;
  }
  CascadeLevel L;
  L.g0 = y0;
  L.g1 = y1;
  auto hp = hum_problem(in, y0, y1);
  L.hum = solve_wave_control(hp);
  L.phi = wave_hum_adjoint(hp, L.hum);
  const TimeGrid& tg = L.phi.tgrid;
  L.phi_x1 = backward_slope(L.phi);
  L.v = -1.0 * times_weight(L.phi_x1, in.weight);
  {
    WaveField sm = time_filtered(L.phi);
    L.phi_x0 = edge_slope(sm, End::left);
    L.phi_x1_smooth = edge_slope(sm, End::right);
  }
  L.y = solve_limit(g, tg, y0, y1, Signal(tg), -1.0 * L.v, nullptr);
  set_state_traces(L);
  L.final_residual = wave_final_state_norm(L.y);
  return L;
}

CascadeLevel compute_v1(const CascadeInput& in, const CascadeResult& prev) {
  if (prev.levels.empty()) throw std::invalid_argument("level 0 missing");
  const auto& L0 = prev.levels[0];
  const TimeGrid& tg = L0.y.tgrid;
  return corrector_level(in, tg, -1.0 * L0.phi_x0, L0.phi_x1_smooth, -1.0 * L0.y_x0, L0.y_x1);
}

CascadeLevel compute_v2(const CascadeInput& in, const CascadeResult& prev) {
  if (prev.levels.size() < 2) throw std::invalid_argument("levels 0 and 1 missing");
  const auto& L0 = prev.levels[0];
  const auto& L1 = prev.levels[1];
  const TimeGrid& tg = L0.y.tgrid;
  WaveField w_phi = fourth_source_particular(L0.phi);
  WaveField w_y = fourth_source_particular(L0.y);
  // phi^0 vanishes on both ends and y^0 on the left, so w does too.
  const int J = in.grid.n_elem;
  const double T = tg.T;
  for (int i = 0; i < tg.size(); ++i) {
    w_phi.at(i, 0) = w_phi.at(i, J) = 0.0;
    w_y.at(i, 0) = 0.0;
  }
  // At t = 0, y_ttt = y1'' and y_tttt = y0'''', so the remainder starts from
  // -(T/2) y1'' and (1/2) y1'' - (T/2) y0''''.
  LevelExtras ex{&w_phi, &w_y, std::vector<double>(J + 1, 0.0), std::vector<double>(J + 1, 0.0)};
  Chebyshev p0(in.position, 64);
  std::optional<Chebyshev> p1;
  if (in.velocity) p1.emplace(in.velocity, 64);
  for (int j = 1; j < J; ++j) {
    const double x = in.grid.x(j);
    const double v2 = p1 ? p1->derivative(x, 2) : 0.0;
    ex.d0[j] = -0.5 * T * v2;
    ex.d1[j] = 0.5 * v2 - 0.5 * T * p0.derivative(x, 4);
  }
  return corrector_level(in, tg, -1.0 * L1.phi_x0, L1.phi_x1_smooth, -1.0 * L1.y_x0,
                         L1.y_x1 + 0.5 * prev.y0_tt1, ex);
}

bool CascadeResult::certified(int j) const {
  return j >= 0 && j < static_cast<int>(levels.size()) && levels[j].final_residual <= kLevelTolerance[j];
}

CascadeResult run_cascade(const CascadeInput& in) {
  if (in.order < 0 || in.order > 2) throw std::invalid_argument("cascade order must be 0, 1 or 2");
  CascadeResult r;
  r.grid = in.grid;
  r.weight = in.weight;
  r.compatibility = check_compatibility(in, in.order);
  // Flagged incompatible data proceed at level 2 with the certificate recorded.
  auto check = [&](const CascadeLevel& L, int j) {
    if (j == 2 && !r.compatibility.pass()) return;
    if (!(L.final_residual <= kLevelTolerance[j]))
      throw std::runtime_error("cascade level " + std::to_string(j) + " final state " +
                               std::to_string(L.final_residual) + " exceeds tolerance");
  };
  r.levels.push_back(compute_v0(in));
  check(r.levels[0], 0);
  r.tgrid = r.levels[0].y.tgrid;
  {
    // y^0(1, .) = eta phi^0_x(1, .); the weight is differentiated exactly.
    const Signal& f = r.levels[0].phi_x1_smooth;
    Signal f1 = signal_time_derivative(f, 1), f2 = signal_time_derivative(f, 2);
    r.y0_tt1 = Signal(r.tgrid);
    for (int i = 0; i < r.tgrid.size(); ++i) {
      const double t = r.tgrid.t(i);
      r.y0_tt1[i] = (weight_derivative(in.weight, t, 2) * f[i] + 2 * weight_derivative(in.weight, t, 1) * f1[i] +
                      weight_derivative(in.weight, t, 0) * f2[i]);
    }
  }
  if (in.order >= 1) {
    r.levels.push_back(compute_v1(in, r));
    check(r.levels[1], 1);
  }
  if (in.order >= 2) {
    fourth_x_derivative(time_filtered(r.levels[0].y), &r.fourth_sensitivity);
    r.levels.push_back(compute_v2(in, r));
    check(r.levels[2], 2);
  }
  return r;
}

// ---------------------------------------------------------------------------------------
// Composite fields.

double BoundaryLayerProfile::eval(int i, double x) const {
  const double r = std::sqrt(eps);
  const double w = (side == End::left ? x : 1.0 - x) / r;
  double f = std::exp(-w);
  if (factor == LayerFactor::w_exp) f *= w;
  return amplitude[i] * f;
}

double BoundaryLayerProfile::dx(int i, double x) const {
  const double r = std::sqrt(eps);
  const double w = (side == End::left ? x : 1.0 - x) / r;
  const double sgn = side == End::left ? 1.0 : -1.0;
  double dfdw = factor == LayerFactor::exp ? -std::exp(-w) : (1.0 - w) * std::exp(-w);
  return amplitude[i] * dfdw * sgn / r;
}

namespace {

// Fourth-order first time derivative (seven-point stencils, shifted near the ends).
Signal rate(const Signal& s) {
  const int n = s.size();
  if (n < 7) return signal_time_derivative(s, 1);
  const double dt = s.grid.dt();
  Signal d(s.grid);
  std::vector<double> x(7);
  for (int i = 0; i < n; ++i) {
    int lo = std::clamp(i - 3, 0, n - 7);
    for (int k = 0; k < 7; ++k) x[k] = lo + k;
    auto w = fd_weights(double(i), x, 1);
    double v = 0.0;
    for (int k = 0; k < 7; ++k) v += w[7 + k] * s[lo + k];
    d[i] = v / dt;
  }
  return d;
}

}  // namespace

CompositeApproximation::CompositeApproximation(const CascadeResult& c, double eps, int n,
                                               bool second_order_layer)
    : c_(&c), eps_(eps), n_(n) {
  if (n < 0 || n > c.order()) throw std::invalid_argument("composite order exceeds the cascade");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  const int J = c.grid.n_elem;
  for (int j = 0; j <= n; ++j) {
    const double s = std::pow(eps, 0.5 * j);
    fields_.push_back(time_filtered(c.levels[j].y));
    const auto& y = fields_.back();
    layers_.push_back({-s * y.column(0), End::left, LayerFactor::exp, eps});
    layers_.push_back({-s * y.column(J), End::right, LayerFactor::exp, eps});
  }
  if (second_order_layer && n >= 2)
    layers_.push_back({-0.5 * eps * c.y0_tt1, End::right, LayerFactor::w_exp, eps});
  for (const auto& l : layers_) layer_rates_.push_back(rate(l.amplitude));
}

CompositeApproximation composite_approximation(const CascadeResult& c, double eps, int n,
                                               bool second_order_layer) {
  return CompositeApproximation(c, eps, n, second_order_layer);
}

CompositeSample CompositeApproximation::at(int level, double x) const {
  const int J = c_->grid.n_elem;
  const int nt = c_->tgrid.size();
  const double h = c_->grid.h(), dt = c_->tgrid.dt();
  // Six-point stencils in x and seven-point stencils in t.
  int jlo = std::clamp(static_cast<int>(std::floor(x / h)) - 2, 0, J - 5);
  double xs[6];
  for (int k = 0; k < 6; ++k) xs[k] = jlo + k;
  auto wx = fd_weights(x / h, std::span<const double>(xs, 6), 1);
  int tlo = std::clamp(level - 3, 0, nt - 7);
  double ts[7];
  for (int k = 0; k < 7; ++k) ts[k] = tlo + k;
  auto wt = fd_weights(double(level), std::span<const double>(ts, 7), 1);

  CompositeSample out;
  for (int j = 0; j <= n_; ++j) {
    const double s = std::pow(eps_, 0.5 * j);
    const auto& y = fields_[j];
    double v = 0, vx = 0, vt = 0;
    for (int k = 0; k < 6; ++k) {
      v += wx[k] * y(level, jlo + k);
      vx += wx[6 + k] * y(level, jlo + k);
      double col = 0.0;
      for (int q = 0; q < 7; ++q) col += wt[7 + q] * y(tlo + q, jlo + k);
      vt += wx[k] * col;
    }
    out.y += s * v;
    out.yx += s * vx / h;
    out.yt += s * vt / dt;
  }
  for (size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    out.y += l.eval(level, x);
    out.yx += l.dx(level, x);
    BoundaryLayerProfile rl{layer_rates_[k], l.side, l.factor, l.eps};
    out.yt += rl.eval(level, x);
  }
  return out;
}

Signal expansion_sum(const CascadeResult& c, double eps, int n) {
  if (n < 0 || n > c.order()) throw std::invalid_argument("expansion order exceeds the cascade");
  Signal s(c.tgrid);
  for (int j = 0; j <= n; ++j) s = s + std::pow(eps, 0.5 * j) * c.levels[j].v;
  return s;
}

double expansion_error(const Signal& v_eps, const CascadeResult& c, double eps, int n) {
  Signal sum = expansion_sum(c, eps, n);
  if (!(sum.grid == v_eps.grid)) sum = resample_cubic(sum, v_eps.grid);
  return l2_norm(v_eps - sum);
}

double composite_error(const CascadeResult& c, const CascadeInput& in, double eps, int n,
                       const CompositeErrorOptions& opt) {
  if (opt.substeps < 1) throw std::invalid_argument("substeps must be positive");
  SpaceGrid bg = opt.beam_grid ? *opt.beam_grid : default_beam_grid(eps);
  check_beam_resolution(eps, bg);
  TimeGrid btg{c.tgrid.T, c.tgrid.n_steps * opt.substeps};
  BeamMatrices mats = assemble_beam_matrices(bg);
  BeamStepper stepper(mats, eps, btg.dt());

  Chebyshev p0(in.position, 64);
  std::vector<double> y0 = hermite_interpolant(
      bg, [&](double x) { return p0.value(x); }, [&](double x) { return p0.slope(x); });
  std::vector<double> y1(y0.size(), 0.0);
  if (in.velocity) {
    Chebyshev p1(in.velocity, 64);
    y1 = hermite_interpolant(bg, [&](double x) { return p1.value(x); },
                             [&](double x) { return p1.slope(x); });
  }
  const int Jb = bg.n_elem;
  for (auto* v : {&y0, &y1})
    for (int d : {0, 1, value_dof(Jb), slope_dof(Jb)}) (*v)[d] = 0.0;

  Signal control = (1.0 / std::sqrt(eps)) * resample_cubic(expansion_sum(c, eps, n), btg);
  CompositeApproximation comp(c, eps, n);

  static const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                               0.8611363115940526};
  static const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                               0.3478548451374538};
  const double hb = bg.h();
  double worst = 0.0;
  auto observe = [&](int k, std::span<const double> y, std::span<const double> yd) {
    if (k % opt.substeps != 0) return;
    const int i = k / opt.substeps;
    double s = 0.0;
    for (int e = 0; e < Jb; ++e)
      for (int q = 0; q < 4; ++q) {
        double x = bg.x(e) + 0.5 * hb * (1.0 + gx[q]);
        auto cs = comp.at(i, x);
        double ex = hermite_eval(bg, y, x, 1) - cs.yx;
        double et = hermite_eval(bg, yd, x, 0) - cs.yt;
        s += 0.5 * hb * gw[q] * (ex * ex + et * et);
      }
    worst = std::max(worst, std::sqrt(s));
  };
  stepper.run(btg, y0, y1, &control, nullptr, observe);
  return worst;
}

// ---------------------------------------------------------------------------------------
// Adjoint expansion.

namespace {

// Sine series of nodal values that vanish at both ends.
struct SineSeries {
  std::vector<double> b;

  explicit SineSeries(std::span<const double> f) {
    const int J = static_cast<int>(f.size()) - 1;
    b.assign(J, 0.0);
    for (int k = 1; k < J; ++k) {
      double s = 0.0;
      for (int j = 1; j < J; ++j) s += f[j] * std::sin(M_PI * k * j / J);
      b[k] = 2.0 * s / J;
    }
  }

  void eval(double x, double& v, double& d) const {
    v = d = 0.0;
    // sin/cos of k pi x by rotation.
    const double c1 = std::cos(M_PI * x), s1 = std::sin(M_PI * x);
    double ck = 1.0, sk = 0.0;
    for (size_t k = 1; k < b.size(); ++k) {
      double cn = ck * c1 - sk * s1, sn = sk * c1 + ck * s1;
      ck = cn;
      sk = sn;
      v += b[k] * sk;
      d += b[k] * M_PI * k * ck;
    }
  }
};

struct AdjointData {
  SineSeries pos, vel;
  CornerLift l0, l1;
};

AdjointData level_data(const CascadeLevel& L) {
  WaveField Phi = L.phi_a.u.empty() ? L.phi : difference(L.phi, L.phi_a);
  const int nodes = Phi.grid.nodes();
  std::vector<double> p(nodes), v(nodes);
  for (int j = 1; j + 1 < nodes; ++j) {
    p[j] = Phi(0, j);
    v[j] = fitted_start_derivatives(Phi.column(j))[1];
  }
  p.front() = p.back() = v.front() = v.back() = 0.0;
  CornerLift l0 = L.lift0, l1 = L.lift1;
  if (L.phi_a.u.empty()) l0.c = l1.c = {0, 0, 0, 0};
  return {SineSeries(p), SineSeries(v), l0, l1};
}

// Corrected clamped data as (value, slope) functions on a Hermite mesh.
std::vector<double> corrected_data(const std::vector<AdjointData>& d, bool velocity, double eps,
                                   const SpaceGrid& bg, double& bc_residual) {
  const double r = std::sqrt(eps);
  auto raw = [&](double x, double& v, double& s) {
    v = s = 0.0;
    const double el = std::exp(-x / r), er = std::exp(-(1.0 - x) / r);
    for (size_t j = 0; j < d.size(); ++j) {
      const double sc = std::pow(eps, 0.5 * j);
      const SineSeries& ser = velocity ? d[j].vel : d[j].pos;
      const CornerLift& l = velocity ? d[j].l1 : d[j].l0;
      double fv, fd;
      ser.eval(x, fv, fd);
      fv += l.value(x);
      fd += l.slope(x);
      const double a = l.c[0], b = l.c[1];  // end values; the series vanishes there
      v += sc * (fv - a * el - b * er);
      s += sc * (fd + a * el / r - b * er / r);
    }
  };
  double v0, s0, v1, s1;
  raw(0.0, v0, s0);
  raw(1.0, v1, s1);
  // Slope residuals removed by layer-shaped terms, the exponentially small remainder by a cubic.
  auto layer = [&](double x, double& v, double& s) {
    const double el = std::exp(-x / r), er = std::exp(-(1.0 - x) / r);
    v = -s0 * x * el + s1 * (1.0 - x) * er;
    s = -s0 * (1.0 - x / r) * el + s1 * (-1.0 + (1.0 - x) / r) * er;
  };
  double lv0, ls0, lv1, ls1;
  layer(0.0, lv0, ls0);
  layer(1.0, lv1, ls1);
  const double e0 = v0 + lv0, e1 = v1 + lv1, d0 = s0 + ls0, d1 = s1 + ls1;
  auto cubic = [&](double x, double& v, double& s) {
    const double h00 = 2 * x * x * x - 3 * x * x + 1, h10 = x * x * x - 2 * x * x + x;
    const double h01 = -2 * x * x * x + 3 * x * x, h11 = x * x * x - x * x;
    const double g00 = 6 * x * x - 6 * x, g10 = 3 * x * x - 4 * x + 1;
    const double g01 = -6 * x * x + 6 * x, g11 = 3 * x * x - 2 * x;
    v = e0 * h00 + d0 * h10 + e1 * h01 + d1 * h11;
    s = e0 * g00 + d0 * g10 + e1 * g01 + d1 * g11;
  };
  auto full = [&](double x, double& v, double& s) {
    double a, b, c, e, f, g;
    raw(x, a, b);
    layer(x, c, e);
    cubic(x, f, g);
    v = a + c - f;
    s = b + e - g;
  };
  double fv0, fs0, fv1, fs1;
  full(0.0, fv0, fs0);
  full(1.0, fv1, fs1);
  double scale = 1.0 + std::abs(v0) + std::abs(v1) + std::abs(s0) + std::abs(s1);
  bc_residual = std::max({bc_residual, (std::abs(fv0) + std::abs(fs0) + std::abs(fv1) + std::abs(fs1)) / scale});
  std::vector<double> y(2 * bg.nodes());
  for (int j = 0; j < bg.nodes(); ++j) full(bg.x(j), y[value_dof(j)], y[slope_dof(j)]);
  const int J = bg.n_elem;
  for (int k : {0, 1, value_dof(J), slope_dof(J)}) y[k] = 0.0;
  return y;
}

}  // namespace

AdjointCheck adjoint_expansion_check(const CascadeResult& c, double eps, int n,
                                     std::optional<SpaceGrid> beam_grid) {
  if (n < 0 || n > c.order()) throw std::invalid_argument("check order exceeds the cascade");
  if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
  SpaceGrid bg = beam_grid ? *beam_grid : default_beam_grid(eps);
  check_beam_resolution(eps, bg);
  std::vector<AdjointData> data;
  for (int j = 0; j <= n; ++j) data.push_back(level_data(c.levels[j]));
  AdjointCheck out;
  auto psi0 = corrected_data(data, false, eps, bg, out.bc_residual);
  auto psi1 = corrected_data(data, true, eps, bg, out.bc_residual);
  if (out.bc_residual > 1e-10)
    throw std::runtime_error("corrected adjoint data violate the clamped conditions");

  BeamMatrices mats = assemble_beam_matrices(bg);
  BeamModes modes(mats, eps);
  Signal react = modes.reaction(c.tgrid, modes.project(psi0), modes.project(psi1));
  Signal lhs = (1.0 / std::sqrt(eps)) * times_weight(react, c.weight);
  out.residual = l2_norm(lhs - expansion_sum(c, eps, n));
  return out;
}

LayerScaling layer_source_scaling(std::span<const double> eps_list, const Signal& f) {
  LayerScaling out;
  for (double eps : eps_list) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    SpaceGrid g = default_beam_grid(eps);
    TimeGrid tg = default_beam_tgrid(g, f.grid.T);
    BeamMatrices mats = assemble_beam_matrices(g);
    BeamStepper stepper(mats, eps, tg.dt());
    LayerSource src;
    src.eps = eps;
    src.left = f.grid == tg ? f : resample_cubic(f, tg);
    std::vector<double> zero(mats.ndof(), 0.0);
    double sup = 0.0;
    auto obs = [&](int, std::span<const double> y, std::span<const double> yd) {
      sup = std::max(sup, beam_energy_at(y, yd, mats, eps));
    };
    stepper.run(tg, zero, zero, nullptr, &src, obs);
    out.points.emplace_back(eps, std::sqrt(sup));
  }
  bool any = std::any_of(out.points.begin(), out.points.end(), [](auto& p) { return p.second > 0; });
  out.exponent = any && out.points.size() >= 2 ? fit_rate(out.points)
                                                : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace singctrl
