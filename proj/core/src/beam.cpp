#include "singctrl/beam.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace singctrl {

void hermite_element(double h, double M[4][4], double K[4][4], double B[4][4]) {
  const double h2 = h * h;
  const double m[4][4] = {{156, 22 * h, 54, -13 * h},
                          {22 * h, 4 * h2, 13 * h, -3 * h2},
                          {54, 13 * h, 156, -22 * h},
                          {-13 * h, -3 * h2, -22 * h, 4 * h2}};
  const double k[4][4] = {{36, 3 * h, -36, 3 * h},
                          {3 * h, 4 * h2, -3 * h, -h2},
                          {-36, -3 * h, 36, -3 * h},
                          {3 * h, -h2, -3 * h, 4 * h2}};
  const double b[4][4] = {{12, 6 * h, -12, 6 * h},
                          {6 * h, 4 * h2, -6 * h, 2 * h2},
                          {-12, -6 * h, 12, -6 * h},
                          {6 * h, 2 * h2, -6 * h, 4 * h2}};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      M[i][j] = m[i][j] * h / 420.0;
      K[i][j] = k[i][j] / (30.0 * h);
      B[i][j] = b[i][j] / (h2 * h);
    }
}

BeamMatrices assemble_beam_matrices(const SpaceGrid& grid) {
  if (grid.n_elem < 2) throw std::invalid_argument("beam mesh needs at least two elements");
  const int n = 2 * grid.nodes();
  BeamMatrices bm{grid, SymBand(n, 3), SymBand(n, 3), SymBand(n, 3)};
  double Me[4][4], Ke[4][4], Be[4][4];
  hermite_element(grid.h(), Me, Ke, Be);
  for (int e = 0; e < grid.n_elem; ++e) {
    const int base = 2 * e;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        bm.M.add(base + i, base + j, Me[i][j]);
        bm.K.add(base + i, base + j, Ke[i][j]);
        bm.B.add(base + i, base + j, Be[i][j]);
      }
  }
  return bm;
}

double hermite_eval(const SpaceGrid& g, std::span<const double> y, double x, int k) {
  const double h = g.h();
  int e = std::clamp(static_cast<int>(std::floor(x / h)), 0, g.n_elem - 1);
  double s = (x - e * h) / h;
  double w1 = y[value_dof(e)], t1 = y[slope_dof(e)], w2 = y[value_dof(e + 1)], t2 = y[slope_dof(e + 1)];
  double s2 = s * s, s3 = s2 * s;
  switch (k) {
    case 0:
      return w1 * (1 - 3 * s2 + 2 * s3) + t1 * h * (s - 2 * s2 + s3) + w2 * (3 * s2 - 2 * s3) +
             t2 * h * (-s2 + s3);
    case 1:
      return w1 * (-6 * s + 6 * s2) / h + t1 * (1 - 4 * s + 3 * s2) + w2 * (6 * s - 6 * s2) / h +
             t2 * (-2 * s + 3 * s2);
    case 2:
      return w1 * (-6 + 12 * s) / (h * h) + t1 * (-4 + 6 * s) / h + w2 * (6 - 12 * s) / (h * h) +
             t2 * (-2 + 6 * s) / h;
    case 3:
      return (12 * w1 - 12 * w2) / (h * h * h) + (6 * t1 + 6 * t2) / (h * h);
    default:
      throw std::invalid_argument("derivative order above 3");
  }
}

void check_beam_resolution(double eps, const SpaceGrid& g) {
  if (!(eps > 0)) throw std::invalid_argument("beam needs eps > 0");
  if (g.h() > std::sqrt(eps) / 4 * (1 + 1e-12)) {
    std::ostringstream os;
    os << "mesh h = " << g.h() << " does not resolve the boundary layer: need h <= sqrt(eps)/4 = "
       << std::sqrt(eps) / 4 << " (use at least " << std::ceil(4 / std::sqrt(eps) - 1e-9)
       << " elements)";
    throw std::invalid_argument(os.str());
  }
}

SpaceGrid default_beam_grid(double eps) {
  int n = static_cast<int>(std::ceil(4.0 / std::sqrt(eps) - 1e-9));
  return SpaceGrid{std::max(200, n)};
}

TimeGrid default_beam_tgrid(const SpaceGrid& g, double T) {
  return time_grid_for_step(T, std::min(g.h(), T / 2000.0));
}

std::vector<double> layer_load(const SpaceGrid& g, double eps, End side) {
  static const double xg[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
  static const double wg[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                               0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                               0.2223810344533745, 0.1012285362903763};
  const double h = g.h(), r = std::sqrt(eps);
  std::vector<double> f(2 * g.nodes(), 0.0);
  for (int e = 0; e < g.n_elem; ++e) {
    for (int q = 0; q < 8; ++q) {
      double s = 0.5 * (xg[q] + 1.0);
      double x = (e + s) * h;
      double val = side == End::left ? std::exp(-x / r) : std::exp(-(1.0 - x) / r);
      double w = 0.5 * h * wg[q] * val;
      double s2 = s * s, s3 = s2 * s;
      f[value_dof(e)] += w * (1 - 3 * s2 + 2 * s3);
      f[slope_dof(e)] += w * h * (s - 2 * s2 + s3);
      f[value_dof(e + 1)] += w * (3 * s2 - 2 * s3);
      f[slope_dof(e + 1)] += w * h * (-s2 + s3);
    }
  }
  return f;
}

BeamStepper::BeamStepper(const BeamMatrices& mats, double eps, double dt)
    : mats_(&mats), eps_(eps), dt_(dt) {
  if (!(eps > 0) || !(dt > 0)) throw std::invalid_argument("beam stepper needs eps > 0 and dt > 0");
  const int J = mats.grid.n_elem;
  const int n = mats.ndof();
  c_ = slope_dof(J);
  for (int i = 0; i < n; ++i)
    if (i != value_dof(0) && i != slope_dof(0) && i != value_dof(J) && i != c_) free_.push_back(i);
  Ke_ = mats.B.combine(eps, mats.K, 1.0);
  Mfull_ = mats.M;
  const double q = dt * dt / 4.0;
  SymBand B0 = mats.M.combine(1.0, Ke_, q);
  SymBand B1 = mats.M.combine(2.0, Ke_, -2.0 * q);
  SymBand C = mats.M.combine(1.0, Ke_, -q);
  Mf_ = mats.M.restrict(free_);
  Kef_ = Ke_.restrict(free_);
  B0f_ = B0.restrict(free_);
  B1f_ = B1.restrict(free_);
  Cf_ = C.restrict(free_);
  const int m = nfree();
  b0c_.resize(m);
  b1c_.resize(m);
  cc_.resize(m);
  mc_.resize(m);
  for (int a = 0; a < m; ++a) {
    b0c_[a] = B0.get(free_[a], c_);
    b1c_[a] = B1.get(free_[a], c_);
    cc_[a] = C.get(free_[a], c_);
    mc_[a] = mats.M.get(free_[a], c_);
  }
  B0ch_ = BandCholesky(B0f_);
}

namespace {

// Only the last couple of free dofs couple to the control slope.
inline double tail_dot(const std::vector<double>& c, std::span<const double> x) {
  const int m = static_cast<int>(c.size());
  double s = 0.0;
  for (int i = std::max(0, m - 4); i < m; ++i) s += c[i] * x[i];
  return s;
}

inline void tail_axpy(double a, const std::vector<double>& c, std::span<double> y) {
  const int m = static_cast<int>(c.size());
  for (int i = std::max(0, m - 4); i < m; ++i) y[i] += a * c[i];
}

}  // namespace

void BeamStepper::march_free(int N, std::span<const double> y0f, std::span<const double> y1f,
                             std::span<const double> v, std::vector<double>& out) const {
  const int m = nfree();
  std::vector<double> Y0(y0f.begin(), y0f.end()), Y1(m), Y2(m), t(m);
  Cf_.multiply(Y0, Y1);
  Mf_.multiply(y1f, t);
  for (int i = 0; i < m; ++i) Y1[i] += dt_ * t[i];
  tail_axpy(v[0], cc_, Y1);
  tail_axpy(-v[1], b0c_, Y1);
  B0ch_.solve(Y1);
  for (int n = 1; n < N; ++n) {
    B1f_.multiply(Y1, Y2);
    B0f_.multiply(Y0, t);
    for (int i = 0; i < m; ++i) Y2[i] -= t[i];
    tail_axpy(v[n], b1c_, Y2);
    tail_axpy(-(v[n + 1] + v[n - 1]), b0c_, Y2);
    B0ch_.solve(Y2);
    std::swap(Y0, Y1);
    std::swap(Y1, Y2);
  }
  out.resize(2 * m);
  std::copy(Y0.begin(), Y0.end(), out.begin());
  std::copy(Y1.begin(), Y1.end(), out.begin() + m);
}

std::vector<double> BeamStepper::adjoint_trace(int N, std::span<const double> mu,
                                               std::vector<double>* first) const {
  const int m = nfree();
  std::vector<double> g(N + 1, 0.0);
  // phi^{N-1} = B0^{-1} mu_N, phi^N = -B0^{-1} mu_{N-1}; phi^k = B0^{-1}(B1 phi^{k+1} - B0 phi^{k+2}).
  std::vector<double> pN(mu.begin(), mu.begin() + m), pN1(mu.begin() + m, mu.end());
  B0ch_.solve(pN);
  for (double& x : pN) x = -x;
  B0ch_.solve(pN1);
  // Rolling window: a = phi^{k+2}, b = phi^{k+1}, c = phi^k.
  std::vector<double> a = pN, b = pN1, c(m), t(m);
  g[N] = -tail_dot(b0c_, b);
  double b1_b = tail_dot(b1c_, b);  // b1c . phi^{N-1}
  for (int k = N - 2; k >= 0; --k) {
    B1f_.multiply(b, c);
    B0f_.multiply(a, t);
    for (int i = 0; i < m; ++i) c[i] -= t[i];
    B0ch_.solve(c);
    // Now c = phi^k; finish the trace at level k + 1.
    if (k + 1 == N - 1)
      g[k + 1] = b1_b - tail_dot(b0c_, c);
    else
      g[k + 1] = b1_b - tail_dot(b0c_, c) - tail_dot(b0c_, a);
    b1_b = tail_dot(b1c_, c);
    std::swap(a, b);
    std::swap(b, c);
  }
  // b = phi^0, a = phi^1.
  g[0] = tail_dot(cc_, b) - tail_dot(b0c_, a);
  if (first) {
    first->assign(b.begin(), b.end());
    first->insert(first->end(), a.begin(), a.end());
  }
  return g;
}

BeamRun BeamStepper::run(const TimeGrid& tg, std::span<const double> y0, std::span<const double> y1,
                         const Signal* control, const LayerSource* source,
                         const BeamObserver& obs) const {
  const int n = mats_->ndof();
  const int m = nfree();
  const int N = tg.n_steps;
  if (std::abs(tg.dt() - dt_) > 1e-12 * dt_) throw std::invalid_argument("time grid does not match the stepper");
  if (y0.size() != size_t(n) || y1.size() != size_t(n)) throw std::invalid_argument("beam data have the wrong length");
  if (control && !control->values.empty() && !(control->grid == tg))
    throw std::invalid_argument("control on the wrong time grid");
  auto v = [&](int i) { return control && !control->values.empty() ? (*control)[i] : 0.0; };

  const int J = mats_->grid.n_elem;
  const double scale = 1.0 + std::abs(v(0));
  for (int d : {value_dof(0), slope_dof(0), value_dof(J)})
    if (std::abs(y0[d]) > 1e-12 * scale) throw std::invalid_argument("initial position violates the clamped conditions");
  if (std::abs(y0[c_] - v(0)) > 1e-10 * scale) throw std::invalid_argument("initial slope at x = 1 differs from the control");

  std::vector<double> loadL, loadR;
  if (source) {
    if (!source->left.values.empty()) loadL = layer_load(mats_->grid, source->eps, End::left);
    if (!source->right.values.empty()) loadR = layer_load(mats_->grid, source->eps, End::right);
  }
  // Full-dof load at level i.
  auto load = [&](int i, std::vector<double>& f) {
    f.assign(n, 0.0);
    if (!loadL.empty())
      for (int k = 0; k < n; ++k) f[k] += source->left[i] * loadL[k];
    if (!loadR.empty())
      for (int k = 0; k < n; ++k) f[k] += source->right[i] * loadR[k];
  };
  const bool forced = !loadL.empty() || !loadR.empty();

  auto to_full = [&](std::span<const double> yf, double vc, std::vector<double>& full) {
    full.assign(n, 0.0);
    for (int a = 0; a < m; ++a) full[free_[a]] = yf[a];
    full[c_] = vc;
  };

  // Reaction on the control row from three consecutive full levels and loads.
  const double q = dt_ * dt_ / 4.0;
  auto reaction = [&](const std::vector<double>& ym, const std::vector<double>& y, const std::vector<double>& yp,
                      const std::vector<double>* fm, const std::vector<double>* f, const std::vector<double>* fp) {
    double r = 0.0;
    for (int k = std::max(0, c_ - 3); k <= c_; ++k) {
      double mk = Mfull_.get(c_, k), kk = Ke_.get(c_, k);
      r += mk * (yp[k] - 2 * y[k] + ym[k]) / (dt_ * dt_) + kk * (yp[k] + 2 * y[k] + ym[k]) / 4.0;
    }
    if (f) r -= ((*fp)[c_] + 2 * (*f)[c_] + (*fm)[c_]) / 4.0;
    return r;
  };

  BeamRun out;
  out.reaction = Signal(tg);

  std::vector<double> Yf0(m), Yf1(m), Yf2(m), t(m);
  for (int a = 0; a < m; ++a) Yf0[a] = y0[free_[a]];
  std::vector<double> F0, F1, F2;
  if (forced) {
    load(0, F0);
    load(std::min(1, N), F1);
  }

  std::vector<double> full0(y0.begin(), y0.end()), full1, full2;
  std::vector<double> vel(y1.begin(), y1.end()), velp(n);
  if (obs) obs(0, full0, vel);

  // Start step: B0 y^1 = C y^0 + dt M y_1 + (dt^2/4)(F^0 + F^1) on free rows.
  Cf_.multiply(Yf0, Yf1);
  {
    std::vector<double> My1(n);
    Mfull_.multiply(y1, My1);
    for (int a = 0; a < m; ++a) Yf1[a] += dt_ * My1[free_[a]];
  }
  tail_axpy(v(0), cc_, Yf1);
  tail_axpy(-v(1), b0c_, Yf1);
  if (forced)
    for (int a = 0; a < m; ++a) Yf1[a] += q * (F0[free_[a]] + F1[free_[a]]);
  B0ch_.solve(Yf1);
  to_full(Yf1, v(1), full1);
  for (int k = 0; k < n; ++k) velp[k] = 2 * (full1[k] - full0[k]) / dt_ - vel[k];
  std::swap(vel, velp);
  if (obs) obs(1, full1, vel);

  for (int i = 1; i < N; ++i) {
    B1f_.multiply(Yf1, Yf2);
    B0f_.multiply(Yf0, t);
    for (int a = 0; a < m; ++a) Yf2[a] -= t[a];
    tail_axpy(v(i), b1c_, Yf2);
    tail_axpy(-(v(i + 1) + v(i - 1)), b0c_, Yf2);
    if (forced) {
      load(i + 1, F2);
      for (int a = 0; a < m; ++a) Yf2[a] += q * (F2[free_[a]] + 2 * F1[free_[a]] + F0[free_[a]]);
    }
    B0ch_.solve(Yf2);
    to_full(Yf2, v(i + 1), full2);
    out.reaction[i] = reaction(full0, full1, full2, forced ? &F0 : nullptr, forced ? &F1 : nullptr,
                               forced ? &F2 : nullptr);
    for (int k = 0; k < n; ++k) velp[k] = 2 * (full2[k] - full1[k]) / dt_ - vel[k];
    std::swap(vel, velp);
    if (obs) obs(i + 1, full2, vel);
    std::swap(Yf0, Yf1);
    std::swap(Yf1, Yf2);
    std::swap(full0, full1);
    std::swap(full1, full2);
    if (forced) {
      std::swap(F0, F1);
      std::swap(F1, F2);
    }
  }
  // End levels by quadratic extrapolation.
  if (N >= 4) {
    out.reaction[0] = 3 * out.reaction[1] - 3 * out.reaction[2] + out.reaction[3];
    out.reaction[N] = 3 * out.reaction[N - 1] - 3 * out.reaction[N - 2] + out.reaction[N - 3];
  }
  out.y_prev = full0;
  out.y_last = full1;
  out.ydot_last = vel;
  return out;
}

BeamField solve_beam(const BeamProblem& p, Direction dir) {
  if (p.check_resolution) check_beam_resolution(p.eps, p.grid);
  auto mats = assemble_beam_matrices(p.grid);
  BeamStepper st(mats, p.eps, p.tgrid.dt());
  const int n = mats.ndof();
  const int N = p.tgrid.n_steps;
  BeamField f{p.grid, p.tgrid, std::vector<double>(static_cast<size_t>(N + 1) * n),
              std::vector<double>(static_cast<size_t>(N + 1) * n)};
  const bool back = dir == Direction::backward;
  auto reverse = [&](const Signal& s) {
    Signal r = s;
    if (!s.values.empty()) std::reverse(r.values.begin(), r.values.end());
    return r;
  };
  Signal ctrl = back ? reverse(p.control) : p.control;
  std::optional<LayerSource> src = p.source;
  if (src && back) {
    src->left = reverse(src->left);
    src->right = reverse(src->right);
  }
  std::vector<double> y1 = p.y1;
  if (back)
    for (double& x : y1) x = -x;
  auto obs = [&](int i, std::span<const double> y, std::span<const double> yd) {
    int l = back ? N - i : i;
    double s = back ? -1.0 : 1.0;
    for (int k = 0; k < n; ++k) {
      f.y[static_cast<size_t>(l) * n + k] = y[k];
      f.ydot[static_cast<size_t>(l) * n + k] = s * yd[k];
    }
  };
  st.run(p.tgrid, p.y0, y1, ctrl.values.empty() ? nullptr : &ctrl, src ? &*src : nullptr, obs);
  return f;
}

BeamModes::BeamModes(const BeamMatrices& mats, double eps) {
  const int J = mats.grid.n_elem;
  n_ = mats.ndof();
  for (int i = 2; i < 2 * J; ++i) free_.push_back(i);
  const int m = static_cast<int>(free_.size());
  SymBand Ke = mats.B.combine(eps, mats.K, 1.0);
  SymBand A = Ke.restrict(free_);
  Mf_ = mats.M.restrict(free_);
  std::vector<double> ab = A.storage(), bb = Mf_.storage();
  std::vector<double> w(m);
  V_.assign(static_cast<size_t>(m) * m, 0.0);
  const int kd = A.kd();
  lapack_int info = LAPACKE_dsbgvd(LAPACK_COL_MAJOR, 'V', 'U', m, kd, kd, ab.data(), kd + 1, bb.data(),
                                   kd + 1, w.data(), V_.data(), m);
  if (info != 0) throw std::runtime_error("beam eigenvalue solver failed");
  omega_.resize(m);
  for (int k = 0; k < m; ++k) omega_[k] = std::sqrt(std::max(w[k], 0.0));
  // Constrained-row coefficients of the slope dof at x = 1.
  const int c = slope_dof(J);
  react_.assign(m, 0.0);
  for (int k = 0; k < m; ++k) {
    const double* v = V_.data() + static_cast<size_t>(k) * m;
    double kv = 0.0, mv = 0.0;
    for (int a = std::max(0, m - 3); a < m; ++a) {
      kv += Ke.get(c, free_[a]) * v[a];
      mv += mats.M.get(c, free_[a]) * v[a];
    }
    react_[k] = kv - w[k] * mv;
  }
}

std::vector<double> BeamModes::project(std::span<const double> y) const {
  if (y.size() != size_t(n_)) throw std::invalid_argument("data do not match the mesh");
  const int m = static_cast<int>(free_.size());
  std::vector<double> yf(m), My(m), a(m);
  for (int i = 0; i < m; ++i) yf[i] = y[free_[i]];
  Mf_.multiply(yf, My);
  for (int k = 0; k < m; ++k) {
    const double* v = V_.data() + static_cast<size_t>(k) * m;
    double s = 0.0;
    for (int i = 0; i < m; ++i) s += v[i] * My[i];
    a[k] = s;
  }
  return a;
}

std::vector<double> BeamModes::state(double t, std::span<const double> a0, std::span<const double> a1) const {
  const int m = static_cast<int>(free_.size());
  std::vector<double> y(n_, 0.0);
  for (int k = 0; k < m; ++k) {
    const double w = omega_[k];
    double q = a0[k] * std::cos(w * t) + a1[k] * (w > 0 ? std::sin(w * t) / w : t);
    const double* v = V_.data() + static_cast<size_t>(k) * m;
    for (int i = 0; i < m; ++i) y[free_[i]] += q * v[i];
  }
  return y;
}

Signal BeamModes::reaction(const TimeGrid& tg, std::span<const double> a0, std::span<const double> a1) const {
  const int m = static_cast<int>(free_.size());
  Signal r(tg);
  for (int k = 0; k < m; ++k) {
    const double w = omega_[k];
    const double c0 = a0[k] * react_[k], c1 = a1[k] * react_[k] / w;
    if (c0 == 0.0 && c1 == 0.0) continue;
    for (int i = 0; i < tg.size(); ++i) {
      const double t = tg.t(i);
      r[i] += c0 * std::cos(w * t) + c1 * std::sin(w * t);
    }
  }
  return r;
}

Signal trace_xx_at_one(const BeamField& u) {
  Signal s(u.tgrid);
  const double x = 1.0;
  for (int i = 0; i < u.tgrid.size(); ++i) s[i] = hermite_eval(u.grid, u.level(i), x, 2);
  return s;
}

double beam_energy_at(std::span<const double> y, std::span<const double> ydot, const BeamMatrices& mats,
                      double eps) {
  return mats.M.quad(ydot) + eps * mats.B.quad(y) + mats.K.quad(y);
}

Signal beam_energy(const BeamField& u, const BeamMatrices& mats, double eps) {
  Signal s(u.tgrid);
  for (int i = 0; i < u.tgrid.size(); ++i) s[i] = beam_energy_at(u.level(i), u.velocity(i), mats, eps);
  return s;
}

}  // namespace singctrl
