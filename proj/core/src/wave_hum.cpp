#include "singctrl/wave_hum.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hum_cg.hpp"
#include "singctrl/banded.hpp"

namespace singctrl {

namespace {

// Interior-node formulation of the Courant-one scheme with the control as the right
// boundary column. Multipliers mu = (mu_{N-1}, mu_N) pair with the last two levels.
class WaveOp {
 public:
  explicit WaveOp(const WaveHumProblem& p)
      : J_(p.grid.n_elem), m_(J_ - 1), h_(p.grid.h()), tg_(wave_time_grid(p.grid, p.T)) {
    if (J_ < 3) throw std::invalid_argument("wave control needs at least three elements");
    if (!(p.T > 2.0)) throw std::invalid_argument("wave control needs T > 2");
    if (std::abs(p.weight.T - p.T) > 1e-12) throw std::invalid_argument("weight and T disagree");
    if (p.y0.size() != size_t(J_ + 1) || p.y1.size() != size_t(J_ + 1))
      throw std::invalid_argument("wave data have the wrong length");
    N_ = tg_.n_steps;
    y0_.assign(p.y0.begin() + 1, p.y0.end() - 1);
    y1_.assign(p.y1.begin() + 1, p.y1.end() - 1);
    auto eta = sample_weight(p.weight, tg_);
    auto q = trapezoid_weights(tg_);
    gain_.resize(N_ + 1);
    for (int n = 0; n <= N_; ++n) gain_[n] = eta[n] / q[n];
    SymBand K(m_, 1);
    for (int i = 0; i < m_; ++i) {
      K.set(i, i, 2.0 / h_);
      if (i + 1 < m_) K.set(i, i + 1, -1.0 / h_);
    }
    kchol_ = BandCholesky(K);
  }

  int dim() const { return 2 * m_; }
  const std::vector<double>& gain() const { return gain_; }
  const TimeGrid& tgrid() const { return tg_; }

  std::vector<double> march(std::span<const double> a, std::span<const double> b,
                            std::span<const double> v) const {
    std::vector<double> u0(a.begin(), a.end()), u1(m_), u2(m_);
    shift(u0, u1);
    for (int j = 0; j < m_; ++j) u1[j] = 0.5 * u1[j] + h_ * b[j];
    u1[m_ - 1] += 0.5 * v[0];
    for (int n = 1; n < N_; ++n) {
      shift(u1, u2);
      for (int j = 0; j < m_; ++j) u2[j] -= u0[j];
      u2[m_ - 1] += v[n];
      std::swap(u0, u1);
      std::swap(u1, u2);
    }
    std::vector<double> F(2 * m_);
    std::copy(u0.begin(), u0.end(), F.begin());
    std::copy(u1.begin(), u1.end(), F.begin() + m_);
    return F;
  }

  std::vector<double> free_final() const {
    std::vector<double> z(N_ + 1, 0.0);
    return march(y0_, y1_, z);
  }

  std::vector<double> controlled_final(const std::vector<double>& v) const {
    std::vector<double> z(m_, 0.0);
    return march(z, z, v);
  }

  // Backward recursion p^n = A p^{n+1} - p^{n+2} from p^N = mu_N, p^{N+1} = -mu_{N-1};
  // g_n = p^{n+1}_{J-1}, halved at n = 0. Fills `levels` (phi^n = -p^{n+1}) when given.
  std::vector<double> trace(std::span<const double> mu, std::vector<double>* levels = nullptr) const {
    std::vector<double> g(N_ + 1, 0.0);
    std::vector<double> p2(m_), p1(mu.begin() + m_, mu.end()), p0(m_);
    for (int j = 0; j < m_; ++j) p2[j] = -mu[j];
    if (levels) {
      levels->assign(static_cast<size_t>(N_ + 1) * m_, 0.0);
      store(*levels, N_, p2);
      store(*levels, N_ - 1, p1);
    }
    g[N_ - 1] = p1[m_ - 1];
    for (int n = N_ - 2; n >= 0; --n) {
      shift(p1, p0);
      for (int j = 0; j < m_; ++j) p0[j] -= p2[j];
      g[n] = p0[m_ - 1];
      if (levels) store(*levels, n, p0);
      std::swap(p2, p1);
      std::swap(p1, p0);
    }
    g[0] *= 0.5;
    return g;
  }

  std::vector<double> riesz(std::span<const double> r) const {
    // (a, b) are the adjoint levels N-1, N; metric |s|_K^2 + |d|_M^2 with s the mean and
    // d the difference quotient, M = h I.
    std::vector<double> gs(m_), gd(m_), out(2 * m_);
    const double dt = h_;
    for (int j = 0; j < m_; ++j) {
      double ga = -r[m_ + j], gb = r[j];
      gs[j] = ga + gb;
      gd[j] = 0.5 * dt * (gb - ga) / h_;
    }
    kchol_.solve(gs);
    for (int j = 0; j < m_; ++j) {
      double za = gs[j] - 0.5 * dt * gd[j];
      double zb = gs[j] + 0.5 * dt * gd[j];
      out[j] = zb;
      out[m_ + j] = -za;
    }
    return out;
  }

  double state_norm(std::span<const double> F) const {
    double s = 0.0;
    const double dt = h_;
    for (int j = 0; j <= m_; ++j) {
      double l = j == 0 ? 0.0 : F[m_ + j - 1];
      double rr = j == m_ ? 0.0 : F[m_ + j];
      s += (rr - l) * (rr - l) / h_;
    }
    for (int j = 0; j < m_; ++j) {
      double y = F[m_ + j], vel = (F[m_ + j] - F[j]) / dt;
      s += h_ * (y * y + vel * vel);
    }
    return std::sqrt(s);
  }

  int J() const { return J_; }
  int N() const { return N_; }

 private:
  void shift(std::span<const double> u, std::span<double> out) const {
    for (int j = 0; j < m_; ++j)
      out[j] = (j > 0 ? u[j - 1] : 0.0) + (j + 1 < m_ ? u[j + 1] : 0.0);
  }
  void store(std::vector<double>& lv, int n, std::span<const double> p) const {
    // phi^n = -p^{n+1}: the slice written for index n holds p^{n+1}.
    for (int j = 0; j < m_; ++j) lv[static_cast<size_t>(n) * m_ + j] = -p[j];
  }

  int J_, m_;
  double h_;
  TimeGrid tg_;
  int N_ = 0;
  std::vector<double> y0_, y1_, gain_;
  BandCholesky kchol_;
};

}  // namespace

HumResult solve_wave_control(const WaveHumProblem& p) {
  auto t0 = std::chrono::steady_clock::now();
  WaveOp op(p);
  detail::CgOptions opt{p.tol, p.state_tol, p.max_iter};
  auto cg = detail::hum_cg(op, opt);

  HumResult r;
  std::vector<double> levels;
  auto g = op.trace(cg.mu, &levels);
  r.control = Signal(op.tgrid());
  for (int n = 0; n <= op.N(); ++n) r.control[n] = op.gain()[n] * g[n];
  const int J = op.J(), m = J - 1;
  r.phi0.assign(J + 1, 0.0);
  r.phi1.assign(J + 1, 0.0);
  // Velocity chosen so that the Taylor start reproduces level 1 exactly.
  for (int j = 1; j < J; ++j) r.phi0[j] = levels[j - 1];
  for (int j = 1; j < J; ++j) {
    double l1 = levels[static_cast<size_t>(m) + j - 1];
    double avg = 0.5 * (r.phi0[j - 1] + r.phi0[j + 1]);
    r.phi1[j] = (l1 - avg) / p.grid.h();
  }
  r.iterations = cg.iterations;
  r.converged = cg.converged;
  r.final_residual = wave_control_certificate(p, r.control);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

WaveField wave_hum_adjoint(const WaveHumProblem& p, const HumResult& r) {
  WaveProblem wp;
  wp.grid = p.grid;
  wp.tgrid = wave_time_grid(p.grid, p.T);
  wp.position = r.phi0;
  wp.velocity = r.phi1;
  return solve_wave(wp);
}

Signal wave_hum_trace(const WaveField& phi, const WeightFn& w) {
  auto eta = sample_weight(w, phi.tgrid);
  const int J = phi.grid.n_elem;
  const double h = phi.grid.h();
  Signal s(phi.tgrid);
  for (int i = 0; i < s.size(); ++i) s[i] = eta[i] * (phi(i, J) - phi(i, J - 1)) / h;
  return s;
}

double wave_final_state_norm(const WaveField& y) {
  const int J = y.grid.n_elem, N = y.tgrid.n_steps;
  const double h = y.grid.h(), dt = y.tgrid.dt();
  auto a = y.level(N - 1);
  auto b = y.level(N);
  double s = 0.0;
  for (int j = 0; j < J; ++j) s += (b[j + 1] - b[j]) * (b[j + 1] - b[j]) / h;
  // L2 parts on interior nodes; the end columns belong to the boundary data.
  for (int j = 1; j < J; ++j) {
    double vel = (b[j] - a[j]) / dt;
    s += h * (b[j] * b[j] + vel * vel);
  }
  return std::sqrt(s);
}

double wave_control_certificate(const WaveHumProblem& p, const Signal& control) {
  WaveProblem wp;
  wp.grid = p.grid;
  wp.tgrid = wave_time_grid(p.grid, p.T);
  wp.position = p.y0;
  wp.velocity = p.y1;
  wp.right = resample_cubic(control, wp.tgrid);
  return wave_final_state_norm(solve_wave(wp));
}

double wave_hum_functional(const WaveHumProblem& p, std::span<const double> mu) {
  WaveOp op(p);
  if (mu.size() != size_t(op.dim())) throw std::invalid_argument("multiplier length mismatch");
  auto g = op.trace(mu);
  double s = 0.0;
  for (size_t n = 0; n < g.size(); ++n) s += 0.5 * op.gain()[n] * g[n] * g[n];
  return s + detail::dot(mu, op.free_final());
}

double gradient_check_wave(const WaveHumProblem& p, std::span<const double> base,
                           std::span<const double> dir, double step) {
  if (step < 1e-7 || step > 1e-3) throw std::invalid_argument("step must lie in [1e-7, 1e-3]");
  WaveOp op(p);
  if (base.size() != size_t(op.dim()) || dir.size() != size_t(op.dim()))
    throw std::invalid_argument("multiplier length mismatch");
  auto g = op.trace(base);
  std::vector<double> v(g.size());
  for (size_t n = 0; n < g.size(); ++n) v[n] = op.gain()[n] * g[n];
  auto grad = op.march(std::vector<double>(p.y0.begin() + 1, p.y0.end() - 1),
                       std::vector<double>(p.y1.begin() + 1, p.y1.end() - 1), v);
  double pairing = detail::dot(grad, dir);
  std::vector<double> mp(base.begin(), base.end()), mm(base.begin(), base.end());
  for (size_t i = 0; i < mp.size(); ++i) {
    mp[i] += step * dir[i];
    mm[i] -= step * dir[i];
  }
  double fd = (wave_hum_functional(p, mp) - wave_hum_functional(p, mm)) / (2 * step);
  double scale = std::max(std::abs(pairing), std::abs(fd));
  return scale == 0.0 ? 0.0 : std::abs(pairing - fd) / scale;
}

WaveHumProblem default_wave_problem(int n_elem) {
  WaveHumProblem p;
  p.grid = SpaceGrid{n_elem};
  p.y0 = sample_nodes(p.grid, [](double x) { return std::pow(std::sin(2 * M_PI * x), 4); });
  p.y1.assign(p.grid.nodes(), 0.0);
  p.y0.front() = p.y0.back() = 0.0;
  return p;
}

}  // namespace singctrl
