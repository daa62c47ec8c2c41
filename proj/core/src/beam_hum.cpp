#include "singctrl/beam_hum.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hum_cg.hpp"
#include "singctrl/norms.hpp"

namespace singctrl {

namespace {

class BeamOp {
 public:
  explicit BeamOp(const BeamHumProblem& p)
      : mats_(assemble_beam_matrices(p.grid)), st_(mats_, p.eps, p.tgrid.dt()), tg_(p.tgrid) {
    if (p.check_resolution) check_beam_resolution(p.eps, p.grid);
    if (!(tg_.T > 2.0)) throw std::invalid_argument("beam control needs T > 2");
    if (std::abs(p.weight.T - tg_.T) > 1e-12) throw std::invalid_argument("weight and T disagree");
    if (tg_.n_steps < 4) throw std::invalid_argument("beam control needs at least four steps");
    const int n = mats_.ndof();
    if (p.y0.size() != size_t(n) || p.y1.size() != size_t(n))
      throw std::invalid_argument("beam data have the wrong length");
    const int J = p.grid.n_elem;
    for (int d : {value_dof(0), slope_dof(0), value_dof(J), slope_dof(J)})
      if (std::abs(p.y0[d]) > 1e-12 || std::abs(p.y1[d]) > 1e-12)
        throw std::invalid_argument("beam data must vanish on the constrained dofs");
    nf_ = st_.nfree();
    N_ = tg_.n_steps;
    dt_ = tg_.dt();
    for (int a = 0; a < nf_; ++a) {
      y0_.push_back(p.y0[st_.free_dofs()[a]]);
      y1_.push_back(p.y1[st_.free_dofs()[a]]);
    }
    auto eta = sample_weight(p.weight, tg_);
    auto q = trapezoid_weights(tg_);
    gain_.resize(N_ + 1);
    for (int k = 0; k <= N_; ++k) gain_[k] = eta[k] / q[k];
    const auto& free = st_.free_dofs();
    SymBand Bf = mats_.B.restrict(free), Kf = mats_.K.restrict(free);
    Hf_ = Bf.combine(1.0, Kf, 1.0);
    Hch_ = BandCholesky(Hf_);
    Mch_ = BandCholesky(st_.Mf());
    Hf_ = Hf_.combine(1.0, st_.Mf(), 1.0);
  }

  int dim() const { return 2 * nf_; }
  const std::vector<double>& gain() const { return gain_; }
  const BeamStepper& stepper() const { return st_; }
  const BeamMatrices& mats() const { return mats_; }
  int N() const { return N_; }

  std::vector<double> march(std::span<const double> a, std::span<const double> b, std::span<const double> v) const {
    std::vector<double> out;
    st_.march_free(N_, a, b, v, out);
    return out;
  }
  std::vector<double> free_final() const { return march(y0_, y1_, std::vector<double>(N_ + 1, 0.0)); }
  std::vector<double> controlled_final(const std::vector<double>& v) const {
    std::vector<double> z(nf_, 0.0);
    return march(z, z, v);
  }
  std::vector<double> trace(std::span<const double> mu, std::vector<double>* first = nullptr) const {
    return st_.adjoint_trace(N_, mu, first);
  }

  // Metric |s|_{B+K}^2 + |d|_M^2 on the adjoint pair written through B0 (s the mean of the
  // two adjoint levels, d their difference quotient).
  std::vector<double> riesz(std::span<const double> r) const {
    const auto& B0 = st_.B0f();
    std::vector<double> ga(nf_), gb(nf_), gs(nf_), gd(nf_), out(2 * nf_);
    B0.multiply(r.subspan(nf_), ga);
    B0.multiply(r.subspan(0, nf_), gb);
    for (int i = 0; i < nf_; ++i) {
      gb[i] = -gb[i];
      gs[i] = ga[i] + gb[i];
      gd[i] = 0.5 * dt_ * (gb[i] - ga[i]);
    }
    Hch_.solve(gs);
    Mch_.solve(gd);
    std::vector<double> za(nf_), zb(nf_);
    for (int i = 0; i < nf_; ++i) {
      za[i] = gs[i] - 0.5 * dt_ * gd[i];
      zb[i] = gs[i] + 0.5 * dt_ * gd[i];
    }
    B0.multiply(zb, std::span<double>(out.data(), nf_));
    B0.multiply(za, std::span<double>(out.data() + nf_, nf_));
    for (int i = 0; i < nf_; ++i) out[i] = -out[i];
    return out;
  }

  double state_norm(std::span<const double> F) const {
    auto a = F.subspan(0, nf_), b = F.subspan(nf_);
    std::vector<double> vel(nf_);
    for (int i = 0; i < nf_; ++i) vel[i] = (b[i] - a[i]) / dt_;
    return std::sqrt(std::max(Hf_.quad(b) + st_.Mf().quad(vel), 0.0));
  }

 private:
  BeamMatrices mats_;
  BeamStepper st_;
  TimeGrid tg_;
  int nf_ = 0, N_ = 0;
  double dt_ = 0.0;
  std::vector<double> y0_, y1_, gain_;
  SymBand Hf_;
  BandCholesky Hch_, Mch_;
};

}  // namespace

HumResult solve_beam_control(const BeamHumProblem& p) {
  auto t0 = std::chrono::steady_clock::now();
  BeamOp op(p);
  detail::CgOptions opt{p.tol, p.state_tol, p.max_iter};
  auto cg = detail::hum_cg(op, opt);

  HumResult r;
  std::vector<double> first;
  auto g = op.trace(cg.mu, &first);
  r.control = Signal(p.tgrid);
  for (int k = 0; k <= op.N(); ++k) r.control[k] = op.gain()[k] * g[k];
  const auto& free = op.stepper().free_dofs();
  const int n = op.mats().ndof(), nf = static_cast<int>(free.size());
  r.phi0.assign(n, 0.0);
  r.phi1.assign(n, 0.0);
  if (!first.empty())
    for (int a = 0; a < nf; ++a) {
      r.phi0[free[a]] = first[a];
      r.phi1[free[a]] = first[nf + a];
    }
  r.iterations = cg.iterations;
  r.converged = cg.converged;
  r.final_residual = beam_control_certificate(p, r.control);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double beam_control_certificate(const BeamHumProblem& p, const Signal& control) {
  if (p.check_resolution) check_beam_resolution(p.eps, p.grid);
  auto mats = assemble_beam_matrices(p.grid);
  BeamStepper st(mats, p.eps, p.tgrid.dt());
  Signal v = control.grid == p.tgrid ? control : resample_cubic(control, p.tgrid);
  auto run = st.run(p.tgrid, p.y0, p.y1, &v, nullptr);
  // Backward-difference velocity on the free dofs; the control slope is boundary data.
  const double dt = p.tgrid.dt();
  std::vector<double> y(run.y_last.size(), 0.0), vel(run.y_last.size(), 0.0);
  for (int d : st.free_dofs()) {
    y[d] = run.y_last[d];
    vel[d] = (run.y_last[d] - run.y_prev[d]) / dt;
  }
  return beam_state_norm(y, vel, mats);
}

int beam_hum_dim(const BeamHumProblem& p) { return BeamOp(p).dim(); }

double beam_hum_functional(const BeamHumProblem& p, std::span<const double> mu) {
  BeamOp op(p);
  if (mu.size() != size_t(op.dim())) throw std::invalid_argument("multiplier length mismatch");
  auto g = op.trace(mu);
  double s = 0.0;
  for (size_t k = 0; k < g.size(); ++k) s += 0.5 * op.gain()[k] * g[k] * g[k];
  return s + detail::dot(mu, op.free_final());
}

double gradient_check_beam(const BeamHumProblem& p, std::span<const double> base,
                           std::span<const double> dir, double step) {
  if (step < 1e-7 || step > 1e-3) throw std::invalid_argument("step must lie in [1e-7, 1e-3]");
  BeamOp op(p);
  if (base.size() != size_t(op.dim()) || dir.size() != size_t(op.dim()))
    throw std::invalid_argument("multiplier length mismatch");
  auto g = op.trace(base);
  std::vector<double> v(g.size());
  for (size_t k = 0; k < g.size(); ++k) v[k] = op.gain()[k] * g[k];
  auto grad = op.controlled_final(v);
  auto F0 = op.free_final();
  for (size_t i = 0; i < grad.size(); ++i) grad[i] += F0[i];
  double pairing = detail::dot(grad, dir);
  std::vector<double> mp(base.begin(), base.end()), mm(base.begin(), base.end());
  for (size_t i = 0; i < mp.size(); ++i) {
    mp[i] += step * dir[i];
    mm[i] -= step * dir[i];
  }
  double fd = (beam_hum_functional(p, mp) - beam_hum_functional(p, mm)) / (2 * step);
  double scale = std::max(std::abs(pairing), std::abs(fd));
  return scale == 0.0 ? 0.0 : std::abs(pairing - fd) / scale;
}

BeamHumProblem default_beam_problem(double eps) {
  BeamHumProblem p;
  p.eps = eps;
  p.grid = default_beam_grid(eps);
  p.tgrid = default_beam_tgrid(p.grid, p.weight.T);
  const double k = 2 * M_PI;
  p.y0 = hermite_interpolant(
      p.grid, [&](double x) { return std::pow(std::sin(k * x), 4); },
      [&](double x) { return 4 * k * std::pow(std::sin(k * x), 3) * std::cos(k * x); });
  p.y0[value_dof(0)] = p.y0[slope_dof(0)] = 0.0;
  p.y0[value_dof(p.grid.n_elem)] = p.y0[slope_dof(p.grid.n_elem)] = 0.0;
  p.y1.assign(p.y0.size(), 0.0);
  return p;
}

}  // namespace singctrl
