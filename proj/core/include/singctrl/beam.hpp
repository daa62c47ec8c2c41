#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "singctrl/banded.hpp"
#include "singctrl/signals.hpp"
#include "singctrl/wave.hpp"

namespace singctrl {

// Hermite dofs: node j carries value (2j) and slope (2j + 1).
inline int value_dof(int node) { return 2 * node; }
inline int slope_dof(int node) { return 2 * node + 1; }

struct BeamMatrices {
  SpaceGrid grid;
  SymBand M;  // int u v
  SymBand K;  // int u' v'
  SymBand B;  // int u'' v''
  int ndof() const { return 2 * grid.nodes(); }
};

BeamMatrices assemble_beam_matrices(const SpaceGrid& grid);

// Element matrices on an element of length h, dofs (w1, t1, w2, t2).
void hermite_element(double h, double M[4][4], double K[4][4], double B[4][4]);

template <class F, class G>
std::vector<double> hermite_interpolant(const SpaceGrid& g, F f, G fprime) {
  std::vector<double> y(2 * g.nodes());
  for (int j = 0; j < g.nodes(); ++j) {
    y[value_dof(j)] = f(g.x(j));
    y[slope_dof(j)] = fprime(g.x(j));
  }
  return y;
}

// Evaluates the Hermite representation (or its k-th derivative, k <= 3) at x.
double hermite_eval(const SpaceGrid& g, std::span<const double> y, double x, int k = 0);

struct BeamProblem {
  double eps = 1e-2;
  SpaceGrid grid{200};
  TimeGrid tgrid{2.5, 2000};
  // Full Hermite dofs; the clamped dofs must vanish and the slope at x = 1 must equal v(0).
  std::vector<double> y0, y1;
  // Slope imposed at x = 1; empty means zero.
  Signal control;
  std::optional<LayerSource> source;
  bool check_resolution = true;
};

// Refuses meshes coarser than sqrt(eps)/4 (boundary layer width sqrt(eps)).
void check_beam_resolution(double eps, const SpaceGrid& g);

struct BeamField {
  SpaceGrid grid;
  TimeGrid tgrid;
  std::vector<double> y, ydot;  // level-major full dofs

  int ndof() const { return 2 * grid.nodes(); }
  std::span<const double> level(int i) const {
    return {y.data() + static_cast<size_t>(i) * ndof(), static_cast<size_t>(ndof())};
  }
  std::span<const double> velocity(int i) const {
    return {ydot.data() + static_cast<size_t>(i) * ndof(), static_cast<size_t>(ndof())};
  }
};

// Observer sees each level with full-dof position and velocity.
using BeamObserver = std::function<void(int, std::span<const double>, std::span<const double>)>;

struct BeamRun {
  std::vector<double> y_prev, y_last, ydot_last;  // levels N-1 and N
  Signal reaction;  // (M y'' + (eps B + K) y - f) on the slope row at x = 1, ~ eps y_xx(1)
};

// Newmark average acceleration (beta = 1/4, gamma = 1/2) written in three-level form on the
// free dofs with the constrained slope following the control.
class BeamStepper {
 public:
  BeamStepper(const BeamMatrices& mats, double eps, double dt);

  const BeamMatrices& mats() const { return *mats_; }
  double eps() const { return eps_; }
  double dt() const { return dt_; }
  int nfree() const { return static_cast<int>(free_.size()); }
  const std::vector<int>& free_dofs() const { return free_; }
  int control_dof() const { return c_; }

  BeamRun run(const TimeGrid& tg, std::span<const double> y0, std::span<const double> y1,
              const Signal* control, const LayerSource* source, const BeamObserver& obs = {}) const;

  // Free-dof kernels used by the control solver.
  // Final levels (N-1, N) of the free dofs for free data and control samples v (N + 1).
  void march_free(int N, std::span<const double> y0f, std::span<const double> y1f,
                  std::span<const double> v, std::vector<double>& out) const;
  // Transpose of the control-to-final-levels map applied to (mu_{N-1}, mu_N). When `first`
  // is given it receives the adjoint levels 0 and 1 (free dofs, concatenated).
  std::vector<double> adjoint_trace(int N, std::span<const double> mu,
                                    std::vector<double>* first = nullptr) const;

  const SymBand& B0f() const { return B0f_; }
  const SymBand& Mf() const { return Mf_; }
  const SymBand& Kef() const { return Kef_; }
  const BandCholesky& B0chol() const { return B0ch_; }

 private:
  const BeamMatrices* mats_;
  double eps_, dt_;
  int c_;
  std::vector<int> free_;
  SymBand Ke_, Mfull_;  // full-dof eps B + K and M
  SymBand Mf_, Kef_, B0f_, B1f_, Cf_;
  std::vector<double> b0c_, b1c_, cc_, mc_;  // columns of the constrained dof on the free rows
  BandCholesky B0ch_;
};

BeamField solve_beam(const BeamProblem& p, Direction dir = Direction::forward);

// Eigenpairs of (eps B + K, M) on the clamped free dofs (control slope held at zero). Gives
// the homogeneous clamped solution exactly in time.
class BeamModes {
 public:
  BeamModes(const BeamMatrices& mats, double eps);

  int size() const { return static_cast<int>(omega_.size()); }
  const std::vector<double>& omega() const { return omega_; }
  const std::vector<int>& free_dofs() const { return free_; }

  // M-orthonormal coordinates of full-dof data (constrained entries ignored).
  std::vector<double> project(std::span<const double> y) const;
  // Full dofs at time t for data (y0, y1).
  std::vector<double> state(double t, std::span<const double> a0, std::span<const double> a1) const;
  // Reaction on the slope row at x = 1 (~ eps y_xx(1)) sampled on tg, for modal data (a0, a1).
  Signal reaction(const TimeGrid& tg, std::span<const double> a0, std::span<const double> a1) const;

 private:
  int n_ = 0;
  std::vector<int> free_;
  std::vector<double> omega_, V_, react_;  // V_ column-major (free x modes)
  SymBand Mf_;
};

// Second derivative at x = 1 from the last element's dofs.
Signal trace_xx_at_one(const BeamField& u);
// Per-level  y_t^T M y_t + y^T (eps B + K) y.
Signal beam_energy(const BeamField& u, const BeamMatrices& mats, double eps);
double beam_energy_at(std::span<const double> y, std::span<const double> ydot,
                      const BeamMatrices& mats, double eps);

// Load vector of e^{-x/sqrt(eps)} (left) or e^{-(1-x)/sqrt(eps)} (right) on full dofs.
std::vector<double> layer_load(const SpaceGrid& g, double eps, End side);

// Default beam mesh for eps: max(200, ceil(4/sqrt(eps))) elements.
SpaceGrid default_beam_grid(double eps);
// Default step min(h, T/2000), rounded to divide T.
TimeGrid default_beam_tgrid(const SpaceGrid& g, double T);

}  // namespace singctrl
