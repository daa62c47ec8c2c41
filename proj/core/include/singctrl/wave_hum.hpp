#pragma once

#include <span>
#include <vector>

#include "singctrl/signals.hpp"
#include "singctrl/wave.hpp"

namespace singctrl {

struct WaveHumProblem {
  SpaceGrid grid{400};
  // Nodal initial data; the end values must vanish.
  std::vector<double> y0, y1;
  WeightFn weight;
  double T = 2.5;
  double tol = 1e-8;        // relative gradient norm
  double state_tol = 1e-6;  // H1 x L2 norm of the controlled final state
  int max_iter = 500;
};

struct HumResult {
  Signal control;
  // Adjoint data at t = 0 (position, velocity) in the solver's own representation.
  std::vector<double> phi0, phi1;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  double seconds = 0.0;
};

// Minimal weighted-norm Dirichlet control at x = 1 driving (y0, y1) to rest. The returned
// control is eta * phi_x(1, .) where phi solves the homogeneous adjoint problem.
HumResult solve_wave_control(const WaveHumProblem& p);

// The adjoint field phi with control = eta * D^- phi(1, .).
WaveField wave_hum_adjoint(const WaveHumProblem& p, const HumResult& r);
// eta times the backward difference at x = 1, the observation used by the solver.
Signal wave_hum_trace(const WaveField& phi, const WeightFn& w);

// Final-state norm sqrt(|y|_{H1}^2 + |y|_{L2}^2 + |y_t|_{L2}^2) of a wave solution; the L2
// parts use interior nodes and the velocity is the last backward difference.
double wave_final_state_norm(const WaveField& y);
// Re-solves the controlled problem independently and measures the final state.
double wave_control_certificate(const WaveHumProblem& p, const Signal& control);

// Discrete dual functional over the adjoint final pair (length 2 (J - 1)).
double wave_hum_functional(const WaveHumProblem& p, std::span<const double> mu);
// Relative mismatch between the gradient pairing at `base` along `dir` and the centered
// difference quotient of the functional.
double gradient_check_wave(const WaveHumProblem& p, std::span<const double> base,
                           std::span<const double> dir, double step);

WaveHumProblem default_wave_problem(int n_elem = 400);

}  // namespace singctrl
