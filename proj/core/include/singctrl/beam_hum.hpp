#pragma once

#include <span>
#include <vector>

#include "singctrl/beam.hpp"
#include "singctrl/signals.hpp"
#include "singctrl/wave_hum.hpp"

namespace singctrl {

struct BeamHumProblem {
  double eps = 1e-2;
  SpaceGrid grid{200};
  TimeGrid tgrid{2.5, 2000};
  // Full Hermite dofs; constrained entries must vanish.
  std::vector<double> y0, y1;
  WeightFn weight;
  double state_tol = 1e-6;  // H2 x L2 norm of the controlled final state
  double tol = 0.0;         // relative gradient norm, disabled when <= 0
  int max_iter = 1000;
  bool check_resolution = true;
};

// Minimal weighted-norm Neumann control at x = 1 for y_tt + eps y_xxxx - y_xx = 0.
// HumResult::control is the slope imposed at x = 1; phi0/phi1 hold the first two adjoint
// levels on full dofs.
HumResult solve_beam_control(const BeamHumProblem& p);

// Independent forward run with the given control; returns the final H2 x L2 norm with the
// velocity taken as the last backward difference on the free dofs.
double beam_control_certificate(const BeamHumProblem& p, const Signal& control);

// Discrete dual functional over the adjoint final pair (2 * free dofs).
double beam_hum_functional(const BeamHumProblem& p, std::span<const double> mu);
int beam_hum_dim(const BeamHumProblem& p);
double gradient_check_beam(const BeamHumProblem& p, std::span<const double> base,
                           std::span<const double> dir, double step);

// (sin^4(2 pi x), 0) on the default mesh and step for eps.
BeamHumProblem default_beam_problem(double eps);

}  // namespace singctrl
