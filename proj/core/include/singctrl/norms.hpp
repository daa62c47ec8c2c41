#pragma once

#include <span>
#include <vector>

#include "singctrl/beam.hpp"
#include "singctrl/signals.hpp"

namespace singctrl {

enum class NormKind { seminorm, full };

// Discrete Sobolev norms of order 0, 1 or 2.
// Hermite dofs use the mass, stiffness and bending forms; `full` sums all forms up to `order`.
double sobolev_norm(std::span<const double> hermite, const BeamMatrices& mats, int order,
                    NormKind kind = NormKind::seminorm);
// Nodal piecewise-linear fields (order 0 or 1); order 0 uses trapezoid weights.
double sobolev_norm(std::span<const double> nodal, const SpaceGrid& grid, int order,
                    NormKind kind = NormKind::seminorm);

// Dual norms through Riesz maps: order 1 inverts the P1 Dirichlet Laplacian on nodal
// functionals (interior entries), order 2 inverts B + K on clamped Hermite functionals.
double dual_norm_h1(std::span<const double> functional, const SpaceGrid& grid);
double dual_norm_h2(std::span<const double> functional, const BeamMatrices& mats);

// Final-state norm sqrt(y^T (B + K + M) y + ydot^T M ydot) on full Hermite dofs.
double beam_state_norm(std::span<const double> y, std::span<const double> ydot,
                       const BeamMatrices& mats);

}  // namespace singctrl
