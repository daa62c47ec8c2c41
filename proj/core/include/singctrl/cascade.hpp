#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "singctrl/beam.hpp"
#include "singctrl/signals.hpp"
#include "singctrl/wave.hpp"
#include "singctrl/wave_hum.hpp"

namespace singctrl {

using Profile = std::function<double(double)>;

struct CascadeInput {
  SpaceGrid grid{400};  // wave mesh; the time step equals h
  Profile position, velocity;  // an empty velocity means zero
  WeightFn weight;
  int order = 2;
  // Wave control settings. The relative criterion keeps the cascade exactly linear.
  double tol = 1e-13;
  double state_tol = 0.0;
  int max_iter = 4000;
};

// (sin^4(2 pi x), 0) with T = 2.5.
CascadeInput default_cascade_input(int n_elem = 400);

struct CompatibilityCheck {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = true;
};

struct CompatibilityReport {
  std::vector<CompatibilityCheck> checks;
  bool pass() const;
};

// Endpoint derivatives f^(k)(0), f^(k)(1), k = 0..m, from a Chebyshev interpolant on
// `points` Lobatto nodes of [0, 1]. `scale` (optional) receives a bound on max |f^(k)|.
struct EndpointDerivatives {
  std::vector<double> left, right, scale;
};
EndpointDerivatives endpoint_derivatives(const Profile& f, int m, int points = 49);

// Corner conditions on the initial position for orders 1 and 2 with the higher-order
// initial data identically zero. Residuals are compared with 1e-8 max(1, scale).
CompatibilityReport check_compatibility(const CascadeInput& in, int order);

// (A + C x^2 / 2) k(x / d) + (B + D (1 - x)^2 / 2) k((1 - x) / d), k a C3 cutoff that is flat
// at 0 and vanishes beyond 1. Matches the end values A, B and second derivatives C, D.
struct CornerLift {
  std::array<double, 4> c{};  // A, B, C, D
  double width = 0.1;
  double value(double x) const;
  double slope(double x) const;
};

struct CascadeLevel {
  Signal v;                    // v^j = -eta phi_x1
  Signal phi_x1;               // observed trace of phi^j at x = 1 (the control identity)
  // Traces passed to the next level, taken from the time-filtered fields. The two
  // sublattices of the wave scheme differ at O(h^3), which differentiation would amplify.
  Signal phi_x0, phi_x1_smooth;
  Signal y_x0, y_x1;
  WaveField y, phi, phi_a;     // phi = homogeneous part + phi_a; phi_a empty at level 0
  CornerLift lift0, lift1;     // initial data of phi_a
  std::vector<double> g0, g1;  // data handed to the wave control
  HumResult hum;
  double final_residual = 0.0;  // final-state norm of y^j on an independent solve
};

struct CascadeResult {
  SpaceGrid grid;
  TimeGrid tgrid;
  WeightFn weight;
  std::vector<CascadeLevel> levels;
  Signal y0_tt1;  // y^0_tt(1, .)
  CompatibilityReport compatibility;
  double fourth_sensitivity = 0.0;  // grid sensitivity of the y^0_xxxx estimate

  int order() const { return static_cast<int>(levels.size()) - 1; }
  bool certified(int j) const;
};

// Level tolerances on the final-state certificates.
inline constexpr std::array<double, 3> kLevelTolerance{1e-5, 1e-5, 1e-4};

CascadeLevel compute_v0(const CascadeInput& in);
CascadeLevel compute_v1(const CascadeInput& in, const CascadeResult& prev);
CascadeLevel compute_v2(const CascadeInput& in, const CascadeResult& prev);
// Runs levels 0..in.order. Throws when a level certificate exceeds its tolerance, except at
// level 2 when the compatibility report has already flagged the data.
CascadeResult run_cascade(const CascadeInput& in);

enum class LayerFactor { exp, w_exp };

struct BoundaryLayerProfile {
  Signal amplitude;
  End side = End::right;
  LayerFactor factor = LayerFactor::exp;
  double eps = 1.0;

  // amplitude(t_i) e^{-d/sqrt(eps)} (times d/sqrt(eps) for w_exp), d the distance to `side`.
  double eval(int i, double x) const;
  double dx(int i, double x) const;
};

struct CompositeSample {
  double y = 0.0, yx = 0.0, yt = 0.0;
};

// sum_{j<=n} eps^{j/2} [ y^j - y^j(0,.) e^{-x/sqrt(eps)} - y^j(1,.) e^{-(1-x)/sqrt(eps)} ],
// optionally with the second-order right-layer term  -(w/2) y^{j-2}_tt(1,.) e^{-w}.
class CompositeApproximation {
 public:
  CompositeApproximation(const CascadeResult& c, double eps, int n, bool second_order_layer = false);

  const TimeGrid& tgrid() const { return c_->tgrid; }
  CompositeSample at(int level, double x) const;

 private:
  const CascadeResult* c_;
  double eps_;
  int n_;
  std::vector<WaveField> fields_;  // time-filtered y^j
  std::vector<BoundaryLayerProfile> layers_;
  std::vector<Signal> layer_rates_;  // time derivatives of the layer amplitudes
};

CompositeApproximation composite_approximation(const CascadeResult& c, double eps, int n,
                                               bool second_order_layer = false);

// sum_{j<=n} eps^{j/2} v^j on the cascade grid.
Signal expansion_sum(const CascadeResult& c, double eps, int n);
// || v_eps - sum_{j<=n} eps^{j/2} v^j ||_{L2(0,T)}; pass sqrt(eps) times the beam control as
// v_eps. The sum is resampled onto the grid of v_eps.
double expansion_error(const Signal& v_eps, const CascadeResult& c, double eps, int n);

// Beam solve with control eps^{-1/2} sum_{j<=n} eps^{j/2} v^j and the input data, compared
// with the composite field: max over the cascade time levels of the H1_0 x L2 distance.
struct CompositeErrorOptions {
  std::optional<SpaceGrid> beam_grid;
  int substeps = 20;  // beam steps per cascade step
};
double composite_error(const CascadeResult& c, const CascadeInput& in, double eps, int n,
                       const CompositeErrorOptions& opt = {});

struct AdjointCheck {
  double residual = 0.0;     // || eta sqrt(eps) psi_xx(1,.) - sum eps^{j/2} v^j ||_{L2}
  double bc_residual = 0.0;  // clamped conditions of the corrected data before projection
};
// Builds the adjoint beam data from the level data with the boundary corrections, solves
// the clamped adjoint beam exactly in time through its modes and compares the reaction trace.
AdjointCheck adjoint_expansion_check(const CascadeResult& c, double eps, int n,
                                     std::optional<SpaceGrid> beam_grid = std::nullopt);

// Clamped beam with zero data and source f(t) e^{-x/sqrt(eps)}: sup_t sqrt(E(t)) per eps and
// the fitted exponent (NaN when all energies vanish).
struct LayerScaling {
  std::vector<std::pair<double, double>> points;  // (eps, sup sqrt E)
  double exponent = 0.0;
};
LayerScaling layer_source_scaling(std::span<const double> eps_list, const Signal& f);

}  // namespace singctrl
