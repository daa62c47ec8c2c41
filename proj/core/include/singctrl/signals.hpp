#pragma once

#include <span>
#include <utility>
#include <vector>

namespace singctrl {

struct TimeGrid {
  double T = 2.5;
  int n_steps = 1;

  double dt() const { return T / n_steps; }
  double t(int i) const { return i == n_steps ? T : i * dt(); }
  int size() const { return n_steps + 1; }
  bool operator==(const TimeGrid&) const = default;
};

// Builds a grid with the requested step rounded so that it divides T.
TimeGrid time_grid_for_step(double T, double dt);

struct SpaceGrid {
  int n_elem = 1;

  double h() const { return 1.0 / n_elem; }
  double x(int j) const { return j == n_elem ? 1.0 : j * h(); }
  int nodes() const { return n_elem + 1; }
  bool operator==(const SpaceGrid&) const = default;
};

struct Signal {
  TimeGrid grid;
  std::vector<double> values;

  Signal() = default;
  explicit Signal(const TimeGrid& g, double fill = 0.0) : grid(g), values(g.size(), fill) {}
  Signal(const TimeGrid& g, std::vector<double> v);

  double& operator[](int i) { return values[i]; }
  double operator[](int i) const { return values[i]; }
  int size() const { return static_cast<int>(values.size()); }
};

Signal operator+(const Signal& a, const Signal& b);
Signal operator-(const Signal& a, const Signal& b);
Signal operator*(double s, const Signal& a);

// eta(t) = ((1 - exp(-a t)) (1 - exp(-a (T - t))))^p
struct WeightFn {
  double T = 2.5;
  double a = 40.0;
  double p = 3.0;
};

// Weights below this value count as outside the support.
inline constexpr double kWeightFloor = 1e-14;

double eval_weight(const WeightFn& w, double t);
// k-th derivative of the weight, k = 0, 1, 2.
double weight_derivative(const WeightFn& w, double t, int k);
Signal sample_weight(const WeightFn& w, const TimeGrid& g);

// Composite trapezoid weights q_i (dt/2 at both ends).
std::vector<double> trapezoid_weights(const TimeGrid& g);
double trapezoid(const Signal& v);
double l2_inner(const Signal& a, const Signal& b);
double l2_norm(const Signal& v);

enum class WeightMode { times_eta, over_eta };

// Returns the weighted integral of |v|^2 (not its square root).
double weighted_l2_norm(const Signal& v, const WeightFn& w, WeightMode mode);

// Centered differences inside, one-sided second order at the ends.
Signal signal_time_derivative(const Signal& v, int k);

// Local cubic (four point Lagrange) interpolation onto another grid over the same [0,T].
Signal resample_cubic(const Signal& v, const TimeGrid& target);
double interpolate_cubic(std::span<const double> values, double h, double x);

// Finite-difference weights (Fornberg) at z for nodes x: w[k * x.size() + i] multiplies f(x_i)
// in the k-th derivative, k = 0..m.
std::vector<double> fd_weights(double z, std::span<const double> x, int m);

// Least-squares slope of log(error) against log(eps).
double fit_rate(std::span<const std::pair<double, double>> points);

}  // namespace singctrl
