#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace singctrl::detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct CgOutcome {
  std::vector<double> mu;
  int iterations = 0;
  bool converged = false;
  double state_norm = 0.0;
};

struct CgOptions {
  double rel_tol = 0.0;  // <= 0 disables the gradient criterion
  double state_tol = 1e-6;
  int max_iter = 500;
};

// Polak-Ribiere conjugate gradient on the dual functional
//   J(mu) = 1/2 sum_n gain_n (L^T mu)_n^2 + mu . F0,
// whose gradient is the controlled final state. The operator supplies the free final
// state F0, the controlled final state for a control signal, the trace L^T mu, the
// Riesz map of the chosen Hilbert metric and the norm used by the stopping rule.
template <class Op>
CgOutcome hum_cg(const Op& op, const CgOptions& opt) {
  const int n = op.dim();
  CgOutcome out;
  out.mu.assign(n, 0.0);
  std::vector<double> r = op.free_final();
  for (double& x : r) x = -x;
  std::vector<double> z = op.riesz(r);
  double rz = dot(r, z);
  const double rz0 = rz;
  out.state_norm = op.state_norm(r);
  if (out.state_norm <= opt.state_tol || rz0 <= 0.0) {
    out.converged = true;
    return out;
  }
  std::vector<double> d = z;
  const auto& gain = op.gain();
  std::vector<double> v(gain.size());
  for (int k = 1; k <= opt.max_iter; ++k) {
    auto g = op.trace(d);
    for (size_t i = 0; i < v.size(); ++i) v[i] = gain[i] * g[i];
    auto Gd = op.controlled_final(v);
    double dGd = dot(d, Gd);
    if (!(dGd > 0.0)) break;
    double alpha = rz / dGd;
    for (int i = 0; i < n; ++i) {
      out.mu[i] += alpha * d[i];
      r[i] -= alpha * Gd[i];
    }
    out.iterations = k;
    out.state_norm = op.state_norm(r);
    auto zn = op.riesz(r);
    double rzn = dot(r, zn);
    if (out.state_norm <= opt.state_tol ||
        (opt.rel_tol > 0.0 && std::sqrt(std::abs(rzn) / rz0) <= opt.rel_tol)) {
      out.converged = true;
      break;
    }
    double num = 0.0;
    for (int i = 0; i < n; ++i) num += r[i] * (zn[i] - z[i]);
    double beta = std::max(num / rz, 0.0);
    for (int i = 0; i < n; ++i) d[i] = zn[i] + beta * d[i];
    z.swap(zn);
    rz = rzn;
  }
  return out;
}

}  // namespace singctrl::detail
