#pragma once

#include <span>
#include <vector>

namespace singctrl {

// Symmetric band matrix in LAPACK upper band storage (column major).
class SymBand {
 public:
  SymBand() = default;
  SymBand(int n, int kd);

  int n() const { return n_; }
  int kd() const { return kd_; }

  double get(int i, int j) const;
  void set(int i, int j, double v);
  void add(int i, int j, double v);

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  double quad(std::span<const double> x) const;

  // Sub-matrix on the listed rows/columns (indices must be increasing).
  SymBand restrict(std::span<const int> idx) const;
  // Linear combination a*this + b*other (same shape).
  SymBand combine(double a, const SymBand& other, double b) const;

  const std::vector<double>& storage() const { return ab_; }

 private:
  int n_ = 0, kd_ = 0;
  std::vector<double> ab_;
};

// Cholesky factor of an SPD band matrix; throws if the matrix is not positive definite.
class BandCholesky {
 public:
  BandCholesky() = default;
  explicit BandCholesky(const SymBand& a);

  // Solves in place.
  void solve(std::span<double> b) const;
  int n() const { return n_; }

 private:
  int n_ = 0, kd_ = 0;
  std::vector<double> ab_;
};

}  // namespace singctrl
