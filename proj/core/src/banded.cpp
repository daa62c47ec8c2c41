#include "singctrl/banded.hpp"

#include <lapacke.h>

#include <algorithm>
#include <stdexcept>
#include <string>

namespace singctrl {

SymBand::SymBand(int n, int kd) : n_(n), kd_(kd), ab_(static_cast<size_t>(kd + 1) * n, 0.0) {
  if (n <= 0 || kd < 0) throw std::invalid_argument("bad band matrix shape");
}

double SymBand::get(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) return 0.0;
  return ab_[(kd_ + i - j) + static_cast<size_t>(j) * (kd_ + 1)];
}

void SymBand::set(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) throw std::out_of_range("entry outside the band");
  ab_[(kd_ + i - j) + static_cast<size_t>(j) * (kd_ + 1)] = v;
}

void SymBand::add(int i, int j, double v) {
  if (i > j) std::swap(i, j);
  if (j - i > kd_) throw std::out_of_range("entry outside the band");
  ab_[(kd_ + i - j) + static_cast<size_t>(j) * (kd_ + 1)] += v;
}

void SymBand::multiply(std::span<const double> x, std::span<double> y) const {
  const int ld = kd_ + 1;
  std::fill(y.begin(), y.begin() + n_, 0.0);
  for (int j = 0; j < n_; ++j) {
    const double* col = ab_.data() + static_cast<size_t>(j) * ld + kd_;
    double xj = x[j];
    double acc = col[0] * xj;
    int i0 = std::max(0, j - kd_);
    for (int i = i0; i < j; ++i) {
      double a = col[i - j];
      y[i] += a * xj;
      acc += a * x[i];
    }
    y[j] += acc;
  }
}

double SymBand::quad(std::span<const double> x) const {
  std::vector<double> y(n_);
  multiply(x, y);
  double s = 0.0;
  for (int i = 0; i < n_; ++i) s += x[i] * y[i];
  return s;
}

SymBand SymBand::restrict(std::span<const int> idx) const {
  const int m = static_cast<int>(idx.size());
  // Band width can only shrink or stay when removing rows and columns.
  SymBand r(m, kd_);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m && b <= a + kd_; ++b) r.set(a, b, get(idx[a], idx[b]));
  return r;
}

SymBand SymBand::combine(double a, const SymBand& other, double b) const {
  if (other.n_ != n_ || other.kd_ != kd_) throw std::invalid_argument("band shapes differ");
  SymBand r(n_, kd_);
  for (size_t k = 0; k < ab_.size(); ++k) r.ab_[k] = a * ab_[k] + b * other.ab_[k];
  return r;
}

BandCholesky::BandCholesky(const SymBand& a) : n_(a.n()), kd_(a.kd()), ab_(a.storage()) {
  lapack_int info = LAPACKE_dpbtrf_work(LAPACK_COL_MAJOR, 'U', n_, kd_, ab_.data(), kd_ + 1);
  if (info != 0)
    throw std::runtime_error("band Cholesky failed (info = " + std::to_string(info) + ")");
}

void BandCholesky::solve(std::span<double> b) const {
  lapack_int info =
      LAPACKE_dpbtrs_work(LAPACK_COL_MAJOR, 'U', n_, kd_, 1, ab_.data(), kd_ + 1, b.data(), n_);
  if (info != 0) throw std::runtime_error("band solve failed");
}

}  // namespace singctrl
