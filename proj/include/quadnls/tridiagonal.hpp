#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "quadnls/errors.hpp"

namespace quadnls {

/// Tridiagonal matrix stored by diagonals. `lower[0]` and `upper[n-1]` are unused.
template <typename T>
struct Tridiagonal {
  std::vector<T> lower, diag, upper;

  explicit Tridiagonal(std::size_t n = 0) : lower(n), diag(n), upper(n) {}
  std::size_t size() const { return diag.size(); }

  template <typename V>
  void apply(std::span<const V> x, std::span<V> y) const {
    const std::size_t n = size();
    for (std::size_t j = 0; j < n; ++j) {
      V acc = diag[j] * x[j];
      if (j > 0) acc += lower[j] * x[j - 1];
      if (j + 1 < n) acc += upper[j] * x[j + 1];
      y[j] = acc;
    }
  }
};

/// LU factorisation (Thomas algorithm without pivoting) kept for repeated solves.
/// Only valid for matrices where elimination without pivoting is stable, e.g.
/// diagonally dominant ones, which is what every caller in this library builds.
template <typename T>
class TridiagonalLU {
 public:
  TridiagonalLU() = default;

  explicit TridiagonalLU(const Tridiagonal<T>& m) : lower_(m.lower), upper_(m.upper), pivot_(m.size()) {
    const std::size_t n = m.size();
    if (n == 0) return;
    pivot_[0] = m.diag[0];
    check(pivot_[0], 0);
    for (std::size_t j = 1; j < n; ++j) {
      lower_[j] = m.lower[j] / pivot_[j - 1];
      pivot_[j] = m.diag[j] - lower_[j] * upper_[j - 1];
      check(pivot_[j], j);
    }
  }

  std::size_t size() const { return pivot_.size(); }

  /// In-place solve; `b` becomes the solution.
  template <typename V>
  void solve_in_place(std::span<V> b) const {
    const std::size_t n = size();
    if (b.size() != n) throw Error(ErrorKind::InvalidArgument, "tridiagonal solve: size mismatch");
    if (n == 0) return;
    for (std::size_t j = 1; j < n; ++j) b[j] -= lower_[j] * b[j - 1];
    b[n - 1] /= pivot_[n - 1];
    for (std::size_t j = n - 1; j-- > 0;) b[j] = (b[j] - upper_[j] * b[j + 1]) / pivot_[j];
  }

 private:
  static void check(const T& p, std::size_t j) {
    using std::abs;
    if (!(abs(p) > 1e-300) || !std::isfinite(abs(p)))
      throw Error(ErrorKind::LinearSolve, "zero or non-finite pivot at row " + std::to_string(j));
  }

  std::vector<T> lower_, upper_, pivot_;
};

}  // namespace quadnls
