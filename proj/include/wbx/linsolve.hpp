// Small dense linear systems with rank detection.

#pragma once

#include <cstddef>
#include <variant>
#include <vector>

namespace wbx::linsolve {

/// Row-major square matrix with right-hand side.
class DenseSystem {
 public:
  explicit DenseSystem(std::size_t n);
  DenseSystem(std::vector<std::vector<double>> rows, std::vector<double> rhs);

  std::size_t size() const { return n_; }
  double& a(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
  double a(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }
  double& b(std::size_t r) { return b_[r]; }
  double b(std::size_t r) const { return b_[r]; }

  /// max_r |(Ax - b)_r|
  double residual_inf(const std::vector<double>& x) const;

 private:
  std::size_t n_;
  std::vector<double> a_;
  std::vector<double> b_;
};

struct Unique {
  std::vector<double> x;
};

struct Family {
  std::vector<double> particular;
  std::vector<std::vector<double>> null_basis;
};

struct Inconsistent {};

using Solution = std::variant<Unique, Family, Inconsistent>;

inline constexpr double kDefaultTolerance = 1e-10;

/// Gaussian elimination with partial pivoting to reduced row-echelon form.
/// A candidate pivot smaller than tol times the largest pivot seen so far
/// (or the largest |a_ij| before the first pivot) marks the column as free.
/// Throws std::invalid_argument on non-finite entries or tol <= 0.
Solution solve(const DenseSystem& sys, double tol = kDefaultTolerance);

}  // namespace wbx::linsolve
