#include "wbx/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wbx::linsolve {

DenseSystem::DenseSystem(std::size_t n) : n_(n), a_(n * n, 0.0), b_(n, 0.0) {
  if (n == 0) throw std::invalid_argument("system must have at least one row");
}

DenseSystem::DenseSystem(std::vector<std::vector<double>> rows,
                         std::vector<double> rhs)
    : DenseSystem(rows.size()) {
  if (rhs.size() != n_) throw std::invalid_argument("rhs size mismatch");
  for (std::size_t r = 0; r < n_; ++r) {
    if (rows[r].size() != n_) throw std::invalid_argument("matrix is not square");
    std::copy(rows[r].begin(), rows[r].end(), a_.begin() + r * n_);
  }
  b_ = std::move(rhs);
}

double DenseSystem::residual_inf(const std::vector<double>& x) const {
  if (x.size() != n_) throw std::invalid_argument("solution size mismatch");
  double worst = 0.0;
  for (std::size_t r = 0; r < n_; ++r) {
    double acc = -b_[r];
    for (std::size_t c = 0; c < n_; ++c) acc += a(r, c) * x[c];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

Solution solve(const DenseSystem& sys, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const std::size_t n = sys.size();

  // Augmented working copy.
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
  double scale = 0.0;
  double b_scale = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const double v = sys.a(r, c);
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite matrix entry");
      m[r][c] = v;
      scale = std::max(scale, std::abs(v));
    }
    if (!std::isfinite(sys.b(r))) throw std::invalid_argument("non-finite rhs entry");
    m[r][n] = sys.b(r);
    b_scale = std::max(b_scale, std::abs(sys.b(r)));
  }

  std::vector<std::size_t> pivot_cols;
  std::vector<std::size_t> free_cols;
  double max_pivot = 0.0;
  std::size_t row = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = row;
    double best_mag = -1.0;
    for (std::size_t r = row; r < n; ++r) {
      if (std::abs(m[r][col]) > best_mag) {
        best_mag = std::abs(m[r][col]);
        best = r;
      }
    }
    const double reference = max_pivot > 0.0 ? max_pivot : scale;
    if (row >= n || best_mag <= tol * reference) {
      free_cols.push_back(col);
      continue;
    }
    std::swap(m[row], m[best]);
    max_pivot = std::max(max_pivot, best_mag);

    const double p = m[row][col];
    for (std::size_t c = col; c <= n; ++c) m[row][c] /= p;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == row) continue;
      const double f = m[r][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= n; ++c) m[r][c] -= f * m[row][c];
      m[r][col] = 0.0;
    }
    pivot_cols.push_back(col);
    ++row;
  }

  // Rows past the rank must have a vanishing right-hand side.
  const double consistency_tol = 1e-9 * (1.0 + b_scale);
  for (std::size_t r = row; r < n; ++r) {
    if (std::abs(m[r][n]) > consistency_tol) return Inconsistent{};
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t k = 0; k < pivot_cols.size(); ++k) x[pivot_cols[k]] = m[k][n];
  if (free_cols.empty()) return Unique{std::move(x)};

  Family fam{std::move(x), {}};
  for (std::size_t f : free_cols) {
    std::vector<double> v(n, 0.0);
    v[f] = 1.0;
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) v[pivot_cols[k]] = -m[k][f];
    fam.null_basis.push_back(std::move(v));
  }
  return fam;
}

}  // namespace wbx::linsolve
