#pragma once

// Shared helpers for the unit and acceptance suites. The brute-force pieces
// here are independent oracles: they never call the implementation paths
// they are used to check.

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sepq/sepq.hpp"

namespace testutil {

using sepq::BipartiteDims;
using sepq::Complex;
using sepq::Matrix;
using sepq::Rng;
using sepq::Vector;

inline Matrix random_matrix(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gauss_c();
  return m;
}

// Haar-ish isometry: QR of a Gaussian matrix (rows >= cols).
inline Matrix random_isometry(Rng& rng, int rows, int cols) {
  const Matrix g = random_matrix(rng, rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  return qr.householderQ() * Matrix::Identity(rows, cols);
}

inline Matrix random_symmetric(Rng& rng, int r) {
  const Matrix g = random_matrix(rng, r, r);
  return (g + g.transpose()) / 2.0;
}

// Quadratic residual of one equation at a point.
inline Complex quad_eval(const Matrix& t, const Vector& u) {
  const Vector tu = t * u;
  return (u.array() * tu.array()).sum();
}

inline double system_residual(const std::vector<Matrix>& ts, const Vector& u) {
  const Vector un = u / u.norm();
  double worst = 0.0;
  for (const auto& t : ts) worst = std::max(worst, std::abs(quad_eval(t / t.norm(), un)));
  return worst;
}

inline bool projectively_equal(const Vector& a, const Vector& b, double tol) {
  // normalize both on the largest-magnitude coordinate of a
  int piv = 0;
  for (int i = 0; i < a.size(); ++i)
    if (std::abs(a(i)) > std::abs(a(piv))) piv = i;
  if (std::abs(b(piv)) < 1e-12 * b.norm()) return false;
  const Vector an = a / a(piv);
  const Vector bn = b / b(piv);
  return (an - bn).cwiseAbs().maxCoeff() <= tol * std::max(1.0, an.cwiseAbs().maxCoeff());
}

// Gauss-Newton polish of a homogeneous quadratic system from a random start,
// in the chart fixing the largest coordinate. Used as a grid+polish oracle.
inline bool polish_root(const std::vector<Matrix>& ts, Vector& u, int iters = 60) {
  const int r = static_cast<int>(u.size());
  const int n = static_cast<int>(ts.size());
  for (int it = 0; it < iters; ++it) {
    int piv = 0;
    for (int i = 0; i < r; ++i)
      if (std::abs(u(i)) > std::abs(u(piv))) piv = i;
    u /= u(piv);
    Vector f(n);
    Matrix jac(n, r - 1);
    for (int e = 0; e < n; ++e) {
      f(e) = quad_eval(ts[e], u);
      const Vector grad = 2.0 * (ts[e] * u);
      int col = 0;
      for (int i = 0; i < r; ++i)
        if (i != piv) jac(e, col++) = grad(i);
    }
    if (f.norm() < 1e-13) return true;
    const Vector step = jac.completeOrthogonalDecomposition().solve(f);
    int col = 0;
    for (int i = 0; i < r; ++i)
      if (i != piv) u(i) -= step(col++);
  }
  Vector f(n);
  for (int e = 0; e < n; ++e) f(e) = quad_eval(ts[e], u);
  return f.norm() < 1e-13;
}

// Independent root hunt: many random starts, Gauss-Newton polish, projective
// dedup. Returns roots of the system (possibly missing some, never spurious).
inline std::vector<Vector> brute_force_roots(const std::vector<Matrix>& ts, int r,
                                             unsigned long long seed, int starts = 300) {
  Rng rng(seed);
  std::vector<Vector> roots;
  for (int s = 0; s < starts; ++s) {
    Vector u(r);
    for (int i = 0; i < r; ++i) u(i) = rng.gauss_c();
    if (!polish_root(ts, u)) continue;
    bool dup = false;
    for (const auto& v : roots)
      if (projectively_equal(u, v, 1e-6)) dup = true;
    if (!dup) roots.push_back(u);
  }
  return roots;
}

// Quadrics through a set of planted projective points: a basis of the
// orthogonal complement of {p p^T} in the symmetric-matrix space.
inline std::vector<Matrix> planted_system(const std::vector<Vector>& points, int r, int n_eqs,
                                          unsigned long long seed) {
  const int dim = sepq::sym_dim(r);
  Matrix constraints(points.size(), dim);
  for (size_t p = 0; p < points.size(); ++p) {
    const Vector u = points[p];
    constraints.row(p) = sepq::sym_coords(u * u.transpose()).transpose();
  }
  // null space of constraints * hat(T) = 0 via SVD
  Eigen::JacobiSVD<Matrix> svd(constraints, Eigen::ComputeFullV);
  const int null_dim = dim - static_cast<int>(points.size());
  std::vector<Matrix> out;
  Rng rng(seed);
  for (int e = 0; e < n_eqs; ++e) {
    Vector combo = Vector::Zero(dim);
    for (int j = 0; j < null_dim; ++j)
      combo += rng.gauss_c() * svd.matrixV().col(dim - 1 - j);
    out.push_back(sepq::sym_unvec(combo, r));
  }
  return out;
}

}  // namespace testutil
