#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "sepq/quantum_state.hpp"

namespace sepq {

// One 2x2-minor position: rows i < k of subsystem A, columns j < l of B.
struct MinorIndex {
  int i, k, j, l;
};

inline long long count_indices(BipartiteDims dims) {
  return static_cast<long long>(dims.m) * dims.n * (dims.m - 1) * (dims.n - 1) / 4;
}

// Lexicographic by (i, k, j, l).
inline std::vector<MinorIndex> minor_indices(BipartiteDims dims) {
  std::vector<MinorIndex> out;
  out.reserve(static_cast<size_t>(count_indices(dims)));
  for (int i = 0; i < dims.m; ++i)
    for (int k = i + 1; k < dims.m; ++k)
      for (int j = 0; j < dims.n; ++j)
        for (int l = j + 1; l < dims.n; ++l) out.push_back({i, k, j, l});
  return out;
}

// C_sigma = 2 (a_ij a_kl - a_il a_kj), all N minor positions in order.
inline Vector pure_concurrence_vector(const PureComponent& c) {
  const BipartiteDims dims{static_cast<int>(c.coeffs.rows()), static_cast<int>(c.coeffs.cols())};
  const auto idx = minor_indices(dims);
  Vector v(idx.size());
  const Matrix& a = c.coeffs;
  for (size_t s = 0; s < idx.size(); ++s) {
    const auto& q = idx[s];
    v(s) = 2.0 * (a(q.i, q.j) * a(q.k, q.l) - a(q.i, q.l) * a(q.k, q.j));
  }
  return v;
}

inline double pure_concurrence(const PureComponent& c) {
  return pure_concurrence_vector(c).norm();
}

// Family of symmetric r x r matrices over ensemble indices; labels identify
// either the minor position (C families) or the eigenvalue rank (T families).
struct ConcurrenceFamily {
  std::vector<Matrix> matrices;
  std::vector<MinorIndex> minor_labels;  // C families
  std::vector<int> eigen_labels;         // T families
  int r = 0;
};

inline ConcurrenceFamily build_family(const Decomposition& d) {
  if (d.components.empty()) throw EmptyDecomposition("cannot build family of empty decomposition");
  const int r = static_cast<int>(d.components.size());
  ConcurrenceFamily f;
  f.r = r;
  f.minor_labels = minor_indices(d.dims);
  f.matrices.reserve(f.minor_labels.size());
  for (const auto& q : f.minor_labels) {
    Matrix c(r, r);
    for (int mu = 0; mu < r; ++mu) {
      const Matrix& a = d.components[mu].coeffs;
      // diagonal kept as the doubled-minor expression so it matches the
      // pure concurrence vector bit for bit
      c(mu, mu) = 2.0 * (a(q.i, q.j) * a(q.k, q.l) - a(q.i, q.l) * a(q.k, q.j));
      for (int nu = mu + 1; nu < r; ++nu) {
        const Matrix& b = d.components[nu].coeffs;
        c(mu, nu) = a(q.i, q.j) * b(q.k, q.l) - a(q.i, q.l) * b(q.k, q.j) +
                    b(q.i, q.j) * a(q.k, q.l) - b(q.i, q.l) * a(q.k, q.j);
        c(nu, mu) = c(mu, nu);
      }
    }
    f.matrices.push_back(std::move(c));
  }
  return f;
}

// Decomposition change acts as C -> V C V^T (plain transpose).
inline ConcurrenceFamily transform_family(const ConcurrenceFamily& f, const Matrix& v,
                                          const Tolerances& tol = {}) {
  if (v.cols() != f.r) throw DimensionMismatch("isometry column count does not match family size");
  if (!is_isometry(v, tol.iso)) throw NotIsometry("V^dag V is not the identity within tol_iso");
  ConcurrenceFamily out;
  out.r = static_cast<int>(v.rows());
  out.minor_labels = f.minor_labels;
  out.eigen_labels = f.eigen_labels;
  out.matrices.reserve(f.matrices.size());
  for (const auto& c : f.matrices) out.matrices.push_back(v * c * v.transpose());
  return out;
}

// Orthonormal basis of the symmetric-matrix space: E_mm for mu = nu,
// (E_mn + E_nm)/sqrt(2) for mu < nu, pairs ordered lexicographically.
inline int sym_dim(int r) { return r * (r + 1) / 2; }

inline Vector sym_coords(const Matrix& s) {
  const int r = static_cast<int>(s.rows());
  Vector v(sym_dim(r));
  int p = 0;
  const double rt2 = std::sqrt(2.0);
  for (int mu = 0; mu < r; ++mu)
    for (int nu = mu; nu < r; ++nu) v(p++) = (mu == nu) ? s(mu, mu) : rt2 * s(mu, nu);
  return v;
}

inline Matrix sym_unvec(const Vector& v, int r) {
  Matrix s(r, r);
  int p = 0;
  const double rt2 = std::sqrt(2.0);
  for (int mu = 0; mu < r; ++mu)
    for (int nu = mu; nu < r; ++nu) {
      if (mu == nu) {
        s(mu, mu) = v(p++);
      } else {
        s(mu, nu) = v(p) / rt2;
        s(nu, mu) = v(p++) / rt2;
      }
    }
  return s;
}

// Positive semidefinite Gram operator on the symmetric-matrix space.
struct Biconcurrence {
  Matrix entries;  // side r(r+1)/2
  int r = 0;
};

inline Biconcurrence build_biconcurrence(const ConcurrenceFamily& f) {
  Biconcurrence b;
  b.r = f.r;
  const int dim = sym_dim(f.r);
  b.entries = Matrix::Zero(dim, dim);
  for (const auto& c : f.matrices) {
    const Vector hat = sym_coords(c);
    b.entries += hat * hat.adjoint();
  }
  return b;
}

// Eigen-matrices of B with nonzero eigenvalue, scaled by sqrt(eigenvalue).
inline ConcurrenceFamily extract_T(const Biconcurrence& b, int r, const Tolerances& tol = {}) {
  if (sym_dim(r) != b.entries.rows()) throw DimensionMismatch("biconcurrence side mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es((b.entries + b.entries.adjoint()) / 2.0);
  const int dim = static_cast<int>(es.eigenvalues().size());
  ConcurrenceFamily f;
  f.r = r;
  const double top = dim > 0 ? es.eigenvalues()(dim - 1) : 0.0;
  if (top <= 0.0) return f;
  for (int i = dim - 1; i >= 0; --i) {
    const double lambda = es.eigenvalues()(i);
    if (lambda <= tol.rank * top) break;
    const Vector v = fix_phase(es.eigenvectors().col(i));
    f.matrices.push_back(sym_unvec(std::sqrt(lambda) * v, r));
    f.eigen_labels.push_back(dim - 1 - i);
  }
  return f;
}

// G0 = sum_i sum_sigma |(U C_sigma U^T)_ii|^2, evaluated through B.
inline double g0_form(const Biconcurrence& b, const Matrix& u, const Tolerances& tol = {}) {
  if (u.cols() != b.r) throw DimensionMismatch("isometry column count does not match B");
  if (!is_isometry(u, tol.iso)) throw NotIsometry("U^dag U is not the identity within tol_iso");
  double g0 = 0.0;
  for (int i = 0; i < u.rows(); ++i) {
    const Vector row = u.row(i).transpose();
    const Vector q = sym_coords(row * row.transpose()).conjugate();
    const Vector bq = b.entries * q;
    g0 += std::real(q.dot(bq));
  }
  return g0;
}

}  // namespace sepq
