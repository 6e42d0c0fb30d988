#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "sepq/config.hpp"
#include "sepq/errors.hpp"

namespace sepq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

struct BipartiteDims {
  int m = 1;  // subsystem A
  int n = 1;  // subsystem B
  int total() const { return m * n; }
};

// vec convention: row-major over (i, j), vec index = i*n + j.
inline Vector vec(const Matrix& a) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  Vector v(m * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) v(i * n + j) = a(i, j);
  return v;
}

inline Matrix unvec(const Vector& v, int m, int n) {
  Matrix a(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = v(i * n + j);
  return a;
}

// Phase convention: largest-magnitude entry made real positive.
inline Vector fix_phase(const Vector& v) {
  int best = 0;
  double mag = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > mag) {
      mag = a;
      best = i;
    }
  }
  if (mag == 0.0) return v;
  return v * (std::conj(v(best)) / mag);
}

// Tall or square: orthonormal columns (V^dag V = I). Wide: orthonormal rows,
// the co-isometry case a single-row decomposition-change map falls into.
inline bool is_isometry(const Matrix& v, double tol) {
  const Matrix g = v.rows() >= v.cols() ? Matrix(v.adjoint() * v) : Matrix(v * v.adjoint());
  return (g - Matrix::Identity(g.rows(), g.cols())).norm() <= tol;
}

// Sub-normalized pure ensemble member, stored as its m x n coefficient matrix.
struct PureComponent {
  Matrix coeffs;
  double weight;  // squared Frobenius norm

  explicit PureComponent(Matrix c) : coeffs(std::move(c)), weight(coeffs.squaredNorm()) {}
};

struct DensityMatrix {
  BipartiteDims dims;
  Matrix entries;
  int rank = 0;
  RealVector eigenvalues;  // descending
  Matrix eigenvectors;     // columns, matching order
};

struct Decomposition {
  BipartiteDims dims;
  std::vector<PureComponent> components;
};

inline DensityMatrix validate_state(const Matrix& entries, BipartiteDims dims,
                                    const Tolerances& tol = {}) {
  const int d = dims.total();
  if (entries.rows() != d || entries.cols() != d)
    throw DimensionMismatch("matrix side " + std::to_string(entries.rows()) +
                            " does not equal m*n = " + std::to_string(d));
  const double scale = std::max(1.0, entries.norm());
  if ((entries - entries.adjoint()).norm() > tol.herm * scale)
    throw NotHermitian("matrix is not Hermitian within tolerance");
  const double tr = entries.trace().real();
  if (std::abs(entries.trace() - Complex(1.0, 0.0)) > tol.trace * std::max(1.0, std::abs(tr)))
    throw TraceNotOne("trace is " + std::to_string(tr) + ", expected 1");

  Eigen::SelfAdjointEigenSolver<Matrix> es((entries + entries.adjoint()) / 2.0);
  const int count = static_cast<int>(es.eigenvalues().size());

  DensityMatrix s;
  s.dims = dims;
  s.entries = entries;
  s.eigenvalues = RealVector(count);
  s.eigenvectors = Matrix(d, count);
  for (int i = 0; i < count; ++i) {  // Eigen sorts ascending; flip
    s.eigenvalues(i) = es.eigenvalues()(count - 1 - i);
    s.eigenvectors.col(i) = fix_phase(es.eigenvectors().col(count - 1 - i));
  }
  if (s.eigenvalues(count - 1) < -tol.psd)
    throw NotPSD("eigenvalue " + std::to_string(s.eigenvalues(count - 1)) + " below -tol_psd");

  const double top = s.eigenvalues(0);
  s.rank = 0;
  for (int i = 0; i < count; ++i)
    if (s.eigenvalues(i) > tol.rank * top) ++s.rank;
  return s;
}

// Eigendecomposition ensemble: one sub-normalized component per retained eigenvalue.
inline Decomposition eigen_components(const DensityMatrix& s) {
  Decomposition d;
  d.dims = s.dims;
  d.components.reserve(s.rank);
  for (int mu = 0; mu < s.rank; ++mu) {
    const Vector v = std::sqrt(s.eigenvalues(mu)) * s.eigenvectors.col(mu);
    d.components.emplace_back(unvec(v, s.dims.m, s.dims.n));
  }
  return d;
}

inline Matrix reconstruct_density(const Decomposition& d) {
  if (d.components.empty()) throw EmptyDecomposition("decomposition has no components");
  const int dim = d.dims.total();
  Matrix rho = Matrix::Zero(dim, dim);
  for (const auto& c : d.components) {
    const Vector v = vec(c.coeffs);
    rho += v * v.adjoint();
  }
  return rho;
}

// Ensemble freedom: new components b^mu = sum_nu V_{mu nu} a^nu, V an isometry.
inline Decomposition apply_decomposition_change(const Decomposition& d, const Matrix& v,
                                                const Tolerances& tol = {}) {
  const int k = static_cast<int>(d.components.size());
  if (v.cols() != k)
    throw DimensionMismatch("isometry has " + std::to_string(v.cols()) + " columns, expected " +
                            std::to_string(k));
  if (!is_isometry(v, tol.iso)) throw NotIsometry("V^dag V is not the identity within tol_iso");

  Decomposition out;
  out.dims = d.dims;
  const int kp = static_cast<int>(v.rows());
  out.components.reserve(kp);
  for (int mu = 0; mu < kp; ++mu) {
    Matrix b = Matrix::Zero(d.dims.m, d.dims.n);
    for (int nu = 0; nu < k; ++nu) b += v(mu, nu) * d.components[nu].coeffs;
    out.components.emplace_back(std::move(b));
  }
  return out;
}

}  // namespace sepq
